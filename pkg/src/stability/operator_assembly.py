"""
Representação matricial truncada em Fourier do hamiltoniano linearizado.

Objetivos
---------
- 𝓗^{j,ℓ} (ordem εʲδˡ), 𝓗_{ε,β}, J e 𝓛 = J𝓗 como matrizes densas
  2(2K+1) × 2(2K+1), índice (componente, k) = c·(2K+1) + (k + K).
- Resolvente blockwise S_λ = (𝓛_{0,β*} − λ)^{-1} em forma fechada.
- Base U₁, U₂, V₁, V₂, autovetores à esquerda, reversão R e pareamento
  simplético (Ju, v).

Blocos de 𝓗 em cada ordem j (p, q da onda de Stokes, sem simetrização):

    [[ (1+q)/ζ′ ,      −p ∂x ],
     [ ∂x (p ·) ,      R_j   ]]

Para ℓ ≥ 1 só o canto ψψ é não nulo (R_{j,ℓ}).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Literal, Mapping, Tuple

import numpy as np

from src.stability.dispersion import ResonanceData, omega
from src.stability.dn_operator import beta_derivative_tables, hierarchy_multipliers
from src.stability.series_algebra import GradedSeries, TrigPoly, reconstruct_pq
from src.utils.errors import DomainError, NearSingularError
from src.utils.logger import get_logger, log_stage

_log = get_logger(__name__)

__all__ = [
    "TruncatedOperator",
    "ModeVector",
    "Basis",
    "index",
    "assemble_H_order",
    "assemble_H",
    "assemble_L",
    "J_matrix",
    "resolvent_apply_L0",
    "resolvent_blocks",
    "apply_resolvent_blocks",
    "basis_vectors",
    "reversal",
    "reversibility_defect",
    "symplectic_pairing",
    "pairing",
    "order_table",
]

Mode = Literal["expanded3", "direct-beta"]

EPS_GUARD = 0.2
MAX_ORDER = 3
SINGULAR_TOL = 1e-12


# Tipos


@dataclass(frozen=True)
class TruncatedOperator:
    """
    Operador truncado em |k| ≤ K.

    Campos
    ------
    k_max : int
    matrix : np.ndarray
        Matriz complexa densa (somente leitura).
    """

    k_max: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex, copy=True)
        n = 2 * (2 * self.k_max + 1)
        if m.shape != (n, n):
            raise DomainError(f"matriz com shape {m.shape}, esperado {(n, n)}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v: "ModeVector") -> "ModeVector":
        if v.k_max != self.k_max:
            raise DomainError("truncagens incompatíveis entre operador e vetor")
        return ModeVector(self.k_max, self.matrix @ v.entries)

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        return TruncatedOperator(self.k_max, self.matrix @ other.matrix)

    def __add__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        return TruncatedOperator(self.k_max, self.matrix + other.matrix)

    def __sub__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        return TruncatedOperator(self.k_max, self.matrix - other.matrix)

    def hermitian_defect(self) -> float:
        """max |M − M*|."""
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def block(self, row: int, col: int) -> np.ndarray:
        """Bloco (componente de linha, componente de coluna), 0 = η, 1 = ψ."""
        n = 2 * self.k_max + 1
        return self.matrix[row * n : (row + 1) * n, col * n : (col + 1) * n]


@dataclass(frozen=True)
class ModeVector:
    """
    Vetor (η̂, ψ̂) nos modos |k| ≤ K, na mesma indexação de `TruncatedOperator`.
    """

    k_max: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        e = np.array(self.entries, dtype=complex, copy=True).reshape(-1)
        if e.size != 2 * (2 * self.k_max + 1):
            raise DomainError("vetor com tamanho incompatível com k_max")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @classmethod
    def from_modes(cls, k_max: int, modes: Mapping[int, Tuple[complex, complex]]) -> "ModeVector":
        out = np.zeros(2 * (2 * k_max + 1), dtype=complex)
        for k, (a, b) in modes.items():
            out[index(0, k, k_max)] = a
            out[index(1, k, k_max)] = b
        return cls(k_max, out)

    def at(self, k: int) -> Tuple[complex, complex]:
        return (
            complex(self.entries[index(0, k, self.k_max)]),
            complex(self.entries[index(1, k, self.k_max)]),
        )

    def support(self, tol: float = 1e-10) -> Tuple[int, ...]:
        """Números de onda com algum coeficiente acima de `tol`."""
        n = 2 * self.k_max + 1
        mag = np.maximum(np.abs(self.entries[:n]), np.abs(self.entries[n:]))
        ks = np.arange(-self.k_max, self.k_max + 1)
        return tuple(int(k) for k in ks[mag > tol])

    def __add__(self, other: "ModeVector") -> "ModeVector":
        return ModeVector(self.k_max, self.entries + other.entries)

    def __sub__(self, other: "ModeVector") -> "ModeVector":
        return ModeVector(self.k_max, self.entries - other.entries)

    def scale(self, s: complex) -> "ModeVector":
        return ModeVector(self.k_max, s * self.entries)

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))


@dataclass(frozen=True)
class Basis:
    """U_j, V_j = U_j/√γ_j e autovetores à esquerda W_j (wᵀ𝓛₀ = iσ wᵀ)."""

    U1: ModeVector
    U2: ModeVector
    V1: ModeVector
    V2: ModeVector
    W1: ModeVector
    W2: ModeVector


def index(component: int, k: int, k_max: int) -> int:
    """Posição de (componente, k) no vetor/matriz truncado."""
    if abs(k) > k_max:
        raise DomainError(f"|k|={abs(k)} excede k_max={k_max}")
    return component * (2 * k_max + 1) + (k + k_max)


# Ingredientes cacheados


@lru_cache(maxsize=1)
def _pq_float() -> Tuple[GradedSeries, GradedSeries, GradedSeries]:
    p, q, qz = reconstruct_pq("exact")
    return p.to_float(), q.to_float(), qz.to_float()


@lru_cache(maxsize=8)
def _direct_tables(beta: float, k_max: int):
    return hierarchy_multipliers(beta, (-k_max, k_max))


def _mult_matrix(f: TrigPoly, k_max: int) -> np.ndarray:
    """M[k, k′] = f̂(k − k′)."""
    n = 2 * k_max + 1
    out = np.zeros((n, n), dtype=complex)
    ks = np.arange(-k_max, k_max + 1)
    for d, c in f.coeffs.items():
        cols = ks - d
        ok = np.abs(cols) <= k_max
        out[ks[ok] + k_max, cols[ok] + k_max] = complex(c)
    return out


def _dx_matrix(k_max: int) -> np.ndarray:
    return np.diag(1j * np.arange(-k_max, k_max + 1))


def _surface_blocks(j: int, k_max: int) -> np.ndarray:
    """Blocos ηη, ηψ, ψη de ordem εʲ com canto ψψ nulo."""
    p, _, qz = _pq_float()
    mp = _mult_matrix(p.term(j), k_max)
    d = _dx_matrix(k_max)
    n = 2 * k_max + 1
    return np.block(
        [
            [_mult_matrix(qz.term(j), k_max), -mp @ d],
            [d @ mp, np.zeros((n, n), dtype=complex)],
        ]
    )


def _psi_corner(g: np.ndarray, k_max: int) -> np.ndarray:
    n = 2 * k_max + 1
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[n:, n:] = g
    return out


def _check_order(j: int, ell: int, k_max: int) -> None:
    if not (0 <= j <= MAX_ORDER and 0 <= ell <= MAX_ORDER):
        raise DomainError(f"(j, ell) deve estar em {{0..3}}², recebido {(j, ell)}")
    if k_max < j + 3:
        raise DomainError(f"k_max={k_max} pequeno demais para a banda de ordem {j}")


# Montagem


@lru_cache(maxsize=64)
def assemble_H_order(j: int, ell: int, res: ResonanceData, k_max: int) -> TruncatedOperator:
    """
    Matriz de 𝓗^{j,ℓ} em β*.

    Parameters
    ----------
    j, ell : int
        Ordens em ε e δ (0…3).
    res : ResonanceData
    k_max : int
        Truncagem K ≥ j + 3.

    Returns
    -------
    TruncatedOperator
    """
    _check_order(j, ell, k_max)
    tables = beta_derivative_tables(res.beta_star, (-k_max, k_max))
    g = tables[(j, ell)].matrix(k_max)
    if ell == 0:
        return TruncatedOperator(k_max, _surface_blocks(j, k_max) + _psi_corner(g, k_max))
    return TruncatedOperator(k_max, _psi_corner(g, k_max))


def _check_params(eps: float, delta: float, res: ResonanceData) -> None:
    if abs(eps) > EPS_GUARD:
        raise DomainError(f"|eps| deve ser <= {EPS_GUARD} (recebido {eps})")
    if res.beta_star + delta <= 0:
        raise DomainError(f"beta = beta* + delta deve ser > 0 (delta={delta})")


def assemble_H(
    eps: float,
    delta: float,
    res: ResonanceData,
    k_max: int,
    mode: Mode = "expanded3",
) -> TruncatedOperator:
    """
    𝓗_{ε, β*+δ} até ε³.

    Modos
    -----
    expanded3 : Σ_{j,ℓ ≤ 3} εʲ δˡ 𝓗^{j,ℓ}.
    direct-beta : R_j avaliado exatamente em β = β* + δ (sem expansão em δ).
    """
    _check_params(eps, delta, res)
    if mode == "expanded3":
        acc = np.zeros((2 * (2 * k_max + 1),) * 2, dtype=complex)
        for j in range(MAX_ORDER + 1):
            for ell in range(MAX_ORDER + 1):
                acc += eps**j * delta**ell * assemble_H_order(j, ell, res, k_max).matrix
        return TruncatedOperator(k_max, acc)
    if mode == "direct-beta":
        _check_order(MAX_ORDER, 0, k_max)
        tables = _direct_tables(float(res.beta_star + delta), k_max)
        acc = np.zeros((2 * (2 * k_max + 1),) * 2, dtype=complex)
        for j in range(MAX_ORDER + 1):
            acc += eps**j * (_surface_blocks(j, k_max) + _psi_corner(tables[j].matrix(k_max), k_max))
        return TruncatedOperator(k_max, acc)
    raise DomainError(f"modo de montagem desconhecido: {mode!r}")


@lru_cache(maxsize=8)
def _j_dense(k_max: int) -> np.ndarray:
    n = 2 * k_max + 1
    eye = np.eye(n)
    return np.block([[np.zeros((n, n)), eye], [-eye, np.zeros((n, n))]])


def J_matrix(k_max: int) -> TruncatedOperator:
    """J = [[0, 1], [−1, 0]]."""
    return TruncatedOperator(k_max, _j_dense(k_max))


def assemble_L(
    eps: float,
    delta: float,
    res: ResonanceData,
    k_max: int,
    mode: Mode = "expanded3",
) -> TruncatedOperator:
    """𝓛_{ε,β} = J𝓗_{ε,β}."""
    h = assemble_H(eps, delta, res, k_max, mode)
    out = J_matrix(k_max) @ h
    log_stage(_log, "AssembleL", eps=eps, delta=delta, k_max=k_max, mode=mode, level=10)
    return out


# Resolvente de 𝓛₀


def resolvent_blocks(lam, res: ResonanceData, k_max: int) -> Tuple[np.ndarray, ...]:
    """
    Entradas (s11, s12, s21, s22) de (𝓛₀ − λ)^{-1} por número de onda.

    Para cada k, com a = ik − λ e det = a² + Ω(k):
        (1/det)·[[a, −Ω], [1, a]]

    Parameters
    ----------
    lam : complex | np.ndarray
        Um ou vários λ (eixo 0 das saídas).

    Returns
    -------
    tuple[np.ndarray, ...]
        Arrays com shape (len(lam), 2K+1).

    Raises
    ------
    NearSingularError
        |det| < 1e-12 em algum k.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))[:, None]
    ks = np.arange(-k_max, k_max + 1)
    om = omega(ks, res.beta_star)[None, :]
    a = 1j * ks[None, :] - lam
    det = a * a + om
    if np.any(np.abs(det) < SINGULAR_TOL):
        raise NearSingularError("resolvente de L0 quase singular no λ pedido")
    inv = 1.0 / det
    return a * inv, -om * inv, inv, a * inv


def apply_resolvent_blocks(blocks: Tuple[np.ndarray, ...], x: np.ndarray, k_max: int) -> np.ndarray:
    """Aplica S_λ (de `resolvent_blocks`) a x com shape (..., 2(2K+1))."""
    n = 2 * k_max + 1
    s11, s12, s21, s22 = blocks
    eta, psi = x[..., :n], x[..., n:]
    return np.concatenate([s11 * eta + s12 * psi, s21 * eta + s22 * psi], axis=-1)


def resolvent_apply_L0(lam: complex, v: ModeVector, res: ResonanceData, k_max: int) -> ModeVector:
    """
    S_λ v = (𝓛_{0,β*} − λ)^{-1} v por solução 2×2 em cada k.
    """
    if v.k_max != k_max:
        raise DomainError("truncagem do vetor difere de k_max")
    blocks = resolvent_blocks(lam, res, k_max)
    out = apply_resolvent_blocks(blocks, v.entries[None, :], k_max)[0]
    return ModeVector(k_max, out)


# Base, reversão e pareamentos


def basis_vectors(res: ResonanceData, k_max: int) -> Basis:
    """
    U₁ = (iγ₁, 1)e^{ix}, U₂ = (−iγ₂, 1)e^{−2ix} e os vetores associados.
    """
    if k_max < 2:
        raise DomainError("k_max deve ser >= 2 para conter os modos ressonantes")
    g1, g2 = res.gamma1, res.gamma2
    u1 = ModeVector.from_modes(k_max, {1: (1j * g1, 1.0)})
    u2 = ModeVector.from_modes(k_max, {-2: (-1j * g2, 1.0)})
    return Basis(
        U1=u1,
        U2=u2,
        V1=u1.scale(1.0 / np.sqrt(g1)),
        V2=u2.scale(1.0 / np.sqrt(g2)),
        W1=ModeVector.from_modes(k_max, {1: (1.0, 1j * g1)}),
        W2=ModeVector.from_modes(k_max, {-2: (1.0, -1j * g2)}),
    )


def reversal(v: ModeVector) -> ModeVector:
    """R(v₁, v₂)(x) = (−v̄₁(−x), v̄₂(−x)); em Fourier (c₁, c₂) ↦ (−c̄₁, c̄₂)."""
    n = 2 * v.k_max + 1
    e = np.conj(v.entries)
    e[:n] = -e[:n]
    return ModeVector(v.k_max, e)


def reversibility_defect(op: TruncatedOperator, anti: bool = False) -> float:
    """
    Defeito de 𝓗R = R𝓗 (ou R𝓛 = −𝓛R com `anti=True`).

    Com S = diag(−I, I), 𝓗R = R𝓗 equivale a M·S = S·M̄.
    """
    n = 2 * op.k_max + 1
    s = np.concatenate([-np.ones(n), np.ones(n)])
    lhs = op.matrix * s[None, :]
    rhs = s[:, None] * np.conj(op.matrix)
    return float(np.max(np.abs(lhs + rhs if anti else lhs - rhs)))


def pairing(f: ModeVector | np.ndarray, g: ModeVector | np.ndarray) -> complex:
    """(f, g) = 2π Σ f̂·conj(ĝ) nas duas componentes."""
    a = f.entries if isinstance(f, ModeVector) else np.asarray(f)
    b = g.entries if isinstance(g, ModeVector) else np.asarray(g)
    return complex(2.0 * np.pi * np.vdot(b, a))


def symplectic_pairing(u: ModeVector, v: ModeVector) -> complex:
    """(Ju, v)."""
    return pairing(J_matrix(u.k_max).apply(u), v)


def order_table(res: ResonanceData, k_max: int) -> Dict[Tuple[int, int], np.ndarray]:
    """Todas as matrizes 𝓗^{j,ℓ} com j + ℓ ≤ 3."""
    return {
        (j, ell): assemble_H_order(j, ell, res, k_max).matrix
        for j in range(MAX_ORDER + 1)
        for ell in range(MAX_ORDER + 1 - j)
    }
