"""
Projetores espectrais por quadratura de contorno, transformação de Kato,
correções perturbativas P^{m,n} e extração da tabela de coeficientes.

Objetivos
---------
- `projector`: P = −(1/2πi) ∮_Γ (𝓛 − λ)^{-1} dλ por trapézio em Γ, com sonda
  de colisão e verificação contra a sub-regra de nós pares.
- `kato_transform`: 𝓚 = (1 − X²)^{-1/2}[PP₀ + (1−P)(1−P₀)], X = P − P₀.
- `reduced_matrix_direct`: matriz 2×2 L_{ε,δ} na base 𝓚V_j (rota direta).
- `PerturbativeEngine`: expansão ordem a ordem (resolvente de 𝓛₀ em forma
  fechada), autovetores U_j^{(m,n)}, produtos internos e a tabela
  {a_{i,j}, b₃,₀, c_{i,j}} com a verificação do padrão de anulação.

Uso
---
    from src.stability.kato_engine import PerturbativeEngine
    eng = PerturbativeEngine(solve_resonance(), k_max=32)
    table = eng.extract_coeff_table()
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import factorial
from threading import Lock
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.stability.dispersion import (
    GAP_K_MAX,
    ResonanceData,
    contour_radius,
    solve_resonance,
    spectral_gap,
)
from src.stability.operator_assembly import (
    MAX_ORDER,
    Mode,
    ModeVector,
    TruncatedOperator,
    assemble_H,
    assemble_L,
    basis_vectors,
    order_table,
    pairing,
    J_matrix,
    apply_resolvent_blocks,
    resolvent_blocks,
)
from src.utils.errors import (
    ConsistencyError,
    ContourCollisionError,
    DomainError,
    KatoNormError,
    QuadratureError,
)
from src.utils.logger import get_logger, log_stage
from src.utils.parallel import ordered_map

_log = get_logger(__name__)

__all__ = [
    "ContourSpec",
    "CoeffTable",
    "PerturbativeEngine",
    "default_contour",
    "projector",
    "exact_projector",
    "kato_transform",
    "reduced_matrix_direct",
    "reduced_matrix",
    "pmn_corrections",
    "eigvec_corrections",
    "extract_coeff_table",
    "FORBIDDEN_AC",
    "FORBIDDEN_B",
]

Order = Tuple[int, int]

QUAD_TOL = 1e-9
CONTOUR_SAMPLES = 8
COLLISION_TOL = 1e-3
KATO_SERIES_TOL = 1e-14
FORBIDDEN_TOL = 1e-8

# Coeficientes que devem anular-se pela estrutura de reversibilidade
FORBIDDEN_AC: Tuple[Order, ...] = ((0, 0), (1, 0), (1, 1), (3, 0), (1, 2))
FORBIDDEN_B: Tuple[Order, ...] = tuple(
    (m, n) for m in range(4) for n in range(4 - m) if (m, n) != (3, 0)
)


# Tipos


@dataclass(frozen=True)
class ContourSpec:
    """
    Círculo Γ = {center + radius·e^{iθ}} com `nodes` nós de trapézio.
    """

    center: complex
    radius: float
    nodes: int = 128

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise DomainError(f"raio do contorno deve ser > 0 (recebido {self.radius})")
        n = int(self.nodes)
        if n < 32 or n & (n - 1):
            raise DomainError(f"nodes deve ser potência de 2 >= 32 (recebido {self.nodes})")

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.nodes) / self.nodes

    def points(self) -> np.ndarray:
        return self.center + self.radius * np.exp(1j * self.angles())

    def weights(self) -> np.ndarray:
        """w_n com P ≈ Σ w_n (𝓛 − λ_n)^{-1}."""
        return -self.radius * np.exp(1j * self.angles()) / self.nodes

    def check_against(self, res: ResonanceData) -> None:
        gap = spectral_gap(res, GAP_K_MAX)
        if abs(self.center - 1j * res.sigma) + self.radius >= gap:
            raise DomainError("contorno alcança o restante do espectro não perturbado")


def default_contour(res: ResonanceData, nodes: int = 128) -> ContourSpec:
    """Γ centrado em iσ com raio gap/2."""
    return ContourSpec(center=1j * res.sigma, radius=contour_radius(res), nodes=nodes)


@dataclass(frozen=True)
class CoeffTable:
    """
    Coeficientes sobreviventes das expansões de A, B, C:

        A = a01 δ + a20 ε² + a02 δ² + a21 ε²δ + a03 δ³
        B = b30 ε³
        C = c01 δ + c20 ε² + c02 δ² + c21 ε²δ + c03 δ³
    """

    a01: float
    a20: float
    a02: float
    a21: float
    a03: float
    b30: float
    c01: float
    c20: float
    c02: float
    c21: float
    c03: float
    forbidden_max: float = field(default=0.0, compare=False)

    def to_dict(self) -> Dict[str, float]:
        d = asdict(self)
        d.pop("forbidden_max")
        return d

    def second_order(self) -> "CoeffTable":
        """Tabela truncada em ordem total 2 (b30, a21, a03, c21, c03 zerados)."""
        return CoeffTable(
            a01=self.a01, a20=self.a20, a02=self.a02, a21=0.0, a03=0.0, b30=0.0,
            c01=self.c01, c20=self.c20, c02=self.c02, c21=0.0, c03=0.0,
        )


# Rota direta


def _contour_smin(L: np.ndarray, contour: ContourSpec) -> float:
    theta = 2.0 * np.pi * np.arange(CONTOUR_SAMPLES) / CONTOUR_SAMPLES
    eye = np.eye(L.shape[0])
    worst = np.inf
    for lam in contour.center + contour.radius * np.exp(1j * theta):
        s = np.linalg.svd(L - lam * eye, compute_uv=False)
        worst = min(worst, float(s[-1]))
    return worst


def _even_rule(values: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, float]:
    full = np.tensordot(weights, values, axes=(0, 0))
    half = np.tensordot(2.0 * weights[::2], values[::2], axes=(0, 0))
    return full, float(np.max(np.abs(full - half), initial=0.0))


def exact_projector(res: ResonanceData, k_max: int) -> TruncatedOperator:
    """P₀ = Σ_j U_j W_jᵀ / (W_j·U_j), projetor espectral exato de 𝓛₀ em iσ."""
    b = basis_vectors(res, k_max)
    m = np.zeros((2 * (2 * k_max + 1),) * 2, dtype=complex)
    for u, w in ((b.U1, b.W1), (b.U2, b.W2)):
        m += np.outer(u.entries, w.entries) / np.dot(w.entries, u.entries)
    return TruncatedOperator(k_max, m)


def projector(
    eps: float,
    delta: float,
    contour: ContourSpec,
    mode: Mode = "expanded3",
    k_max: int = 32,
    res: Optional[ResonanceData] = None,
) -> TruncatedOperator:
    """
    Projetor espectral P_{ε,δ} por quadratura em Γ.

    Parameters
    ----------
    eps, delta : float
    contour : ContourSpec
    mode : {"expanded3", "direct-beta"}
    k_max : int
    res : ResonanceData, optional
        Default: `solve_resonance()`.

    Returns
    -------
    TruncatedOperator

    Raises
    ------
    ContourCollisionError
        Menor valor singular de 𝓛 − λ abaixo de 1e-3 em algum ponto de sonda.
    QuadratureError
        Regra completa e sub-regra de nós pares diferem em mais de 1e-9.
    """
    res = res or solve_resonance()
    contour.check_against(res)
    lam = contour.points()
    w = contour.weights()

    if eps == 0 and delta == 0:
        # 1) ε = δ = 0: resolvente em blocos 2×2
        s11, s12, s21, s22 = resolvent_blocks(lam, res, k_max)
        nk = 2 * k_max + 1
        idx = np.arange(nk)
        inv = np.zeros((lam.size, 2 * nk, 2 * nk), dtype=complex)
        inv[:, idx, idx] = s11
        inv[:, idx, idx + nk] = s12
        inv[:, idx + nk, idx] = s21
        inv[:, idx + nk, idx + nk] = s22
    else:
        # 1) sonda de colisão e solução densa por nó
        L = assemble_L(eps, delta, res, k_max, mode).matrix
        smin = _contour_smin(L, contour)
        if smin < COLLISION_TOL:
            raise ContourCollisionError(
                f"autovalor de L a menos de {COLLISION_TOL} do contorno (σ_min={smin:.3e})"
            )
        eye = np.eye(L.shape[0], dtype=complex)
        shifted = L[None, :, :] - lam[:, None, None] * eye[None]
        inv = np.linalg.solve(shifted, np.broadcast_to(eye, shifted.shape))

    # 2) soma de trapézio com verificação pela sub-regra
    P, err = _even_rule(inv, w)
    if err > QUAD_TOL:
        raise QuadratureError(f"quadratura do projetor instável: variação {err:.3e}")
    log_stage(_log, "Projector", eps=eps, delta=delta, nodes=contour.nodes, quad_err=err)
    return TruncatedOperator(k_max, P)


def kato_transform(P: TruncatedOperator, P0: TruncatedOperator) -> TruncatedOperator:
    """
    𝓚 = (1 − X²)^{-1/2}[P·P₀ + (1−P)(1−P₀)], X = P − P₀.

    A raiz inversa usa a série binomial Σ c_n Yⁿ (Y = X², c_n = c_{n−1}(2n−1)/(2n)),
    truncada quando ‖Y‖^{n+1}/(1 − ‖Y‖) < 1e-14.

    Raises
    ------
    KatoNormError
        ‖P − P₀‖₂ ≥ 1.
    """
    if P.k_max != P0.k_max:
        raise DomainError("projetores com truncagens diferentes")
    X = P.matrix - P0.matrix
    nx = float(np.linalg.norm(X, 2))
    if nx >= 1.0:
        raise KatoNormError(f"‖P − P0‖ = {nx:.3e} >= 1")
    eye = np.eye(X.shape[0], dtype=complex)
    Y = X @ X
    ny = nx * nx

    acc, term, c, n = eye.copy(), eye.copy(), 1.0, 0
    while ny ** (n + 1) / (1.0 - ny) >= KATO_SERIES_TOL:
        n += 1
        c *= (2 * n - 1) / (2 * n)
        term = term @ Y
        acc += c * term

    core = P.matrix @ P0.matrix + (eye - P.matrix) @ (eye - P0.matrix)
    log_stage(_log, "Kato", norm_x=nx, terms=n, level=10)
    return TruncatedOperator(P.k_max, acc @ core)


def _reduced_from(hv1, hv2, v1, v2) -> np.ndarray:
    s = 1j / (4.0 * np.pi)
    return np.array(
        [
            [-s * pairing(hv1, v1), s * pairing(hv1, v2)],
            [-s * pairing(hv2, v1), s * pairing(hv2, v2)],
        ]
    )


def reduced_matrix_direct(
    eps: float,
    delta: float,
    contour: ContourSpec,
    mode: Mode = "expanded3",
    k_max: int = 32,
    res: Optional[ResonanceData] = None,
) -> np.ndarray:
    """
    L_{ε,δ} na base V_j^{ε,δ} = 𝓚V_j.

        L11 = −(i/4π)(𝓗V₁, V₁)   L12 = (i/4π)(𝓗V₁, V₂)
        L21 = −(i/4π)(𝓗V₂, V₁)   L22 = (i/4π)(𝓗V₂, V₂)

    Returns
    -------
    np.ndarray
        Matriz 2×2 complexa (puramente imaginária para ε, δ reais).
    """
    res = res or solve_resonance()
    P = projector(eps, delta, contour, mode, k_max, res)
    P0 = exact_projector(res, k_max)
    K = kato_transform(P, P0)
    H = assemble_H(eps, delta, res, k_max, mode)
    b = basis_vectors(res, k_max)
    v1, v2 = K.apply(b.V1), K.apply(b.V2)
    return _reduced_from(H.apply(v1), H.apply(v2), v1, v2)


# Rota perturbativa


def _multi_indices(max_order: int, include_zero: bool = False) -> List[Order]:
    """Multi-índices (m, n) por ordem total crescente, m decrescente."""
    start = 0 if include_zero else 1
    return [(m, t - m) for t in range(start, max_order + 1) for m in range(t, -1, -1)]


def _sub(a: Order, b: Order) -> Optional[Order]:
    m, n = a[0] - b[0], a[1] - b[1]
    return (m, n) if m >= 0 and n >= 0 else None


class PerturbativeEngine:
    """
    Expansão de Kato ordem a ordem em torno de (ε, δ) = (0, 0).

    Etapas
    ------
    1) Coeficientes de Taylor da resolvente:
           R_[0] = S_λ,  R_[a] = −S_λ Σ_{0<b≤a} J𝓗^b R_[a−b]
       aplicados a vetores nos nós de Γ; P_[a] = Σ w_n R_[a](λ_n).
    2) U^[a] = Q_aU + ½Σ Q_bQ_cU + ½Σ Q_bQ_cQ_dU (Q_a = P_[a], a ≠ 0).
    3) (𝓗V_j, V_k)_[a] = Σ_{b+c+d=a} (𝓗^b V_j^[c], V_k^[d]) e leitura de A, B, C.

    Parameters
    ----------
    res : ResonanceData
    k_max : int
    contour : ContourSpec, optional
        Default: `default_contour(res)`.
    """

    def __init__(
        self,
        res: ResonanceData,
        k_max: int = 32,
        contour: Optional[ContourSpec] = None,
    ) -> None:
        self.res = res
        self.k_max = int(k_max)
        self.contour = contour or default_contour(res)
        self.contour.check_against(res)
        self.basis = basis_vectors(res, self.k_max)

        self._H = order_table(res, self.k_max)
        jm = J_matrix(self.k_max).matrix
        self._LT = {b: (jm @ h).T for b, h in self._H.items() if b != (0, 0)}
        self._weights = self.contour.weights()
        self._blocks = resolvent_blocks(self.contour.points(), res, self.k_max)
        self._quad_err = 0.0
        self._lock = Lock()
        self._series_cache: Dict[int, Dict[Order, np.ndarray]] = {}
        self._eigvecs: Optional[Dict[Tuple[int, Order], ModeVector]] = None
        self._reduced: Optional[Dict[Order, np.ndarray]] = None

    # 1) projetor

    def _S(self, x: np.ndarray) -> np.ndarray:
        return apply_resolvent_blocks(self._blocks, x, self.k_max)

    def _projector_series(self, y: np.ndarray, max_order: int) -> Dict[Order, np.ndarray]:
        """P_[a]y para todo 0 < |a| ≤ max_order."""
        nodes = self.contour.nodes
        x: Dict[Order, np.ndarray] = {(0, 0): self._S(np.broadcast_to(y, (nodes, y.size)))}
        out: Dict[Order, np.ndarray] = {}
        worst = 0.0
        for a in _multi_indices(max_order):
            acc = np.zeros_like(x[(0, 0)])
            for b in _multi_indices(a[0] + a[1]):
                rest = _sub(a, b)
                if rest is not None:
                    acc = acc + x[rest] @ self._LT[b]
            x[a] = -self._S(acc)
            out[a], err = _even_rule(x[a], self._weights)
            worst = max(worst, err)
        with self._lock:
            self._quad_err = max(self._quad_err, worst)
        if worst > QUAD_TOL:
            raise QuadratureError(
                f"quadratura perturbativa instável: variação {worst:.3e}"
            )
        return out

    def _u(self, j: int) -> ModeVector:
        return self.basis.U1 if j == 1 else self.basis.U2

    def _series_of_u(self, j: int) -> Dict[Order, np.ndarray]:
        if j not in self._series_cache:
            self._series_cache[j] = self._projector_series(self._u(j).entries, MAX_ORDER)
        return self._series_cache[j]

    def pmn_corrections(self, m: int, n: int) -> Tuple[ModeVector, ModeVector]:
        """
        (P^{m,n}U₁, P^{m,n}U₂) com P^{m,n} = m!n!·P_[m,n].
        """
        if m < 0 or n < 0 or m + n > MAX_ORDER:
            raise DomainError(f"(m, n) fora de m + n <= 3: {(m, n)}")
        scale = factorial(m) * factorial(n)
        out = []
        for j in (1, 2):
            if (m, n) == (0, 0):
                out.append(self._u(j))
            else:
                out.append(ModeVector(self.k_max, scale * self._series_of_u(j)[(m, n)]))
        return out[0], out[1]

    # 2) autovetores

    def _eigvec_series(self, j: int) -> Dict[Order, np.ndarray]:
        u = self._u(j).entries
        q1 = self._series_of_u(j)
        q2 = {c: self._projector_series(q1[c], MAX_ORDER - sum(c)) for c in _multi_indices(2)}
        q3 = {
            (d, c): self._projector_series(q2[d][c], MAX_ORDER - sum(c) - sum(d))
            for d in _multi_indices(1)
            for c in _multi_indices(1)
        }

        series: Dict[Order, np.ndarray] = {(0, 0): u.copy()}
        for a in _multi_indices(MAX_ORDER):
            acc = q1[a].copy()
            for c, inner in q2.items():
                b = _sub(a, c)
                if b is not None and b in inner:
                    acc += 0.5 * inner[b]
            for (d, c), inner in q3.items():
                rest = _sub(a, d)
                b = _sub(rest, c) if rest is not None else None
                if b is not None and b in inner:
                    acc += 0.5 * inner[b]
            series[a] = acc
        return series

    def eigvec_corrections(self) -> Dict[Tuple[int, Order], ModeVector]:
        """Todos os U_j^{(m,n)}, m + n ≤ 3, indexados por (j, (m, n))."""
        if self._eigvecs is None:
            for j in (1, 2):
                self._series_of_u(j)
            results = ordered_map(self._eigvec_series, (1, 2))
            self._eigvecs = {
                (j, a): ModeVector(self.k_max, vec)
                for j, series in zip((1, 2), results)
                for a, vec in series.items()
            }
            log_stage(_log, "Eigvecs", k_max=self.k_max, quad_err=self._quad_err)
        return self._eigvecs

    def normalized_corrections(self) -> Dict[Tuple[int, Order], ModeVector]:
        """V_j^{(m,n)} = U_j^{(m,n)}/√γ_j."""
        g = {1: self.res.gamma1, 2: self.res.gamma2}
        return {
            (j, a): v.scale(1.0 / np.sqrt(g[j])) for (j, a), v in self.eigvec_corrections().items()
        }

    def supports(self, tol: float = 1e-10) -> Dict[Tuple[int, Order], Tuple[int, ...]]:
        """Suporte em número de onda de cada V_j^{(m,n)}."""
        return {key: v.support(tol) for key, v in self.normalized_corrections().items()}

    # 3) produtos internos e coeficientes

    def inner_products(self) -> Dict[Tuple[int, int], Dict[Order, complex]]:
        """(𝓗V_j, V_k)_[a] para j, k ∈ {1, 2} e |a| ≤ 3."""
        v = self.normalized_corrections()
        orders = _multi_indices(MAX_ORDER, include_zero=True)
        out: Dict[Tuple[int, int], Dict[Order, complex]] = {}
        for j in (1, 2):
            # 𝓗^b V_j^[c] reaproveitado para os dois k
            hv = {
                (b, c): self._H[b] @ v[(j, c)].entries
                for b in orders
                for c in orders
                if sum(b) + sum(c) <= MAX_ORDER
            }
            for k in (1, 2):
                coeffs: Dict[Order, complex] = {}
                for a in orders:
                    total = 0.0 + 0.0j
                    for (b, c), vec in hv.items():
                        rest = _sub(a, b)
                        d = _sub(rest, c) if rest is not None else None
                        if d is not None:
                            total += pairing(vec, v[(k, d)])
                    coeffs[a] = total
                out[(j, k)] = coeffs
        return out

    def reduced_series(self) -> Dict[Order, np.ndarray]:
        """Coeficientes de Taylor da matriz reduzida L_{ε,δ} (calculados uma vez)."""
        if self._reduced is not None:
            return self._reduced
        ip = self.inner_products()
        s = 1j / (4.0 * np.pi)
        self._reduced = {
            a: np.array(
                [
                    [-s * ip[(1, 1)][a], s * ip[(1, 2)][a]],
                    [-s * ip[(2, 1)][a], s * ip[(2, 2)][a]],
                ]
            )
            for a in _multi_indices(MAX_ORDER, include_zero=True)
        }
        return self._reduced

    def abc_series(self) -> Dict[str, Dict[Order, float]]:
        """Coeficientes de A, B, C por ordem (iσ removido da ordem zero)."""
        sigma = self.res.sigma
        out: Dict[str, Dict[Order, float]] = {"A": {}, "B": {}, "C": {}}
        for a, L in self.reduced_series().items():
            shift = sigma if a == (0, 0) else 0.0
            out["A"][a] = float((L[0, 0] / 1j).real) - shift
            out["B"][a] = float((L[0, 1] / 1j).real)
            out["C"][a] = float((L[1, 1] / 1j).real) - shift
        return out

    def extract_coeff_table(self) -> CoeffTable:
        """
        Lê os onze coeficientes sobreviventes e verifica o padrão de anulação.

        Raises
        ------
        ConsistencyError
            Algum coeficiente proibido acima de 1e-8.
        """
        abc = self.abc_series()
        forbidden = [abs(abc[name][o]) for name in ("A", "C") for o in FORBIDDEN_AC]
        forbidden += [abs(abc["B"][o]) for o in FORBIDDEN_B]
        worst = max(forbidden)
        log_stage(_log, "Coeffs", k_max=self.k_max, nodes=self.contour.nodes, forbidden_max=worst)
        if worst > FORBIDDEN_TOL:
            raise ConsistencyError(
                f"coeficiente proibido pela estrutura reversível acima da tolerância: {worst:.3e}"
            )
        A, B, C = abc["A"], abc["B"], abc["C"]
        return CoeffTable(
            a01=A[(0, 1)], a20=A[(2, 0)], a02=A[(0, 2)], a21=A[(2, 1)], a03=A[(0, 3)],
            b30=B[(3, 0)],
            c01=C[(0, 1)], c20=C[(2, 0)], c02=C[(0, 2)], c21=C[(2, 1)], c03=C[(0, 3)],
            forbidden_max=worst,
        )


def reduced_matrix(eps: float, delta: float, engine: PerturbativeEngine) -> np.ndarray:
    """Soma Σ εᵐδⁿ L_[m,n] da série perturbativa."""
    return sum(
        (eps ** a[0] * delta ** a[1] * L for a, L in engine.reduced_series().items()),
        np.zeros((2, 2), dtype=complex),
    )


def _engine(engine: Optional[PerturbativeEngine]) -> PerturbativeEngine:
    return engine or PerturbativeEngine(solve_resonance())


def pmn_corrections(
    m: int, n: int, engine: Optional[PerturbativeEngine] = None
) -> Tuple[ModeVector, ModeVector]:
    return _engine(engine).pmn_corrections(m, n)


def eigvec_corrections(
    engine: Optional[PerturbativeEngine] = None,
) -> Dict[Tuple[int, Order], ModeVector]:
    return _engine(engine).eigvec_corrections()


def extract_coeff_table(engine: Optional[PerturbativeEngine] = None) -> CoeffTable:
    return _engine(engine).extract_coeff_table()

