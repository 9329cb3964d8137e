"""
Operador Dirichlet–Neumann achatado: hierarquia de EDOs, formas fechadas e
derivadas em β.

Objetivos
---------
- `ExpSum`: perfis verticais Σ aᵢ e^{μᵢ z} em z ≤ 0 (amplitudes/taxas podem
  ser arrays, um valor por nó de β).
- `solve_decaying_ode`: P″ − κ²P = Σ a e^{μz}, decaimento em −∞, P(0) fixado.
- `hierarchy_multipliers`: resolve ΔΘʲ − βΘʲ = β Σ_{i≤j} 𝒥ᵢ Θ^{j−i} por modo de
  entrada e lê R_j f = ∂zΘʲ(·, 0) por deslocamento de número de onda.
- Formas fechadas C^±, A^±, B^{−,0,+}, D^{±3}.
- `beta_derivatives`: R_{j,ℓ} = (1/ℓ!) ∂_β^ℓ R_j por quadratura de Cauchy no
  plano β complexo, com duplicação de nós (tenacity) até estabilizar.

Convenção de deslocamento
-------------------------
`MultiplierTable.offsets[d][k]` multiplica f̂(k + d) no modo de saída k, ou seja
d = (entrada − saída). C⁻ ↔ d = −1, B⁻ ↔ d = −2, D^{−3} ↔ d = −3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Any, Dict, List, Literal, Mapping, Tuple

import numpy as np
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from src.stability.dispersion import omega
from src.utils.errors import DomainError, QuadratureError, ResonantForcingError
from src.utils.logger import get_logger, log_stage

_log = get_logger(__name__)

__all__ = [
    "ExpSum",
    "MultiplierTable",
    "JACOBIAN_TERMS",
    "ALLOWED_OFFSETS",
    "solve_decaying_ode",
    "hierarchy_multipliers",
    "closed_form_A",
    "closed_form_C",
    "closed_form_B",
    "closed_form_B0_aform",
    "closed_form_D3",
    "beta_derivatives",
    "beta_derivative_tables",
    "finite_difference_derivative",
]

Sign = Literal["+", "-"]

RATE_TOL = 1e-9
RESONANCE_TOL = 1e-14
CAUCHY_NODES = 32
# relativa a max|a·h^{−ℓ}| nos nós
CAUCHY_TOL = 1e-10
CAUCHY_MAX_ATTEMPTS = 5
MAX_ORDER = 3

# Série do jacobiano por ordem: (coeficiente, deslocamento em k, taxa em z)
#   𝒥₁ = 2e^z cos x
#   𝒥₂ = e^{2z}(1 + 4cos 2x)
#   𝒥₃ = e^{3z}(9cos 3x + 4cos x) − 2e^z cos x
JACOBIAN_TERMS: Mapping[int, Tuple[Tuple[float, int, int], ...]] = MappingProxyType(
    {
        1: ((1.0, 1, 1), (1.0, -1, 1)),
        2: ((1.0, 0, 2), (2.0, 2, 2), (2.0, -2, 2)),
        3: (
            (4.5, 3, 3),
            (4.5, -3, 3),
            (2.0, 1, 3),
            (2.0, -1, 3),
            (-1.0, 1, 1),
            (-1.0, -1, 1),
        ),
    }
)

ALLOWED_OFFSETS: Mapping[int, Tuple[int, ...]] = MappingProxyType(
    {0: (0,), 1: (-1, 1), 2: (-2, 0, 2), 3: (-3, -1, 1, 3)}
)


# Perfis verticais


@dataclass(frozen=True)
class ExpSum:
    """
    Soma de exponenciais Σ aᵢ e^{μᵢ z} com Re μᵢ > 0 (decai em z → −∞).

    Taxas que coincidem até RATE_TOL (em todos os nós) são fundidas somando
    amplitudes.
    """

    terms: Tuple[Tuple[Any, Any], ...] = ()

    def __post_init__(self) -> None:
        merged: List[List[Any]] = []
        for amp, rate in self.terms:
            if np.any(np.real(rate) <= 0):
                raise DomainError("taxas de ExpSum devem ter parte real positiva")
            for item in merged:
                if np.all(np.abs(item[1] - rate) < RATE_TOL):
                    item[0] = item[0] + amp
                    break
            else:
                merged.append([amp, rate])
        object.__setattr__(self, "terms", tuple((a, r) for a, r in merged))

    @classmethod
    def single(cls, rate: Any, amp: Any = 1.0) -> "ExpSum":
        return cls(((amp, rate),))

    def __add__(self, other: "ExpSum") -> "ExpSum":
        return ExpSum(self.terms + other.terms)

    def scale(self, s: Any) -> "ExpSum":
        return ExpSum(tuple((s * a, r) for a, r in self.terms))

    def times_exp(self, mu: Any) -> "ExpSum":
        """Multiplica por e^{μz}."""
        return ExpSum(tuple((a, r + mu) for a, r in self.terms))

    def __call__(self, z: float) -> Any:
        return sum((a * np.exp(r * z) for a, r in self.terms), 0.0)

    def value_at_zero(self) -> Any:
        return sum((a for a, _ in self.terms), 0.0)

    def derivative_at_zero(self) -> Any:
        return sum((a * r for a, r in self.terms), 0.0)

    def rates(self) -> Tuple[Any, ...]:
        return tuple(r for _, r in self.terms)


def solve_decaying_ode(
    kappa2: Any,
    forcing: ExpSum,
    boundary_zero: bool = True,
    boundary_value: Any = 0.0,
) -> ExpSum:
    """
    Resolve P″ − κ²P = forcing com decaimento em −∞.

    Parameters
    ----------
    kappa2 : float | complex | np.ndarray
        κ² (parte real positiva).
    forcing : ExpSum
        Lado direito Σ a e^{μz}.
    boundary_zero : bool
        Se True, impõe P(0) = boundary_value somando c·e^{κz}; se False,
        devolve só a solução particular Σ a/(μ² − κ²) e^{μz}.
    boundary_value : float | complex
        Traço em z = 0 (0 na hierarquia; 1 reproduz e^{κz}).

    Returns
    -------
    ExpSum

    Raises
    ------
    ResonantForcingError
        Alguma taxa satisfaz μ² = κ².
    """
    k2 = np.asarray(kappa2)
    if np.any(np.real(k2) <= 0):
        raise DomainError("kappa2 deve ter parte real positiva")
    kappa = np.sqrt(k2 if np.iscomplexobj(k2) else k2.astype(float))
    scale = np.maximum(1.0, np.abs(kappa))

    # só μ = κ é degenerado; com β pequeno μ − κ = O(β) e a amplitude também
    terms = []
    for amp, mu in forcing.terms:
        gap = mu - kappa
        if np.any(np.abs(gap) < RESONANCE_TOL * scale):
            raise ResonantForcingError(f"forçamento ressonante: taxa {mu!r} com κ²={kappa2!r}")
        terms.append((amp / (gap * (mu + kappa)), mu))
    particular = ExpSum(tuple(terms))
    if not boundary_zero:
        return particular
    correction = boundary_value - particular.value_at_zero()
    return ExpSum(particular.terms + ((correction, kappa),))


# Tabelas de multiplicadores


@dataclass(frozen=True)
class MultiplierTable:
    """
    Ação de R_j (ou R_{j,ℓ}) como banda de coeficientes por deslocamento.

    Campos
    ------
    order : int
        j ∈ {0, 1, 2, 3}.
    beta : float
        β onde a tabela foi avaliada (β₀ para derivadas).
    k_min, k_max : int
        Faixa de números de onda de saída (inclusiva).
    offsets : Mapping[int, np.ndarray]
        d → coeficientes para k = k_min…k_max.
    ell : int
        Ordem da derivada em β (0 = o próprio R_j).
    """

    order: int
    beta: float
    k_min: int
    k_max: int
    offsets: Mapping[int, np.ndarray] = field(default_factory=dict)
    ell: int = 0

    def __post_init__(self) -> None:
        allowed = set(ALLOWED_OFFSETS.get(self.order, ()))
        extra = set(self.offsets) - allowed
        if extra:
            raise DomainError(f"deslocamentos {sorted(extra)} inválidos para R_{self.order}")
        n = self.k_max - self.k_min + 1
        frozen = {}
        for d, arr in self.offsets.items():
            a = np.array(arr, dtype=float, copy=True)
            if a.shape != (n,):
                raise DomainError("coeficientes com tamanho incompatível com a faixa de k")
            a.setflags(write=False)
            frozen[int(d)] = a
        object.__setattr__(self, "offsets", MappingProxyType(dict(sorted(frozen.items()))))

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    def coeff(self, d: int, k) -> Any:
        """Coeficiente do deslocamento d no modo de saída k (0 fora da banda)."""
        if d not in self.offsets:
            return np.zeros_like(np.asarray(k), dtype=float)[()]
        idx = np.asarray(k) - self.k_min
        if np.any(idx < 0) or np.any(idx > self.k_max - self.k_min):
            raise DomainError(f"k fora da faixa da tabela [{self.k_min}, {self.k_max}]")
        return self.offsets[d][idx]

    def matrix(self, k_max: int) -> np.ndarray:
        """
        Matriz (2K+1)×(2K+1) com G[k, k+d] = coeff_d(k), |k|, |k+d| ≤ K.
        """
        if self.k_min > -k_max or self.k_max < k_max:
            raise DomainError("tabela não cobre a truncagem pedida")
        n = 2 * k_max + 1
        out = np.zeros((n, n))
        ks = np.arange(-k_max, k_max + 1)
        for d, arr in self.offsets.items():
            vals = arr[ks - self.k_min]
            rows = ks + k_max
            cols = rows + d
            ok = (cols >= 0) & (cols < n)
            out[rows[ok], cols[ok]] = vals[ok]
        return out


def _normalize_range(k_range: Any) -> Tuple[int, int]:
    if isinstance(k_range, range):
        return int(k_range.start), int(k_range.stop - 1)
    lo, hi = k_range
    if hi < lo:
        raise DomainError(f"faixa de k vazia: {k_range!r}")
    return int(lo), int(hi)


def _hierarchy_column(m: int, beta: np.ndarray) -> Dict[int, Dict[int, ExpSum]]:
    """Θʲ(k, ·) para entrada e^{imx}, j = 0…3 (β vetorizado por nó)."""
    theta: Dict[int, Dict[int, ExpSum]] = {0: {m: ExpSum.single(omega(m, beta))}}
    for j in range(1, MAX_ORDER + 1):
        forcing: Dict[int, List[Tuple[Any, Any]]] = {}
        for i in range(1, j + 1):
            for coef, shift, rate in JACOBIAN_TERMS[i]:
                for k_src, prof in theta[j - i].items():
                    bucket = forcing.setdefault(k_src + shift, [])
                    for amp, mu in prof.terms:
                        bucket.append((beta * coef * amp, mu + rate))
        theta[j] = {
            k: solve_decaying_ode(k * k + beta, ExpSum(tuple(terms)))
            for k, terms in sorted(forcing.items())
        }
    return theta


def _hierarchy_arrays(
    beta: np.ndarray, k_lo: int, k_hi: int
) -> Dict[int, Dict[int, np.ndarray]]:
    """Coeficientes [j][d] com shape (len(beta), k_hi − k_lo + 1)."""
    nk = k_hi - k_lo + 1
    dtype = complex if np.iscomplexobj(beta) else float
    out = {
        j: {d: np.zeros((beta.size, nk), dtype=dtype) for d in ALLOWED_OFFSETS[j]}
        for j in range(MAX_ORDER + 1)
    }
    for m in range(k_lo - MAX_ORDER, k_hi + MAX_ORDER + 1):
        column = _hierarchy_column(m, beta)
        for j, layer in column.items():
            for k, prof in layer.items():
                if k_lo <= k <= k_hi:
                    out[j][m - k][:, k - k_lo] = prof.derivative_at_zero()
    return out


def hierarchy_multipliers(beta: float, k_range: Any) -> List[MultiplierTable]:
    """
    Tabelas de R_0…R_3 pela hierarquia de EDOs.

    Parameters
    ----------
    beta : float
        β > 0.
    k_range : tuple[int, int] | range
        Faixa inclusiva de números de onda de saída.

    Returns
    -------
    list[MultiplierTable]
        Índice j = ordem.
    """
    if beta <= 0:
        raise DomainError(f"beta deve ser > 0 (recebido {beta})")
    k_lo, k_hi = _normalize_range(k_range)
    arrs = _hierarchy_arrays(np.array([float(beta)]), k_lo, k_hi)
    tables = [
        MultiplierTable(
            order=j,
            beta=float(beta),
            k_min=k_lo,
            k_max=k_hi,
            offsets={d: a[0] for d, a in arrs[j].items()},
        )
        for j in range(MAX_ORDER + 1)
    ]
    log_stage(_log, "Hierarchy", beta=float(beta), k_min=k_lo, k_max=k_hi, level=10)
    return tables


# Formas fechadas


def _shift(sign: Sign) -> int:
    if sign not in ("+", "-"):
        raise DomainError(f"sinal inválido: {sign!r}")
    return 1 if sign == "+" else -1


def closed_form_A(k, beta, sign: Sign):
    """A^±_k = 1/((Ω(k±1) + Ω(k) + 1)(Ω(k±1) − Ω(k) + 1))."""
    s = _shift(sign)
    k = np.asarray(k)
    o1, o0 = omega(k + s, beta), omega(k, beta)
    return 1.0 / ((o1 + o0 + 1.0) * (o1 - o0 + 1.0))


def closed_form_C(k, beta, sign: Sign):
    """C^±_k = β/(Ω(k±1) + Ω(k) + 1)."""
    s = _shift(sign)
    k = np.asarray(k)
    return beta / (omega(k + s, beta) + omega(k, beta) + 1.0)


def closed_form_B(k, beta, which: Literal["-", "0", "+"]):
    """
    Formas só em Ω de B^−_k, B^0_k, B^+_k (deslocamentos −2, 0, +2).
    """
    k = np.asarray(k)
    if which == "0":
        o_m, o0, o_p = omega(k - 1, beta), omega(k, beta), omega(k + 1, beta)
        inner = -1.0 / (o0 + o_p + 1.0) ** 2 - 1.0 / (o_m + o0 + 1.0) ** 2
        return beta * (beta * inner + 1.0) / (2.0 * (o0 + 1.0))
    s = _shift(which)  # type: ignore[arg-type]
    o0, o1, o2 = omega(k, beta), omega(k + s, beta), omega(k + 2 * s, beta)
    return beta * (2.0 - beta / ((o2 + o1 + 1.0) * (o1 + o0 + 1.0))) / (o2 + o0 + 2.0)


def closed_form_B0_aform(k, beta):
    """B^0_k escrito com os coeficientes A^±."""
    k = np.asarray(k)
    o_m, o0, o_p = omega(k - 1, beta), omega(k, beta), omega(k + 1, beta)
    ap_prev = closed_form_A(k - 1, beta, "+")
    am_next = closed_form_A(k + 1, beta, "-")
    am_k = closed_form_A(k, beta, "-")
    ap_k = closed_form_A(k, beta, "+")
    return beta * (
        (beta * (ap_prev + am_next) + 1.0) / (2.0 * (o0 + 1.0))
        - beta * (o_m + 1.0 - o0) * ap_prev * am_k
        - beta * (o_p + 1.0 - o0) * am_next * ap_k
    )


def _d3(o0, o1, o2, o3, beta):
    # o_n = Ω(k ∓ n); a mesma função racional serve para os dois sinais
    num = (
        2.0 * beta**2 * (o3 + o2 + o1 + o0 + 4.0)
        - 4.0
        * beta
        * (o2 + o1 + 1.0)
        * (
            o2**2
            + (o0 + 3.0) * o2
            + 3.0 * o0
            + o1 * (o1 + o0 + 3.0)
            + o3 * (o2 + o1 + 2.0 * o0 + 3.0)
            + 4.0
        )
        + 9.0
        * (o3 + o2 + 1.0)
        * (o3 + o1 + 2.0)
        * (o2 + o1 + 1.0)
        * (o2 + o0 + 2.0)
        * (o1 + o0 + 1.0)
    )
    den = (
        2.0
        * (o3 + o2 + 1.0)
        * (o3 + o1 + 2.0)
        * (o2 + o1 + 1.0)
        * (o3 + o0 + 3.0)
        * (o2 + o0 + 2.0)
        * (o1 + o0 + 1.0)
    )
    return beta * num / den


def closed_form_D3(k, beta, sign: Sign):
    """
    D^{∓3}_k: função racional de Ω(k−3…k) (sinal "−") ou Ω(k…k+3) (sinal "+").
    """
    s = _shift(sign)
    k = np.asarray(k)
    o = [omega(k + s * n, beta) for n in range(4)]
    return _d3(o[0], o[1], o[2], o[3], beta)


# Derivadas em β (quadratura de Cauchy)


def _cauchy_once(
    beta0: float, k_lo: int, k_hi: int, nodes: int, radius: float
) -> Dict[Tuple[int, int], Dict[int, np.ndarray]]:
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    h = radius * np.exp(1j * theta)
    arrs = _hierarchy_arrays(beta0 + h, k_lo, k_hi)
    base = _hierarchy_arrays(np.array([beta0]), k_lo, k_hi)

    out: Dict[Tuple[int, int], Dict[int, np.ndarray]] = {}
    worst = 0.0
    for j in range(MAX_ORDER + 1):
        out[(j, 0)] = {d: a[0] for d, a in base[j].items()}
        for ell in range(1, MAX_ORDER + 1):
            w = (h ** (-ell))[:, None]
            coeffs: Dict[int, np.ndarray] = {}
            for d, a in arrs[j].items():
                aw = a * w
                full = np.mean(aw, axis=0)
                half = np.mean(aw[::2], axis=0)
                scale = max(1.0, float(np.max(np.abs(aw), initial=0.0)))
                diff = float(np.max(np.abs(full - half), initial=0.0))
                worst = max(worst, diff / scale)
                coeffs[d] = np.real(full)
            out[(j, ell)] = coeffs
    if worst > CAUCHY_TOL:
        raise QuadratureError(
            f"quadratura de Cauchy instável com {nodes} nós: variação {worst:.3e}"
        )
    log_stage(_log, "Cauchy", beta0=beta0, nodes=nodes, radius=radius, quad_err=worst)
    return out


@lru_cache(maxsize=8)
def _cauchy_cached(
    beta0: float, k_lo: int, k_hi: int, nodes: int
) -> Dict[Tuple[int, int], MultiplierTable]:
    radius = beta0 / 10.0
    result = None
    for attempt in Retrying(
        stop=stop_after_attempt(CAUCHY_MAX_ATTEMPTS),
        retry=retry_if_exception_type(QuadratureError),
        reraise=True,
    ):
        with attempt:
            n = nodes * 2 ** (attempt.retry_state.attempt_number - 1)
            result = _cauchy_once(beta0, k_lo, k_hi, n, radius)
    assert result is not None
    return {
        (j, ell): MultiplierTable(
            order=j, beta=beta0, k_min=k_lo, k_max=k_hi, offsets=coeffs, ell=ell
        )
        for (j, ell), coeffs in result.items()
    }


def beta_derivative_tables(
    beta0: float, k_range: Any, nodes: int = CAUCHY_NODES
) -> Mapping[Tuple[int, int], MultiplierTable]:
    """
    Todas as tabelas R_{j,ℓ}, j, ℓ ∈ {0…3}, num único passe de quadratura.

    Parameters
    ----------
    beta0 : float
        Ponto de expansão (> 0).
    k_range : tuple[int, int] | range
    nodes : int
        Nós iniciais no círculo |β − β₀| = β₀/10 (dobrados se instável).

    Returns
    -------
    Mapping[(j, ell), MultiplierTable]
    """
    if beta0 <= 0:
        raise DomainError(f"beta0 deve ser > 0 (recebido {beta0})")
    k_lo, k_hi = _normalize_range(k_range)
    return MappingProxyType(_cauchy_cached(float(beta0), k_lo, k_hi, int(nodes)))


def beta_derivatives(
    j: int, ell: int, beta0: float, k_range: Any, nodes: int = CAUCHY_NODES
) -> MultiplierTable:
    """
    R_{j,ℓ} = (1/ℓ!) dℓ/dβℓ R_j em β₀.

    Raises
    ------
    QuadratureError
        Instável mesmo após duplicar os nós CAUCHY_MAX_ATTEMPTS vezes.
    """
    if j not in ALLOWED_OFFSETS or not (0 <= ell <= MAX_ORDER):
        raise DomainError(f"par (j, ell) fora de {{0..3}}²: {(j, ell)}")
    return beta_derivative_tables(beta0, k_range, nodes)[(j, ell)]


def finite_difference_derivative(
    fn, beta0: float, ell: int, h: float = 1e-2, levels: int = 4
) -> Any:
    """
    Derivada de Taylor (1/ℓ!) f^{(ℓ)}(β₀) por diferenças centrais com
    extrapolação de Richardson (ℓ ∈ {1, 2}).
    """
    if ell not in (1, 2):
        raise DomainError("diferenças finitas implementadas só para ell ∈ {1, 2}")

    def central(step: float) -> Any:
        if ell == 1:
            return (fn(beta0 + step) - fn(beta0 - step)) / (2.0 * step)
        return (fn(beta0 + step) - 2.0 * fn(beta0) + fn(beta0 - step)) / (2.0 * step * step)

    table: List[List[Any]] = []
    for i in range(levels):
        row = [central(h / 2**i)]
        for m in range(1, i + 1):
            factor = 4.0**m
            row.append((factor * row[m - 1] - table[i - 1][m - 1]) / (factor - 1.0))
        table.append(row)
    return table[-1][-1]
