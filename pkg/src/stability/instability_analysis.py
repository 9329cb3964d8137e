"""
Discriminante, autovalores instáveis, janela κ₀/κ₁, elipse assintótica e o
certificado exato de b₃,₀ ≠ 0.

Objetivos
---------
- A, B, C truncados a partir da `CoeffTable`; Δ = −(A − C)² + 4B².
- λ± = i(σ + ½(A + C)) ± ½√Δ (√Δ imaginário quando Δ < 0).
- Parâmetros da isola: κ₀, κ₁, deriva do centro, semi-eixos.
- Amostragem θ ∈ (−κ₁, κ₁) com δ = κ₀ε² + θε³.
- `certify_b30`: Sturm + mdc em ℚ[ξ] + aritmética intervalar (mpmath) sobre
  os polinômios congelados em `data/b30_polys.json`.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, TypedDict

import numpy as np
from mpmath import iv

from src.stability.dispersion import solve_resonance
from src.stability.kato_engine import CoeffTable
from src.stability.ratpoly import RationalPoly
from src.utils.errors import CertificateError, DegenerateTableError, DomainError
from src.utils.logger import get_logger, log_stage

_log = get_logger(__name__)

__all__ = [
    "IsolaParams",
    "IsolaPoint",
    "CertificateReport",
    "abc_values",
    "discriminant",
    "eigenvalues",
    "char_poly_coeffs",
    "isola_params",
    "theta_grid",
    "isola_points",
    "asymptotic_eigenvalue",
    "max_growth_rate",
    "ellipse_constants",
    "ellipse_distance",
    "certify_b30",
    "b30_closed_form",
]

DATA_FILE = Path(__file__).resolve().parent / "data" / "b30_polys.json"
DEGENERATE_TOL = 1e-6
EPS_MAX = 0.1
BISECTION_STEPS = 80


@dataclass(frozen=True)
class IsolaParams:
    """
    Campos
    ------
    kappa0 : float
        −(a20 − c20)/(a01 − c01).
    kappa1 : float
        2|b30|/|a01 − c01| (semi-largura da janela em θ).
    center_drift : float
        Coeficiente de ε² no centro: (a01·c20 − a20·c01)/(a01 − c01).
    semi_major : float
        Coeficiente de ε³ na direção imaginária: |b30(a01+c01)/(a01−c01)|.
    semi_minor : float
        Coeficiente de ε³ na direção real: |b30|.
    """

    kappa0: float
    kappa1: float
    center_drift: float
    semi_major: float
    semi_minor: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class IsolaPoint:
    theta: float
    delta: float
    lam_plus: complex
    lam_minus: complex


class CertificateReport(TypedDict):
    checksum_ok: bool
    m_at_1: str
    m_at_2: str
    sturm_roots_in_1_2: int
    gcd_degree: int
    gamma1_bracket: Tuple[float, float]
    r_factors_positive: bool
    b30_numeric: float
    verdict: str


# A, B, C e discriminante


def abc_values(eps: float, delta: float, table: CoeffTable) -> Tuple[float, float, float]:
    """A, B, C pelas expansões truncadas (a40, c40 omitidos)."""
    e2 = eps * eps
    d2, d3 = delta**2, delta**3
    A = table.a01 * delta + table.a20 * e2 + table.a02 * d2 + table.a21 * e2 * delta + table.a03 * d3
    B = table.b30 * eps**3
    C = table.c01 * delta + table.c20 * e2 + table.c02 * d2 + table.c21 * e2 * delta + table.c03 * d3
    return A, B, C


def discriminant(eps: float, delta: float, table: CoeffTable) -> float:
    """Δ(ε, δ) = −(A − C)² + 4B²."""
    A, B, C = abc_values(eps, delta, table)
    return -((A - C) ** 2) + 4.0 * B * B


def eigenvalues(
    eps: float, delta: float, table: CoeffTable, sigma: Optional[float] = None
) -> Tuple[complex, complex]:
    """
    (λ₊, λ₋) = i(σ + ½(A + C)) ± ½√Δ.

    Para Δ ≥ 0 usa a raiz real; para Δ < 0, +i√(−Δ).
    """
    sigma = solve_resonance().sigma if sigma is None else sigma
    A, _, C = abc_values(eps, delta, table)
    d = discriminant(eps, delta, table)
    root = complex(np.sqrt(d)) if d >= 0 else 1j * np.sqrt(-d)
    center = 1j * (sigma + 0.5 * (A + C))
    return center + 0.5 * root, center - 0.5 * root


def char_poly_coeffs(eps: float, delta: float, table: CoeffTable) -> Tuple[complex, float]:
    """
    Coeficientes (c₁, c₀) de λ² + c₁λ + c₀ = det(L − iσ − λ):
    c₁ = −i(A + C), c₀ = −AC − B².
    """
    A, B, C = abc_values(eps, delta, table)
    return -1j * (A + C), -A * C - B * B


# Isola


def isola_params(table: CoeffTable) -> IsolaParams:
    """
    Raises
    ------
    DegenerateTableError
        |a01 − c01| < 1e-6 ou b30 = 0.
    """
    diff = table.a01 - table.c01
    if abs(diff) < DEGENERATE_TOL:
        raise DegenerateTableError(f"tabela degenerada: |a01 − c01| = {abs(diff):.3e}")
    if table.b30 == 0:
        raise DegenerateTableError("tabela degenerada: b30 = 0")
    return IsolaParams(
        kappa0=-(table.a20 - table.c20) / diff,
        kappa1=2.0 * abs(table.b30) / abs(diff),
        center_drift=(table.a01 * table.c20 - table.a20 * table.c01) / diff,
        semi_major=abs(table.b30 * (table.a01 + table.c01) / diff),
        semi_minor=abs(table.b30),
    )


def theta_grid(kappa1: float, n: int) -> np.ndarray:
    """θ_i = −κ₁ + (i+1)·2κ₁/(n+1), i = 0…n−1 (intervalo aberto)."""
    if n < 1:
        raise DomainError("n_theta deve ser >= 1")
    return -kappa1 + (np.arange(n) + 1) * 2.0 * kappa1 / (n + 1)


def _check_eps(eps: float) -> None:
    if not 0 < eps <= EPS_MAX:
        raise DomainError(f"eps deve estar em (0, {EPS_MAX}] (recebido {eps})")


def isola_points(
    eps: float, table: CoeffTable, n_theta: int, sigma: Optional[float] = None
) -> List[IsolaPoint]:
    """Pares (λ₊, λ₋) ao longo de δ = κ₀ε² + θε³, θ em (−κ₁, κ₁)."""
    _check_eps(eps)
    params = isola_params(table)
    sigma = solve_resonance().sigma if sigma is None else sigma
    out = []
    for theta in theta_grid(params.kappa1, n_theta):
        delta = params.kappa0 * eps**2 + theta * eps**3
        lp, lm = eigenvalues(eps, delta, table, sigma)
        out.append(IsolaPoint(float(theta), float(delta), lp, lm))
    return out


def asymptotic_eigenvalue(
    eps: float, theta: float, table: CoeffTable, sigma: Optional[float] = None
) -> complex:
    """
    λ₊ até O(ε³):
        iσ + i·drift·ε² + iε³·½(a01 + c01)θ + ε³√(b30² − ¼(a01 − c01)²θ²)
    """
    sigma = solve_resonance().sigma if sigma is None else sigma
    params = isola_params(table)
    rad = table.b30**2 - 0.25 * (table.a01 - table.c01) ** 2 * theta**2
    root = np.sqrt(rad) if rad >= 0 else 1j * np.sqrt(-rad)
    return (
        1j * sigma
        + 1j * params.center_drift * eps**2
        + 1j * eps**3 * 0.5 * (table.a01 + table.c01) * theta
        + eps**3 * root
    )


def max_growth_rate(eps: float, table: CoeffTable) -> float:
    """Maior parte real assintótica, atingida em θ = 0: |b30|ε³."""
    return abs(table.b30) * eps**3


def ellipse_constants(params: IsolaParams, sigma: float) -> Dict[str, float]:
    """
    Constantes de x_coeff·X² + y_coeff·Y² = 1, com X = Re λ/ε³ e
    Y = (Im λ − center − center_drift·ε²)/ε³.
    """
    return {
        "x_coeff": 1.0 / params.semi_minor**2,
        "y_coeff": 1.0 / params.semi_major**2,
        "center": sigma,
        "center_drift": params.center_drift,
    }


def ellipse_distance(lam: complex, eps: float, params: IsolaParams, sigma: float) -> float:
    """
    Distância aproximada (primeira ordem) de λ à elipse de ordem ε³.
    """
    x = lam.real / eps**3
    y = (lam.imag - sigma - params.center_drift * eps**2) / eps**3
    f = x * x / params.semi_minor**2 + y * y / params.semi_major**2 - 1.0
    grad = np.hypot(2 * x / params.semi_minor**2, 2 * y / params.semi_major**2)
    return float(eps**3 * abs(f) / grad) if grad > 0 else float("inf")


# Certificado b30 ≠ 0


def _load_polys() -> Tuple[Dict[str, List[int]], bool]:
    data = json.loads(DATA_FILE.read_text(encoding="utf-8"))
    payload = {k: data[k] for k in ("m", "p", "q")}
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    ).hexdigest()
    return payload, digest == data.get("sha256")


def b30_closed_form(gamma: float, p: RationalPoly, q: RationalPoly) -> float:
    """
    b30 = −(1 + γ²)(p(γ) + q(γ)√(γ⁴ − 1))/r(γ), com

        r = 64·√(−(γ−3)γ)·((γ−3)γ+5)·((γ−3)γ+6)·(√(γ⁴−1)+(γ−6)γ+11)
            ·(γ(√(γ⁴−1)+(γ−1)γ+1) − 1)²
    """
    g = float(gamma)
    s = np.sqrt(g**4 - 1.0)
    pv = float(np.polyval([float(c) for c in reversed(p.coeffs)], g))
    qv = float(np.polyval([float(c) for c in reversed(q.coeffs)], g))
    r = (
        64.0
        * np.sqrt(-(g - 3.0) * g)
        * ((g - 3.0) * g + 5.0)
        * ((g - 3.0) * g + 6.0)
        * (s + (g - 6.0) * g + 11.0)
        * (g * (s + (g - 1.0) * g + 1.0) - 1.0) ** 2
    )
    return float(-(1.0 + g * g) * (pv + qv * s) / r)


def _interval(lo: Fraction, hi: Fraction):
    # envoltório de [lo, hi] só com operações intervalares
    a = iv.mpf(lo.numerator) / lo.denominator
    width = (iv.mpf(hi.numerator) / hi.denominator) - a
    return a + width * iv.mpf([0, 1])


def _r_factors_positive(lo: Fraction, hi: Fraction) -> bool:
    g = _interval(lo, hi)
    s = iv.sqrt(g**4 - 1)
    positive = [
        -(g - 3) * g,
        (g - 3) * g + 5,
        (g - 3) * g + 6,
        s + (g - 6) * g + 11,
    ]
    squared_base = g * (s + (g - 1) * g + 1) - 1
    return all(f.a > 0 for f in positive) and (squared_base.a > 0 or squared_base.b < 0)


def certify_b30() -> CertificateReport:
    """
    Certifica b₃,₀ ≠ 0 em aritmética exata.

    Etapas
    ------
    1) Checksum dos coeficientes congelados.
    2) m(1) < 0 < m(2) e exatamente uma raiz real em [1, 2] (Sturm).
    3) g = p² − q²(ξ⁴ − 1); mdc(g, m) = 1 em ℚ[ξ] ⇒ g(γ₁) ≠ 0.
    4) Positividade dos fatores de r(γ₁) por intervalos, refinando o
       colchete de γ₁ por bisseção exata em m.
    5) Conferência numérica da forma fechada.

    Raises
    ------
    CertificateError
        Qualquer etapa falha.
    """
    # 1) dados
    polys, checksum_ok = _load_polys()
    if not checksum_ok:
        raise CertificateError("checksum dos polinômios de b30 não confere")
    m = RationalPoly.from_ints(polys["m"])
    p = RationalPoly.from_ints(polys["p"])
    q = RationalPoly.from_ints(polys["q"])

    # 2) raiz isolada
    one, two = Fraction(1), Fraction(2)
    m1, m2 = m(one), m(two)
    if not (m1 < 0 < m2):
        raise CertificateError(f"m não troca de sinal em (1, 2): m(1)={m1}, m(2)={m2}")
    roots = m.count_roots(one, two)
    if roots != 1:
        raise CertificateError(f"m tem {roots} raízes em [1, 2], esperado 1")

    # 3) mdc exato
    xi = RationalPoly.x()
    g = p * p - q * q * (xi**4 - RationalPoly.constant(1))
    common = g.gcd(m)
    if common.degree != 0:
        raise CertificateError(f"mdc(g, m) tem grau {common.degree}: b30 pode anular-se")

    # 4) colchete e intervalos
    lo, hi = one, two
    positive = _r_factors_positive(lo, hi)
    steps = 0
    while not positive and steps < BISECTION_STEPS:
        mid = (lo + hi) / 2
        if m(mid) < 0:
            lo = mid
        else:
            hi = mid
        positive = _r_factors_positive(lo, hi)
        steps += 1
    if not positive:
        raise CertificateError("não foi possível isolar o sinal dos fatores de r(γ1)")

    # 5) conferência numérica
    gamma1 = solve_resonance().gamma1
    if not float(lo) <= gamma1 <= float(hi):
        raise CertificateError("γ1 numérico fora do colchete exato")
    value = b30_closed_form(gamma1, p, q)

    report = CertificateReport(
        checksum_ok=checksum_ok,
        m_at_1=str(m1),
        m_at_2=str(m2),
        sturm_roots_in_1_2=roots,
        gcd_degree=common.degree,
        gamma1_bracket=(float(lo), float(hi)),
        r_factors_positive=positive,
        b30_numeric=value,
        verdict="gcd=1; b30 nonzero",
    )
    log_stage(_log, "Certificate", gcd_degree=common.degree, bisections=steps, b30=value)
    return report
