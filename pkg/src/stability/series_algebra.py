"""
Álgebra graduada de séries sobre polinômios trigonométricos.

Objetivos
---------
- `TrigPoly`: polinômio trigonométrico finito Σ c_k e^{ikx} com coeficientes
  racionais gaussianos exatos (perfil "exact", via sympy) ou complexos em ponto
  flutuante (perfil "float"). Conversão só exato → float.
- `GradedSeries`: série em (ε, δ) com termos `TrigPoly` e corte de grau total.
- Operações: produto (convolução), multiplicadores de Fourier (|D|, ∂x, Ω(D),
  Hilbert), composição de Taylor com a deformação ζ e a reconstrução de p, q,
  (1+q)/ζ′ a partir das derivadas de forma do operador Dirichlet–Neumann.

Convenções
----------
- cos kx = (e^{ikx} + e^{−ikx})/2 ; sin kx = (e^{ikx} − e^{−ikx})/(2i).
- `compose_with_zeta` recebe a deformação como ζ − x (a identidade de ordem 0
  é implícita).

Uso
---
    from src.stability.series_algebra import reconstruct_pq
    p, q, qz = reconstruct_pq()          # exato
    p_f, q_f, qz_f = reconstruct_pq("float")
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from types import MappingProxyType
from typing import Any, Callable, Dict, Literal, Mapping, Optional, Tuple

import numpy as np
import sympy

from src.utils.errors import DomainError

__all__ = [
    "Profile",
    "TrigPoly",
    "GradedSeries",
    "trig_mul",
    "apply_multiplier",
    "abs_d",
    "dx",
    "hilbert",
    "compose_with_zeta",
    "dn_series",
    "surface_velocities",
    "reconstruct_pq",
]

Profile = Literal["exact", "float"]
Order = Tuple[int, int]


# Coeficientes


def _canon(c: Any, profile: Profile) -> Any:
    if profile == "exact":
        if isinstance(c, float) or isinstance(c, complex):
            raise DomainError("perfil exato não aceita coeficientes em ponto flutuante")
        return sympy.expand(sympy.sympify(c))
    return complex(c)


def _zero(profile: Profile) -> Any:
    return sympy.Integer(0) if profile == "exact" else 0j


def _unit_i(profile: Profile) -> Any:
    return sympy.I if profile == "exact" else 1j


def _conj(c: Any, profile: Profile) -> Any:
    if profile == "exact":
        return sympy.expand(sympy.conjugate(c))
    return c.conjugate()


def _check_profiles(a: Any, b: Any) -> Profile:
    if a.profile != b.profile:
        raise DomainError(f"perfis incompatíveis: {a.profile} vs {b.profile}")
    return a.profile


# TrigPoly


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """
    Polinômio trigonométrico com suporte finito.

    Campos
    ------
    coeffs : Mapping[int, coef]
        Número de onda → coeficiente. Zeros exatos são removidos na construção.
    profile : {"exact", "float"}
    """

    coeffs: Mapping[int, Any] = field(default_factory=dict)
    profile: Profile = "exact"

    def __post_init__(self) -> None:
        clean: Dict[int, Any] = {}
        for k, c in dict(self.coeffs).items():
            c = _canon(c, self.profile)
            if c != 0:
                clean[int(k)] = c
        object.__setattr__(self, "coeffs", MappingProxyType(dict(sorted(clean.items()))))

    # construtores

    @classmethod
    def zero(cls, profile: Profile = "exact") -> "TrigPoly":
        return cls({}, profile)

    @classmethod
    def const(cls, c: Any, profile: Profile = "exact") -> "TrigPoly":
        return cls({0: c}, profile)

    @classmethod
    def trig(
        cls,
        cos: Optional[Mapping[int, Any]] = None,
        sin: Optional[Mapping[int, Any]] = None,
        const: Any = 0,
        profile: Profile = "exact",
    ) -> "TrigPoly":
        """
        Constrói a partir de amplitudes reais: const + Σ a_k cos kx + Σ b_k sin kx.

        Examples
        --------
        >>> TrigPoly.trig(cos={1: 3, 3: -3}, const=Fraction(3, 2))
        """
        half = Fraction(1, 2)
        i = _unit_i(profile)
        out: Dict[int, Any] = {0: _canon(const, profile)}
        for k, a in (cos or {}).items():
            if k == 0:
                out[0] = out[0] + _canon(a, profile)
                continue
            for kk in (k, -k):
                out[kk] = out.get(kk, _zero(profile)) + _canon(a, profile) * _canon(half, profile)
        for k, b in (sin or {}).items():
            if k == 0:
                continue
            amp = _canon(b, profile) * _canon(half, profile)
            out[k] = out.get(k, _zero(profile)) - i * amp
            out[-k] = out.get(-k, _zero(profile)) + i * amp
        return cls(out, profile)

    # acesso

    def coeff(self, k: int) -> Any:
        return self.coeffs.get(int(k), _zero(self.profile))

    def support(self) -> Tuple[int, ...]:
        return tuple(self.coeffs.keys())

    def is_zero(self) -> bool:
        return not self.coeffs

    def max_abs(self) -> float:
        return max((abs(complex(c)) for c in self.coeffs.values()), default=0.0)

    def _vanishes(self, tol: float) -> bool:
        if self.profile == "exact":
            return self.is_zero()
        return self.max_abs() <= tol

    def is_real_valued(self, tol: float = 1e-13) -> bool:
        """c(−k) = conj(c(k)) para todo k (exato, ou até `tol` no perfil float)."""
        return (self - self.conj_reflect())._vanishes(tol)

    def is_even(self, tol: float = 1e-13) -> bool:
        return (self - self.reflect())._vanishes(tol)

    def is_odd(self, tol: float = 1e-13) -> bool:
        return (self + self.reflect())._vanishes(tol)

    def conj_reflect(self) -> "TrigPoly":
        """f → conj(f): c(k) → conj(c(−k))."""
        return TrigPoly({-k: _conj(c, self.profile) for k, c in self.coeffs.items()}, self.profile)

    def reflect(self) -> "TrigPoly":
        """f(x) → f(−x)."""
        return TrigPoly({-k: c for k, c in self.coeffs.items()}, self.profile)

    # aritmética

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        profile = _check_profiles(self, other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, _zero(profile)) + c
        return TrigPoly(out, profile)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly({k: -c for k, c in self.coeffs.items()}, self.profile)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def scale(self, s: Any) -> "TrigPoly":
        s = _canon(s, self.profile)
        return TrigPoly({k: s * c for k, c in self.coeffs.items()}, self.profile)

    def __mul__(self, other: Any) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            return trig_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrigPoly) or other.profile != self.profile:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def to_float(self) -> "TrigPoly":
        if self.profile == "float":
            return self
        return TrigPoly({k: complex(c) for k, c in self.coeffs.items()}, "float")

    def evaluate(self, x: np.ndarray | float) -> np.ndarray:
        """Valor complexo Σ c_k e^{ikx} nos pontos x."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x, dtype=complex)
        for k, c in self.coeffs.items():
            out = out + complex(c) * np.exp(1j * k * x)
        return out

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {c}" for k, c in self.coeffs.items())
        return f"TrigPoly({{{body}}}, profile={self.profile!r})"


def trig_mul(a: TrigPoly, b: TrigPoly) -> TrigPoly:
    """
    Produto de polinômios trigonométricos (convolução dos coeficientes).

    Parameters
    ----------
    a, b : TrigPoly
        Fatores no mesmo perfil.

    Returns
    -------
    TrigPoly
        c(k) = Σ_j a(j)·b(k−j).
    """
    profile = _check_profiles(a, b)
    out: Dict[int, Any] = {}
    for j, ca in a.coeffs.items():
        for i, cb in b.coeffs.items():
            out[j + i] = out.get(j + i, _zero(profile)) + ca * cb
    return TrigPoly(out, profile)


def apply_multiplier(sym: Callable[[int], Any], f: TrigPoly) -> TrigPoly:
    """
    Aplica um multiplicador de Fourier: c_out(k) = sym(k)·c_f(k).

    No perfil exato `sym` deve devolver valores exatos (int, Rational, I·k...).
    """
    return TrigPoly({k: sym(k) * c for k, c in f.coeffs.items()}, f.profile)


def abs_d(f: TrigPoly) -> TrigPoly:
    """|D|: símbolo |k|."""
    return apply_multiplier(abs, f)


def dx(f: TrigPoly, n: int = 1) -> TrigPoly:
    """∂xⁿ: símbolo (ik)ⁿ."""
    i = _unit_i(f.profile)
    return apply_multiplier(lambda k: (i * k) ** n, f)


def hilbert(f: TrigPoly) -> TrigPoly:
    """Transformada de Hilbert periódica: símbolo −i·sign(k) (cos kx → sin kx)."""
    i = _unit_i(f.profile)
    return apply_multiplier(lambda k: -i * int(np.sign(k)), f)


# GradedSeries


@dataclass(frozen=True, eq=False)
class GradedSeries:
    """
    Série formal Σ εᵐ δⁿ f_{m,n}(x) com corte m + n ≤ max_order.

    Campos
    ------
    terms : Mapping[(m, n), TrigPoly]
    max_order : int
        Corte de grau total (default 3).
    profile : {"exact", "float"}
    """

    terms: Mapping[Order, TrigPoly] = field(default_factory=dict)
    max_order: int = 3
    profile: Profile = "exact"

    def __post_init__(self) -> None:
        clean: Dict[Order, TrigPoly] = {}
        for (m, n), t in dict(self.terms).items():
            if m < 0 or n < 0:
                raise DomainError(f"ordem negativa na série: {(m, n)}")
            if t.profile != self.profile:
                raise DomainError("termo com perfil diferente da série")
            if m + n <= self.max_order and not t.is_zero():
                clean[(int(m), int(n))] = t
        object.__setattr__(self, "terms", MappingProxyType(dict(sorted(clean.items()))))

    @classmethod
    def from_eps(
        cls, terms: Mapping[int, TrigPoly], max_order: int = 3, profile: Profile = "exact"
    ) -> "GradedSeries":
        return cls({(m, 0): t for m, t in terms.items()}, max_order, profile)

    @classmethod
    def constant(cls, c: Any, max_order: int = 3, profile: Profile = "exact") -> "GradedSeries":
        t = c if isinstance(c, TrigPoly) else TrigPoly.const(c, profile)
        return cls({(0, 0): t}, max_order, profile)

    def term(self, m: int, n: int = 0) -> TrigPoly:
        return self.terms.get((m, n), TrigPoly.zero(self.profile))

    def orders(self) -> Tuple[Order, ...]:
        return tuple(self.terms.keys())

    def is_eps_only(self) -> bool:
        return all(n == 0 for _, n in self.terms)

    def map_terms(self, fn: Callable[[TrigPoly], TrigPoly]) -> "GradedSeries":
        return GradedSeries({o: fn(t) for o, t in self.terms.items()}, self.max_order, self.profile)

    def truncate(self, order: int) -> "GradedSeries":
        return GradedSeries(self.terms, min(order, self.max_order), self.profile)

    def to_float(self) -> "GradedSeries":
        if self.profile == "float":
            return self
        return GradedSeries(
            {o: t.to_float() for o, t in self.terms.items()}, self.max_order, "float"
        )

    def __add__(self, other: "GradedSeries") -> "GradedSeries":
        profile = _check_profiles(self, other)
        cutoff = min(self.max_order, other.max_order)
        out = dict(self.terms)
        for o, t in other.terms.items():
            out[o] = out[o] + t if o in out else t
        return GradedSeries(out, cutoff, profile)

    def __neg__(self) -> "GradedSeries":
        return self.map_terms(lambda t: -t)

    def __sub__(self, other: "GradedSeries") -> "GradedSeries":
        return self + (-other)

    def __mul__(self, other: Any) -> "GradedSeries":
        if not isinstance(other, GradedSeries):
            return self.map_terms(lambda t: t * other)
        profile = _check_profiles(self, other)
        cutoff = min(self.max_order, other.max_order)
        out: Dict[Order, TrigPoly] = {}
        for (m1, n1), t1 in self.terms.items():
            for (m2, n2), t2 in other.terms.items():
                o = (m1 + m2, n1 + n2)
                if o[0] + o[1] > cutoff:
                    continue
                prod = trig_mul(t1, t2)
                out[o] = out[o] + prod if o in out else prod
        return GradedSeries(out, cutoff, profile)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedSeries) or other.profile != self.profile:
            return NotImplemented
        return not (self - other).terms

    __hash__ = None  # type: ignore[assignment]

    def max_abs_difference(self, other: "GradedSeries") -> float:
        diff = self.to_float() - other.to_float()
        return max((t.max_abs() for t in diff.terms.values()), default=0.0)


# Composição com a deformação ζ


def compose_with_zeta(f: GradedSeries, zeta: GradedSeries) -> GradedSeries:
    """
    Composição de Taylor f∘ζ = Σ_n (ζ − x)ⁿ ∂xⁿ f / n!, truncada no corte comum.

    Parameters
    ----------
    f : GradedSeries
        Série apenas em ε.
    zeta : GradedSeries
        Deslocamento ζ − x (apenas em ε, sem termo de ordem 0).

    Returns
    -------
    GradedSeries

    Raises
    ------
    DomainError
        Cortes diferentes, séries com δ ou deslocamento com termo de ordem 0.
    """
    if f.max_order != zeta.max_order:
        raise DomainError(
            f"cortes incompatíveis na composição: {f.max_order} vs {zeta.max_order}"
        )
    if not (f.is_eps_only() and zeta.is_eps_only()):
        raise DomainError("composição com ζ exige séries apenas em ε")
    if (0, 0) in zeta.terms:
        raise DomainError("deslocamento ζ − x não pode ter termo de ordem 0")

    cutoff = f.max_order
    out = f
    power = GradedSeries.constant(1, cutoff, f.profile)
    for n in range(1, cutoff + 1):
        power = power * zeta
        deriv = f.map_terms(lambda t, n=n: dx(t, n))
        out = out + (power * deriv) * Fraction(1, factorial(n))
    return out


# Derivadas de forma do operador Dirichlet–Neumann


def _abs_d(s: GradedSeries) -> GradedSeries:
    return s.map_terms(abs_d)


def _dx(s: GradedSeries, n: int = 1) -> GradedSeries:
    return s.map_terms(lambda t: dx(t, n))


def dn_series(eta: GradedSeries, psi: GradedSeries) -> GradedSeries:
    """
    G(η)ψ até o corte comum pela expansão em η até segunda ordem:

        |D|ψ − |D|(η|D|ψ) − ∂x(η∂xψ)
        + |D|(η|D|(η|D|ψ)) + ½|D|(η²∂x²ψ) + ½∂x²(η²|D|ψ)

    Suficiente até ε³ quando η e ψ começam em ordem 1.
    """
    half = Fraction(1, 2)
    d_psi = _abs_d(psi)
    eta2 = eta * eta
    g0 = d_psi
    g1 = -_abs_d(eta * d_psi) - _dx(eta * _dx(psi))
    g2 = (
        _abs_d(eta * _abs_d(eta * d_psi))
        + _abs_d(eta2 * _dx(psi, 2)) * half
        + _dx(eta2 * d_psi, 2) * half
    )
    return g0 + g1 + g2


def surface_velocities(
    eta: GradedSeries, psi: GradedSeries
) -> Tuple[GradedSeries, GradedSeries]:
    """
    Velocidades na superfície (B, V):

        B = (G(η)ψ + ηxψx)(1 − ηx²),   V = ψx − ηx·B

    Returns
    -------
    (B, V) : tuple[GradedSeries, GradedSeries]
    """
    cutoff = min(eta.max_order, psi.max_order)
    one = GradedSeries.constant(1, cutoff, eta.profile)
    eta_x = _dx(eta)
    psi_x = _dx(psi)
    b = (dn_series(eta, psi) + eta_x * psi_x) * (one - eta_x * eta_x)
    v = psi_x - eta_x * b
    return b, v


def _inverse_stretch(zeta: GradedSeries) -> GradedSeries:
    # 1/ζ′ = Σ (−∂x(ζ − x))ⁿ
    one = GradedSeries.constant(1, zeta.max_order, zeta.profile)
    w = -_dx(zeta)
    out, power = one, one
    for _ in range(zeta.max_order):
        power = power * w
        out = out + power
    return out


@lru_cache(maxsize=4)
def reconstruct_pq(profile: Profile = "exact") -> Tuple[GradedSeries, GradedSeries, GradedSeries]:
    """
    Reconstrói p, q e (1+q)/ζ′ até ε³ a partir da onda de Stokes.

    Etapas
    ------
    1) B*, V* pelas derivadas de forma de G(η)ψ.
    2) Composição com ζ (deslocamento congelado em `stokes_coeffs`).
    3) p = (c − V*∘ζ)/ζ′ ; q = −p·∂x(B*∘ζ) ; qz = (1 + q)/ζ′.

    Parameters
    ----------
    profile : {"exact", "float"}

    Returns
    -------
    (p, q, qz) : tuple[GradedSeries, GradedSeries, GradedSeries]
    """
    # import local: stokes_coeffs depende deste módulo
    from src.stability.stokes_coeffs import stokes_profiles

    st = stokes_profiles(profile)
    cutoff = st.zeta_minus_x.max_order
    eta = st.eta.truncate(cutoff)
    psi = st.psi.truncate(cutoff)
    speed = st.c1.truncate(cutoff)

    # 1) velocidades na superfície
    b, v = surface_velocities(eta, psi)

    # 2) composição
    zeta = st.zeta_minus_x
    b_z = compose_with_zeta(b, zeta)
    v_z = compose_with_zeta(v, zeta)
    inv_stretch = _inverse_stretch(zeta)

    # 3) coeficientes do hamiltoniano
    one = GradedSeries.constant(1, cutoff, profile)
    p = (speed - v_z) * inv_stretch
    q = -(p * _dx(b_z))
    qz = (one + q) * inv_stretch
    return p, q, qz

