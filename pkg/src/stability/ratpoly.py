"""
Polinômios em ℚ[x] com aritmética exata, sobre `sympy.Poly` no domínio QQ.

Usado pelo certificado de b₃,₀: avaliação exata, divisão euclidiana, mdc
mônico e contagem de raízes reais (Sturm, via sympy). Coeficientes são
expostos como `fractions.Fraction` em grau crescente.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Tuple, Union

import sympy
from sympy import QQ, Poly

from src.utils.errors import DomainError

Number = Union[int, Fraction]

__all__ = ["RationalPoly"]

_X = sympy.Symbol("x")


def _rational(c: Number) -> sympy.Rational:
    f = Fraction(c)
    return sympy.Rational(f.numerator, f.denominator)


def _fraction(c) -> Fraction:
    r = sympy.Rational(c)
    return Fraction(int(r.p), int(r.q))


def _ascending(poly: Poly) -> Tuple[Fraction, ...]:
    if poly.is_zero:
        return ()
    return tuple(_fraction(c) for c in reversed(poly.all_coeffs()))


@dataclass(frozen=True)
class RationalPoly:
    """
    Σ coeffs[i]·xⁱ (grau crescente). O polinômio nulo tem `coeffs == ()`.
    """

    coeffs: Tuple[Fraction, ...] = ()
    poly: Poly = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for c in self.coeffs:
            if isinstance(c, float):
                raise DomainError("RationalPoly aceita apenas inteiros e racionais")
        desc = [_rational(c) for c in reversed(self.coeffs)]
        poly = Poly.from_list(desc or [0], _X, domain=QQ)
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "coeffs", _ascending(poly))

    @classmethod
    def _wrap(cls, poly: Poly) -> "RationalPoly":
        return cls(_ascending(poly))

    @classmethod
    def from_ints(cls, coeffs: Iterable[Number]) -> "RationalPoly":
        return cls(tuple(Fraction(c) for c in coeffs))

    @classmethod
    def x(cls) -> "RationalPoly":
        return cls((Fraction(0), Fraction(1)))

    @classmethod
    def constant(cls, c: Number) -> "RationalPoly":
        return cls((Fraction(c),))

    @property
    def degree(self) -> int:
        """Grau (−1 para o polinômio nulo)."""
        return -1 if self.poly.is_zero else int(self.poly.degree())

    @property
    def leading(self) -> Fraction:
        if self.poly.is_zero:
            raise DomainError("polinômio nulo não tem coeficiente líder")
        return _fraction(self.poly.LC())

    def is_zero(self) -> bool:
        return bool(self.poly.is_zero)

    def __call__(self, x: Number) -> Fraction:
        return _fraction(self.poly.eval(_rational(x)))

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        return self._wrap(self.poly + other.poly)

    def __neg__(self) -> "RationalPoly":
        return self._wrap(-self.poly)

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self._wrap(self.poly - other.poly)

    def __mul__(self, other: Union["RationalPoly", Number]) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            return self._wrap(self.poly * other.poly)
        return self._wrap(self.poly * _rational(other))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RationalPoly":
        if n < 0:
            raise DomainError("expoente negativo")
        return self._wrap(self.poly**n)

    def __divmod__(self, other: "RationalPoly") -> Tuple["RationalPoly", "RationalPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("divisão por polinômio nulo")
        quot, rem = self.poly.div(other.poly)
        return self._wrap(quot), self._wrap(rem)

    def __mod__(self, other: "RationalPoly") -> "RationalPoly":
        return divmod(self, other)[1]

    def __floordiv__(self, other: "RationalPoly") -> "RationalPoly":
        return divmod(self, other)[0]

    def monic(self) -> "RationalPoly":
        return self._wrap(self.poly.monic())

    def derivative(self) -> "RationalPoly":
        return self._wrap(self.poly.diff(_X))

    def gcd(self, other: "RationalPoly") -> "RationalPoly":
        """Mdc mônico em ℚ[x]."""
        common = self.poly.gcd(other.poly)
        return self._wrap(common if common.is_zero else common.monic())

    def count_roots(self, lo: Number, hi: Number) -> int:
        """Número de raízes reais distintas em [lo, hi] (sequência de Sturm)."""
        if not lo < hi:
            raise DomainError("intervalo vazio")
        return int(self.poly.sqf_part().count_roots(_rational(lo), _rational(hi)))

    def to_ints(self) -> List[int]:
        """Coeficientes como inteiros (erro se algum não for inteiro)."""
        out = []
        for c in self.coeffs:
            if c.denominator != 1:
                raise DomainError("coeficiente não inteiro")
            out.append(int(c))
        return out

    def __repr__(self) -> str:
        return f"RationalPoly({self.poly.as_expr()})"
