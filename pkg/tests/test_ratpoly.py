"""
Testes de RationalPoly (ℚ[x] exato).

Critérios validados
-------------------
- Avaliação, produto e potência exatos (sympy.Poly em QQ); coeficientes Fraction.
- Divisão euclidiana: a = q·b + r com grau(r) < grau(b).
- Mdc mônico e contagem de raízes por Sturm.
- Rejeição de floats e de coeficientes não inteiros em `to_ints`.
"""

from fractions import Fraction as F

import pytest

from src.stability.ratpoly import RationalPoly
from src.utils.errors import DomainError

X = RationalPoly.x()
ONE = RationalPoly.constant(1)


def test_evaluate_and_arith():
    p = RationalPoly.from_ints([1, -3, 2])  # (2x − 1)(x − 1)
    assert p(F(1, 2)) == 0 and p(1) == 0
    assert p(3) == 10
    assert (X - ONE) ** 2 == RationalPoly.from_ints([1, -2, 1])
    assert (2 * X).coeffs == (0, 2)
    assert RationalPoly.from_ints([0, 0, 0]).degree == -1


def test_divmod():
    a = RationalPoly.from_ints([5, 0, 3, 1])
    b = RationalPoly.from_ints([1, 2])
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.degree < b.degree
    with pytest.raises(ZeroDivisionError):
        divmod(a, RationalPoly())


def test_gcd_monic():
    f = (X - ONE) * (X + RationalPoly.constant(2))
    g = (X - ONE) * (2 * X + RationalPoly.constant(3))
    assert f.gcd(g) == X - ONE
    assert f.gcd(X + RationalPoly.constant(5)).degree == 0


def test_sturm_count():
    """x² − 2: uma raiz em [1, 2], nenhuma em [2, 3]; raiz múltipla conta uma vez."""
    p = RationalPoly.from_ints([-2, 0, 1])
    assert p.count_roots(1, 2) == 1
    assert p.count_roots(-2, 2) == 2
    assert p.count_roots(2, 3) == 0
    assert ((X - ONE) ** 2).count_roots(0, 2) == 1
    with pytest.raises(DomainError):
        p.count_roots(2, 1)


def test_rejects_float_and_non_integer():
    with pytest.raises(DomainError):
        RationalPoly((0.5,))
    with pytest.raises(DomainError):
        RationalPoly((F(1, 2),)).to_ints()
    assert RationalPoly.from_ints([3, 0, -1]).to_ints() == [3, 0, -1]
