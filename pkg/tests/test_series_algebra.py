"""
Testes da álgebra graduada de séries (TrigPoly / GradedSeries).

Critérios validados
-------------------
- Produto trigonométrico comutativo e associativo (comparação exata).
- cos x · cos x = ½ + ½cos 2x; suporte do produto limitado pela soma dos suportes.
- Multiplicadores |D|, ∂x e Hilbert (cos kx → sin kx).
- Perfil exato rejeita ponto flutuante; mistura de perfis é erro.
- Corte de grau total em GradedSeries.
- Composição com ζ: deslocamento com termo de ordem 0 é rejeitado.
- Reconstrução de p, q, (1+q)/ζ′ idêntica à transcrição (erro zero).
- Perfis G(η)ψ, B*, V* nas ordens ε¹…ε³.
"""

import math
import random
from fractions import Fraction as F

import pytest
import sympy

from src.stability.series_algebra import (
    GradedSeries,
    TrigPoly,
    abs_d,
    compose_with_zeta,
    dn_series,
    dx,
    hilbert,
    reconstruct_pq,
    surface_velocities,
    trig_mul,
)
from src.stability.stokes_coeffs import reference_pq, stokes_profiles
from src.utils.errors import DomainError


def _random_poly(rng: random.Random) -> TrigPoly:
    """TrigPoly exato com suporte ≤ 8 e coeficientes gaussianos racionais."""
    ks = rng.sample(range(-6, 7), rng.randint(1, 8))
    return TrigPoly(
        {k: sympy.Rational(rng.randint(-9, 9), rng.randint(1, 5)) + sympy.I * rng.randint(-3, 3) for k in ks}
    )


def _t(**kw) -> TrigPoly:
    return TrigPoly.trig(**kw)


def test_trig_mul_commutative_and_associative():
    """Produto comutativo e associativo em polinômios aleatórios."""
    rng = random.Random(7)
    for _ in range(10):
        a, b, c = (_random_poly(rng) for _ in range(3))
        assert trig_mul(a, b) == trig_mul(b, a)
        assert trig_mul(trig_mul(a, b), c) == trig_mul(a, trig_mul(b, c))


def test_cos_squared():
    """cos²x = ½ + ½cos 2x."""
    c = _t(cos={1: 1})
    assert c * c == _t(cos={2: F(1, 2)}, const=F(1, 2))


def test_product_support_bound():
    """Suporte do produto contido na soma dos suportes."""
    rng = random.Random(11)
    a, b = _random_poly(rng), _random_poly(rng)
    sums = {i + j for i in a.support() for j in b.support()}
    assert set(trig_mul(a, b).support()) <= sums


def test_exact_zero_removed():
    """Coeficientes zero exatos não aparecem no mapa."""
    p = TrigPoly({0: 1, 2: 0, -1: sympy.Rational(0, 3)})
    assert p.support() == (0,)


def test_multipliers():
    """|D|, ∂x e Hilbert nos modos básicos."""
    c2 = _t(cos={2: 1})
    assert abs_d(c2) == _t(cos={2: 2})
    assert dx(_t(sin={1: 1})) == _t(cos={1: 1})
    assert dx(c2, 2) == _t(cos={2: -4})
    assert hilbert(_t(cos={3: 1})) == _t(sin={3: 1})
    assert hilbert(TrigPoly.const(5)).is_zero()


def test_exact_profile_rejects_float():
    """Perfil exato não aceita float; perfis misturados geram erro."""
    with pytest.raises(DomainError):
        TrigPoly({1: 0.5})
    with pytest.raises(DomainError):
        _t(cos={1: 1}) + _t(cos={1: 1}).to_float()


def test_float_conversion_and_evaluate():
    """to_float preserva valores pontuais."""
    p = _t(cos={1: 2}, sin={2: F(1, 3)}, const=1)
    f = p.to_float()
    assert f.profile == "float"
    val = f.evaluate(0.7)
    assert val.imag == pytest.approx(0.0, abs=1e-14)
    expected = 1 + 2 * math.cos(0.7) + math.sin(1.4) / 3
    assert val.real == pytest.approx(expected, abs=1e-14)


def test_real_even_odd_predicates():
    """Paridade e realidade em exemplos simples."""
    assert _t(cos={1: 1}).is_even() and _t(cos={1: 1}).is_real_valued()
    assert _t(sin={2: 1}).is_odd()
    assert not TrigPoly({1: sympy.I}).is_real_valued()


def test_graded_series_cutoff():
    """Produto corta em m + n ≤ max_order."""
    e = GradedSeries({(1, 0): TrigPoly.const(1)}, max_order=3)
    d = GradedSeries({(0, 1): TrigPoly.const(1)}, max_order=3)
    s = (e + d) * (e + d) * (e + d) * (e + d)
    assert not s.terms
    cube = (e + d) * (e + d) * (e + d)
    assert cube.term(2, 1) == TrigPoly.const(3)
    with pytest.raises(DomainError):
        GradedSeries({(-1, 0): TrigPoly.const(1)})


def test_compose_rejects_order_zero_shift():
    """ζ − x com termo de ordem 0 é inválido."""
    f = GradedSeries.from_eps({1: _t(cos={1: 1})})
    bad = GradedSeries.from_eps({0: _t(sin={1: 1})})
    with pytest.raises(DomainError):
        compose_with_zeta(f, bad)


def test_compose_first_order():
    """cos(x + ε sin x) = cos x − ε sin²x + O(ε²)."""
    f = GradedSeries.constant(_t(cos={1: 1}), max_order=1)
    zeta = GradedSeries.from_eps({1: _t(sin={1: 1})}, max_order=1)
    out = compose_with_zeta(f, zeta)
    assert out.term(0) == _t(cos={1: 1})
    assert out.term(1) == _t(cos={2: F(1, 2)}, const=F(-1, 2))


def test_shape_derivative_profiles():
    """G(η)ψ, B*, V* nas ordens ε¹…ε³."""
    st = stokes_profiles()
    eta, psi = st.eta.truncate(3), st.psi.truncate(3)
    g = dn_series(eta, psi)
    assert g.term(1) == _t(sin={1: 1})
    assert g.term(2) == _t(sin={2: 1})
    assert g.term(3) == _t(sin={1: F(5, 8), 3: F(9, 8)})

    b, v = surface_velocities(eta, psi)
    assert b.term(1) == _t(sin={1: 1})
    assert b.term(2) == _t(sin={2: F(1, 2)})
    assert b.term(3) == _t(sin={3: F(3, 8), 1: F(-1, 8)})
    assert v.term(1) == _t(cos={1: 1})
    assert v.term(2) == _t(cos={2: F(1, 2)}, const=F(1, 2))
    assert v.term(3) == _t(cos={1: F(5, 8), 3: F(3, 8)})


def test_b_composed_with_zeta():
    """B*∘ζ = ε sin x + ε² sin 2x + ε³(3/2 sin 3x − ½ sin x)."""
    st = stokes_profiles()
    b, _ = surface_velocities(st.eta.truncate(3), st.psi.truncate(3))
    bz = compose_with_zeta(b, st.zeta_minus_x)
    assert bz.term(1) == _t(sin={1: 1})
    assert bz.term(2) == _t(sin={2: 1})
    assert bz.term(3) == _t(sin={3: F(3, 2), 1: F(-1, 2)})


@pytest.mark.timeout(60)
def test_reconstruct_pq_exact():
    """p, q, (1+q)/ζ′ reconstruídos coincidem exatamente com a transcrição."""
    got = reconstruct_pq("exact")
    ref = reference_pq("exact")
    for a, b in zip(got, ref):
        assert a == b
        assert a.max_abs_difference(b) == 0.0


@pytest.mark.timeout(60)
def test_reconstruct_pq_float_profile():
    """Perfil float concorda com o exato a 1e-14."""
    got = reconstruct_pq("float")
    ref = reference_pq("exact")
    for a, b in zip(got, ref):
        assert a.max_abs_difference(b) < 1e-14
