"""
Testes das expansões congeladas da onda de Stokes.

Critérios validados
-------------------
- Resíduos de cinemática e Bernoulli nulos exatamente nas ordens 1, 2 e 3.
- Ordem fora de {1, 2, 3} é rejeitada.
- ζ − x = 𝓗[η∘ζ] exatamente até ε³.
- Paridades: η par, ψ ímpar, ζ − x ímpar; velocidade c = 1 + ½ε².
- Transcrição de p, q, (1+q)/ζ′ com termos de ordem 0 corretos.
"""

from fractions import Fraction as F

import pytest

from src.stability.series_algebra import TrigPoly
from src.stability.stokes_coeffs import (
    check_stokes_residuals,
    check_zeta_consistency,
    reference_pq,
    stokes_profiles,
)
from src.utils.errors import DomainError


@pytest.mark.parametrize("order", [1, 2, 3])
def test_residuals_vanish(order):
    """Resíduos exatamente nulos até a ordem pedida."""
    rep = check_stokes_residuals(order)
    assert rep["order"] == order
    assert rep["exact_zero"] is True
    assert rep["max_residual"] == 0.0
    assert set(rep["kinematic"]) == set(range(1, order + 1))


@pytest.mark.parametrize("order", [0, 4])
def test_residual_order_out_of_range(order):
    with pytest.raises(DomainError):
        check_stokes_residuals(order)


def test_zeta_fixed_point():
    """ζ − x é o ponto fixo da deformação conforme até ε³."""
    assert check_zeta_consistency() is True


def test_parities_and_speed():
    """η par, ψ e ζ − x ímpares; c = 1 + ½ε²."""
    st = stokes_profiles()
    assert all(t.is_even() for t in st.eta.terms.values())
    assert all(t.is_odd() for t in st.psi.terms.values())
    assert all(t.is_odd() for t in st.zeta_minus_x.terms.values())
    assert st.c1.term(0) == TrigPoly.const(1)
    assert st.c1.term(2) == TrigPoly.const(F(1, 2))
    assert st.c1.term(1).is_zero()


def test_reference_pq_leading_terms():
    """p₀ = 1, q₀ = 0, (1+q)/ζ′ começa em 1."""
    p, q, qz = reference_pq()
    assert p.term(0) == TrigPoly.const(1)
    assert q.term(0).is_zero()
    assert qz.term(0) == TrigPoly.const(1)
    assert p.term(1) == TrigPoly.trig(cos={1: -2})


def test_float_profile_matches_exact():
    """Perfis float e exato coincidem numericamente."""
    ex, fl = stokes_profiles("exact"), stokes_profiles("float")
    assert ex.eta.max_abs_difference(fl.eta) < 1e-15
    assert ex.psi.max_abs_difference(fl.psi) < 1e-15
