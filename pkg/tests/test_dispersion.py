"""
Testes da relação de dispersão e da ressonância transversal.

Critérios validados
-------------------
- β*, σ, γ₁, γ₂ nas 10 casas da tabela de constantes; γ₁ + γ₂ = 3.
- λ⁰₊(−2, β*) = λ⁰₋(1, β*) = iσ e apenas esses modos são ressonantes.
- Ω par em k, Ω(0) = √β; β ≤ 0 é rejeitado.
- Gap espectral positivo, estável em k_max, e raio do contorno = gap/2.
"""

import numpy as np
import pytest

from src.stability.dispersion import (
    contour_radius,
    delta0,
    lambda0,
    omega,
    omega_dbeta,
    omega_prime,
    resonant_modes,
    solve_resonance,
    spectral_gap,
)
from src.utils.errors import DomainError


@pytest.fixture(scope="module")
def res():
    return solve_resonance()


@pytest.mark.parametrize(
    "field,expected",
    [
        ("beta_star", 2.7275211479),
        ("sigma", -0.3894887313),
        ("gamma1", 1.3894887313),
        ("gamma2", 1.6105112687),
    ],
)
def test_resonance_constants(res, field, expected):
    """Constantes com 10 casas decimais."""
    assert round(getattr(res, field), 10) == pytest.approx(expected, abs=1e-12)


def test_resonance_identities(res):
    """γ₁ + γ₂ = 3 e σ = 1 − γ₁ = −2 + γ₂."""
    assert res.gamma1 + res.gamma2 == pytest.approx(3.0, abs=1e-12)
    assert res.sigma == pytest.approx(1.0 - res.gamma1, abs=1e-15)
    assert res.sigma == pytest.approx(-2.0 + res.gamma2, abs=1e-12)
    assert res.residual < 1e-12


def test_resonance_fields_are_builtin_floats(res):
    """Campos de ResonanceData são float nativos (serialização JSON/pydantic)."""
    for value in res.to_dict().values():
        assert type(value) is float


def test_resonant_pair(res):
    """O autovalor duplo iσ vem de (−2, +) e (1, −)."""
    lp = lambda0(-2, res.beta_star, "+")
    lm = lambda0(1, res.beta_star, "-")
    assert abs(lp - 1j * res.sigma) < 1e-12
    assert abs(lm - 1j * res.sigma) < 1e-12
    assert resonant_modes(res, range(-20, 21)) == [-2, 1]
    assert abs(delta0(1j * res.sigma, 1, res.beta_star)) < 1e-12


def test_omega_basics():
    """Ω par, Ω(0) = √β, ∂Ω/∂k = k/Ω e ∂Ω/∂β = 1/(2Ω)."""
    ks = np.arange(-5, 6)
    assert np.allclose(omega(ks, 2.0), omega(-ks, 2.0))
    assert omega(0, 4.0) == pytest.approx(2.0)
    assert omega_prime(3, 16.0) == pytest.approx(3.0 / 5.0)
    assert omega_dbeta(3, 16.0) == pytest.approx(1.0 / 10.0)
    with pytest.raises(DomainError):
        omega(1, 0.0)
    with pytest.raises(DomainError):
        lambda0(1, 1.0, "x")


def test_omega_complex_beta():
    """β complexo usa o ramo principal."""
    val = omega(2, 1.0 + 0.1j)
    assert isinstance(complex(val), complex)
    assert complex(val) ** 2 == pytest.approx(5.0 + 0.1j)


def test_spectral_gap(res):
    """Gap positivo, igual para k_max = 20 e 50, e raio = gap/2."""
    gap = spectral_gap(res, 50)
    assert gap == pytest.approx(0.759958147884, abs=1e-9)
    assert spectral_gap(res, 20) == pytest.approx(gap, abs=1e-12)
    assert contour_radius(res) == pytest.approx(gap / 2)
    with pytest.raises(DomainError):
        spectral_gap(res, 7)
