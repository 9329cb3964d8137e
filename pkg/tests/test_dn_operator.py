"""
Testes dos multiplicadores do operador Dirichlet–Neumann achatado.

Critérios validados
-------------------
- EDO decaente: solução particular + correção homogênea satisfazem a equação
  e o traço pedido; forçamento ressonante é rejeitado.
- Hierarquia vs formas fechadas (C^±, B^{−,0,+}, D^{±3}) a 1e-11 para
  k ∈ [−12, 12] e β ∈ {0.5, 1, β*, 5}; R_0 = Ω.
- β → 0 anula R_j, j ≥ 1, sem ressonância espúria (μ − κ = O(β));
  matrizes simétricas (autoadjunção).
- B⁰ nas duas formas fechadas; tabelas rejeitam deslocamentos inválidos.
- Derivadas em β por Cauchy: R_{0,ℓ} analítico e concordância com
  diferenças finitas de Richardson; banda completa |k| ≤ 32 estável.
"""

import numpy as np
import pytest

from src.stability.dispersion import omega, solve_resonance
from src.stability.dn_operator import (
    ExpSum,
    MultiplierTable,
    beta_derivative_tables,
    beta_derivatives,
    closed_form_B,
    closed_form_B0_aform,
    closed_form_C,
    closed_form_D3,
    finite_difference_derivative,
    hierarchy_multipliers,
    solve_decaying_ode,
)
from src.utils.errors import DomainError, ResonantForcingError

BETAS = [0.5, 1.0, None, 5.0]
K_RANGE = (-12, 12)


def _beta(b):
    return solve_resonance().beta_star if b is None else b


# EDO


def test_ode_particular_and_boundary():
    """P″ − κ²P = 3e^{2z} com P(0) = 0."""
    kappa2 = 1.7
    forcing = ExpSum.single(2.0, 3.0)
    sol = solve_decaying_ode(kappa2, forcing)
    assert sol.value_at_zero() == pytest.approx(0.0, abs=1e-14)
    for z in (-0.1, -0.7, -2.0):
        second = sum(a * r * r * np.exp(r * z) for a, r in sol.terms)
        assert second - kappa2 * sol(z) == pytest.approx(forcing(z), abs=1e-12)


def test_ode_homogeneous_trace():
    """Sem forçamento e traço 1: e^{κz}."""
    sol = solve_decaying_ode(4.0, ExpSum(), boundary_value=1.0)
    assert len(sol.rates()) == 1
    assert float(np.real(sol.rates()[0])) == pytest.approx(2.0)
    assert sol.derivative_at_zero() == pytest.approx(2.0)


def test_ode_resonant_forcing():
    with pytest.raises(ResonantForcingError):
        solve_decaying_ode(4.0, ExpSum.single(2.0))


def test_expsum_merge_and_domain():
    """Taxas iguais são fundidas; taxa não positiva é rejeitada."""
    s = ExpSum.single(1.0, 2.0) + ExpSum.single(1.0, 3.0)
    assert len(s.terms) == 1 and s.value_at_zero() == pytest.approx(5.0)
    with pytest.raises(DomainError):
        ExpSum.single(-1.0)


# Hierarquia vs formas fechadas


@pytest.mark.timeout(30)
@pytest.mark.parametrize("beta", BETAS)
def test_hierarchy_matches_closed_forms(beta):
    """Todos os deslocamentos com forma fechada coincidem a 1e-11."""
    b = _beta(beta)
    tables = hierarchy_multipliers(b, K_RANGE)
    ks = tables[0].ks
    pairs = [
        (tables[0].offsets[0], omega(ks, b)),
        (tables[1].offsets[-1], closed_form_C(ks, b, "-")),
        (tables[1].offsets[1], closed_form_C(ks, b, "+")),
        (tables[2].offsets[-2], closed_form_B(ks, b, "-")),
        (tables[2].offsets[0], closed_form_B(ks, b, "0")),
        (tables[2].offsets[2], closed_form_B(ks, b, "+")),
        (tables[3].offsets[-3], closed_form_D3(ks, b, "-")),
        (tables[3].offsets[3], closed_form_D3(ks, b, "+")),
    ]
    for hier, closed in pairs:
        assert np.max(np.abs(hier - closed)) < 1e-11


def test_small_beta_vanishes():
    """β = 1e-8: R_j, j ≥ 1, abaixo de 1e-6."""
    tables = hierarchy_multipliers(1e-8, K_RANGE)
    for t in tables[1:]:
        for arr in t.offsets.values():
            assert np.max(np.abs(arr)) < 1e-6


@pytest.mark.parametrize("k_range", [(-3, 3), (-12, 12)])
def test_small_beta_no_spurious_resonance(k_range):
    """β → 0: taxa μ = Ω(k) + 1 se aproxima de κ = Ω(k + 1) sem ser ressonante."""
    tables = hierarchy_multipliers(1e-8, k_range)
    assert all(np.all(np.isfinite(a)) for t in tables for a in t.offsets.values())
    assert max(float(np.max(np.abs(a))) for t in tables[1:] for a in t.offsets.values()) < 1e-6


def test_near_resonant_forcing_bounded():
    """μ² − κ² = O(β) com amplitude O(β): solução particular O(1), sem erro."""
    beta = 1e-8
    sol = solve_decaying_ode(16.0 + beta, ExpSum.single(4.0, beta), boundary_zero=False)
    assert sol.value_at_zero() == pytest.approx(-1.0, rel=1e-5)


@pytest.mark.parametrize("beta", [0.5, 2.0, 5.0])
def test_b0_forms_agree(beta):
    ks = np.arange(-8, 9)
    assert np.allclose(closed_form_B(ks, beta, "0"), closed_form_B0_aform(ks, beta), atol=1e-13)


def test_matrices_symmetric():
    """G[k, k+d] = G[k+d, k] para cada R_j (autoadjunção)."""
    K = 10
    for t in hierarchy_multipliers(2.0, (-K, K)):
        m = t.matrix(K)
        assert np.max(np.abs(m - m.T)) < 1e-12


def test_hierarchy_rejects_bad_beta():
    with pytest.raises(DomainError):
        hierarchy_multipliers(0.0, (0, 2))
    with pytest.raises(DomainError):
        closed_form_C(1, 1.0, "x")


# MultiplierTable


def test_multiplier_table_access():
    t = MultiplierTable(order=1, beta=1.0, k_min=-2, k_max=2, offsets={1: np.arange(5.0)})
    assert t.coeff(1, 0) == 2.0
    assert t.coeff(-1, 0) == 0.0
    with pytest.raises(DomainError):
        t.coeff(1, 3)
    with pytest.raises(DomainError):
        MultiplierTable(order=1, beta=1.0, k_min=0, k_max=1, offsets={2: np.zeros(2)})
    with pytest.raises(DomainError):
        t.matrix(3)
    m = t.matrix(2)
    assert m.shape == (5, 5)
    assert m[2, 3] == 2.0  # k = 0, k + d = 1


# Derivadas em β


@pytest.mark.timeout(60)
def test_cauchy_r0_analytic():
    """R_{0,1} = 1/(2Ω) e R_{0,2} = −1/(8Ω³)."""
    b0 = solve_resonance().beta_star
    ks = np.arange(-4, 5)
    om = omega(ks, b0)
    r01 = beta_derivatives(0, 1, b0, (-4, 4))
    r02 = beta_derivatives(0, 2, b0, (-4, 4))
    assert np.allclose(r01.offsets[0], 1.0 / (2.0 * om), atol=1e-10)
    assert np.allclose(r02.offsets[0], -1.0 / (8.0 * om**3), atol=1e-10)
    assert r01.ell == 1 and r01.beta == b0


@pytest.mark.timeout(60)
def test_cauchy_matches_finite_differences():
    """R_{1,1} e R_{2,2} por Cauchy vs Richardson."""
    b0 = solve_resonance().beta_star
    tables = beta_derivative_tables(b0, (-3, 3))

    def r(j, d):
        return lambda b: hierarchy_multipliers(b, (-3, 3))[j].offsets[d]

    fd1 = finite_difference_derivative(r(1, 1), b0, 1)
    fd2 = finite_difference_derivative(r(2, 0), b0, 2)
    assert np.allclose(tables[(1, 1)].offsets[1], fd1, atol=1e-8)
    assert np.allclose(tables[(2, 2)].offsets[0], fd2, atol=1e-7)
    assert np.allclose(tables[(3, 0)].offsets[3], hierarchy_multipliers(b0, (-3, 3))[3].offsets[3])


@pytest.mark.timeout(120)
def test_cauchy_full_band_default_truncation():
    """Banda |k| ≤ 32 com 128 nós: sem QuadratureError e R_{0,1} = 1/(2Ω) nas bordas."""
    b0 = solve_resonance().beta_star
    tables = beta_derivative_tables(b0, (-32, 32), nodes=128)
    ks = tables[(0, 1)].ks
    assert np.allclose(tables[(0, 1)].offsets[0], 1.0 / (2.0 * omega(ks, b0)), rtol=1e-10)
    assert np.all(np.isfinite(tables[(3, 3)].offsets[-3]))


def test_beta_derivatives_domain():
    with pytest.raises(DomainError):
        beta_derivatives(4, 0, 1.0, (0, 1))
    with pytest.raises(DomainError):
        beta_derivative_tables(-1.0, (0, 1))
    with pytest.raises(DomainError):
        finite_difference_derivative(lambda b: b, 1.0, 3)
