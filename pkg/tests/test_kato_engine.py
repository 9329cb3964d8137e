"""
Testes do motor de Kato: projetor, transformação, matriz reduzida e
extração dos coeficientes.

Critérios validados
-------------------
- Onze coeficientes a 1e-8 dos valores de referência (K=32, 128 nós) e
  coeficientes proibidos abaixo de 1e-9.
- Suportes em número de onda de todas as correções V_j^{(m,n)}.
- Projetor por quadratura: idempotente, traço 2 e igual a P₀ em ε = δ = 0.
- Rota direta e rota perturbativa concordam em (ε, δ) pequenos.
- Validações de contorno e da norma ‖P − P₀‖.
- Correções de autovetor convergem em terceira ordem para 𝓚U_j; R fixa
  V_j^{(m,n)}; 𝓚 preserva os pareamentos (JU_i, U_j).
- Tabela idêntica em K = 8 e K = 32 (suportes em |k| ≤ 5).
"""

import numpy as np
import pytest

from src.stability.acceptance import GOLDEN, SUPPORT_TABLE
from src.stability.dispersion import solve_resonance
from src.stability.kato_engine import (
    ContourSpec,
    default_contour,
    exact_projector,
    kato_transform,
    projector,
    reduced_matrix,
    reduced_matrix_direct,
)
from src.stability.operator_assembly import TruncatedOperator, basis_vectors, reversal, symplectic_pairing
from src.stability.pipeline import get_engine, get_table
from src.utils.errors import DomainError, KatoNormError

K_SMALL = 16


@pytest.fixture(scope="module")
def res():
    return solve_resonance()


@pytest.fixture(scope="module")
def engine():
    return get_engine(32, 128)


@pytest.fixture(scope="module")
def table():
    return get_table(32, 128)


@pytest.mark.timeout(300)
def test_coefficients_match_reference(table):
    """a01…c03 e b30 a 1e-8."""
    values = table.to_dict()
    assert len(values) == 11
    for name, v in values.items():
        assert v == pytest.approx(GOLDEN[name], abs=1e-8), name
    assert table.forbidden_max < 1e-9


@pytest.mark.timeout(300)
def test_correction_supports(engine):
    supports = engine.supports()
    for key, expected in SUPPORT_TABLE.items():
        assert supports[key] == expected, key


@pytest.mark.timeout(300)
def test_pmn_corrections_shape(engine, res):
    u1, u2 = engine.pmn_corrections(0, 0)
    assert u1.support() == (1,) and u2.support() == (-2,)
    p1, _ = engine.pmn_corrections(1, 0)
    assert p1.support() == (0, 2)
    with pytest.raises(DomainError):
        engine.pmn_corrections(2, 2)


@pytest.mark.timeout(120)
def test_projector_structure(res):
    """P² = P e tr P = 2 em (ε, δ) = (0.05, 0.01)."""
    contour = default_contour(res)
    P = projector(0.05, 0.01, contour, "expanded3", K_SMALL, res)
    assert np.max(np.abs(P.matrix @ P.matrix - P.matrix)) < 1e-10
    assert abs(np.trace(P.matrix) - 2.0) < 1e-10


def test_projector_unperturbed_equals_exact(res):
    contour = default_contour(res)
    P = projector(0.0, 0.0, contour, k_max=K_SMALL, res=res)
    P0 = exact_projector(res, K_SMALL)
    assert np.max(np.abs(P.matrix - P0.matrix)) < 1e-10


@pytest.mark.timeout(300)
def test_direct_and_perturbative_routes_agree(engine, res):
    """Diferença O(|(ε, δ)|⁴) entre as duas rotas."""
    contour = default_contour(res)
    eps, delta = 0.01, 0.001
    direct = reduced_matrix_direct(eps, delta, contour, "expanded3", 32, res)
    series = reduced_matrix(eps, delta, engine)
    assert np.max(np.abs(direct - series)) < 1e-6
    # reversibilidade: L puramente imaginária e L12 = −L21
    assert np.max(np.abs(direct.real)) < 1e-10
    assert abs(direct[0, 1] + direct[1, 0]) < 1e-10


def test_kato_norm_guard(res):
    P0 = exact_projector(res, K_SMALL)
    far = TruncatedOperator(K_SMALL, P0.matrix + 2.0 * np.eye(P0.size))
    with pytest.raises(KatoNormError):
        kato_transform(far, P0)
    same = kato_transform(P0, P0)
    n = P0.size
    assert np.allclose(same.matrix, np.eye(n), atol=1e-12)


def test_contour_validation(res):
    c = default_contour(res)
    assert c.nodes == 128
    assert c.radius == pytest.approx(0.759958147884 / 2, abs=1e-10)
    assert c.center == pytest.approx(1j * res.sigma)
    assert np.allclose(np.abs(c.points() - c.center), c.radius)
    with pytest.raises(DomainError):
        ContourSpec(center=0j, radius=0.0)
    with pytest.raises(DomainError):
        ContourSpec(center=0j, radius=0.1, nodes=100)
    with pytest.raises(DomainError):
        ContourSpec(center=1j * res.sigma, radius=1.0).check_against(res)


def test_second_order_table(table):
    t2 = table.second_order()
    assert t2.b30 == 0.0 and t2.a21 == 0.0 and t2.c03 == 0.0
    assert t2.a01 == table.a01 and t2.c20 == table.c20


@pytest.mark.timeout(300)
def test_first_order_closed_forms(table, res):
    """a01 = −1/(4γ₁³) e c01 = 1/(4γ₂³)."""
    assert table.a01 == pytest.approx(-1.0 / (4.0 * res.gamma1**3), abs=1e-9)
    assert table.c01 == pytest.approx(1.0 / (4.0 * res.gamma2**3), abs=1e-9)


def _kato_basis(eps, delta, res):
    P = projector(eps, delta, default_contour(res), "expanded3", K_SMALL, res)
    kt = kato_transform(P, exact_projector(res, K_SMALL))
    b = basis_vectors(res, K_SMALL)
    return kt.apply(b.U1), kt.apply(b.U2)


def _series_basis(eps, delta, corrections):
    out = []
    for j in (1, 2):
        terms = [eps ** a[0] * delta ** a[1] * v.entries for (i, a), v in corrections.items() if i == j]
        out.append(np.sum(terms, axis=0))
    return out


@pytest.mark.timeout(300)
def test_eigvec_corrections_third_order(res):
    """Σ_{m+n≤3} εᵐδⁿU_j^{(m,n)} vs 𝓚U_j: resto O(r⁴) quando (ε, δ) cai pela metade."""
    corrections = get_engine(K_SMALL, 128).eigvec_corrections()
    errors = []
    for eps, delta in [(0.04, 0.02), (0.02, 0.01)]:
        direct = _kato_basis(eps, delta, res)
        series = _series_basis(eps, delta, corrections)
        errors.append(max(float(np.max(np.abs(d.entries - s))) for d, s in zip(direct, series)))
    assert errors[0] < 1e-4
    assert errors[1] < errors[0] / 10.0


@pytest.mark.timeout(300)
def test_corrections_fixed_by_reversal(engine):
    """R V_j^{(m,n)} = V_j^{(m,n)} para todas as correções."""
    for key, v in engine.normalized_corrections().items():
        assert np.max(np.abs(reversal(v).entries - v.entries)) < 1e-10, key


@pytest.mark.timeout(120)
def test_kato_transform_is_symplectic(res):
    """(J𝓚U_i, 𝓚U_j) preserva −4πiγ₁, 4πiγ₂ e termos cruzados nulos."""
    u1, u2 = _kato_basis(0.05, 0.01, res)
    assert abs(symplectic_pairing(u1, u1) + 4j * np.pi * res.gamma1) < 1e-10
    assert abs(symplectic_pairing(u2, u2) - 4j * np.pi * res.gamma2) < 1e-10
    assert abs(symplectic_pairing(u1, u2)) < 1e-10
    assert abs(symplectic_pairing(u2, u1)) < 1e-10


@pytest.mark.timeout(300)
def test_reduced_series_cached(engine):
    first = engine.reduced_series()
    assert engine.reduced_series() is first
    assert np.allclose(reduced_matrix(0.0, 0.0, engine), first[(0, 0)])


@pytest.mark.timeout(300)
def test_minimum_truncation_reproduces_default(table):
    """Correções vivem em |k| ≤ 5: K = 8 e K = 32 dão a mesma tabela."""
    small = get_table(8, 128).to_dict()
    for name, v in table.to_dict().items():
        assert small[name] == pytest.approx(v, abs=1e-10), name
