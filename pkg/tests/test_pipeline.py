"""
Testes da orquestração cacheada (pipeline).

Critérios validados
-------------------
- `run_resonance()` devolve constantes com 12 dígitos e gap espectral.
- `run_dn_coeffs()` cobre todos os deslocamentos de R_0…R_3 com colunas fixas;
  diferença hierarquia − forma fechada < 1e-11 onde há forma fechada.
- `run_isola(..., with_direct=False)` gera a grade θ sem quadratura.
- ε fora de (0, 0.1] é rejeitado antes de qualquer cálculo.
- Identidade a01·c01 = −1/(16γ₁³γ₂³) nos valores de referência.
- `reset_cache()` esvazia os caches.
"""

import math

import numpy as np
import pytest

from src.stability import pipeline
from src.stability.acceptance import GOLDEN
from src.stability.dispersion import solve_resonance
from src.stability.kato_engine import CoeffTable
from src.utils.config import RunConfig
from src.utils.errors import DomainError


def test_run_resonance():
    doc = pipeline.run_resonance()
    assert doc["schema_version"] == pipeline.SCHEMA_VERSION
    for key in ("beta_star", "sigma", "gamma1", "gamma2"):
        assert round(doc[key], 10) == GOLDEN[key], key
    assert doc["spectral_gap"] == pytest.approx(0.759958147884, abs=1e-11)


def test_round_sig():
    assert pipeline.round_sig(1.23456789012345) == 1.23456789012
    assert pipeline.round_sig(0.0) == 0.0
    assert math.isnan(pipeline.round_sig(float("nan")))


def test_run_dn_coeffs():
    beta = solve_resonance().beta_star
    df = pipeline.run_dn_coeffs(beta, 3)
    assert list(df.columns) == pipeline.DN_COLUMNS
    assert len(df) == 1 + 2 + 3 + 4
    with_form = df[df["closed_form"].notna()]
    assert len(with_form) == 8
    assert (with_form["abs_diff"] < 1e-11).all()
    no_form = df[df["closed_form"].isna()]
    assert set(zip(no_form["order"], no_form["offset"])) == {(3, -1), (3, 1)}


def test_run_dn_coeffs_rejects_beta():
    with pytest.raises(DomainError):
        pipeline.run_dn_coeffs(-1.0, 0)


@pytest.mark.timeout(300)
def test_run_isola_without_direct():
    cfg = RunConfig()
    df = pipeline.run_isola(cfg, 0.01, n_theta=11, with_direct=False)
    assert list(df.columns) == pipeline.ISOLA_COLUMNS
    assert len(df) == 11
    assert df["re_direct"].isna().all()
    assert df["theta"].is_monotonic_increasing
    assert np.isclose(df["theta"].iloc[5], 0.0, atol=1e-12)
    assert df["re_lambda_plus"].iloc[5] > 0


@pytest.mark.parametrize("eps", [0.0, 0.5, -0.01])
def test_run_isola_rejects_eps(eps):
    with pytest.raises(DomainError):
        pipeline.run_isola(RunConfig(), eps, with_direct=False)


def test_a01_c01_identity():
    names = ("a01", "a20", "a02", "a21", "a03", "b30", "c01", "c20", "c02", "c21", "c03")
    table = CoeffTable(**{k: GOLDEN[k] for k in names})
    product, closed = pipeline.a01_c01_identity(table, solve_resonance())
    assert product < 0
    assert product == pytest.approx(closed, abs=1e-10)


def test_a01_c01_closed_form_matches_gammas():
    """Ω′(−2)Ω′(1)/(4(2+σ)(σ−1)) com Ω′ = ∂Ω/∂β reduz a −1/(16γ₁³γ₂³)."""
    res = solve_resonance()
    names = ("a01", "a20", "a02", "a21", "a03", "b30", "c01", "c20", "c02", "c21", "c03")
    _, closed = pipeline.a01_c01_identity(CoeffTable(**{k: GOLDEN[k] for k in names}), res)
    assert type(closed) is float
    assert closed == pytest.approx(-1.0 / (16.0 * res.gamma1**3 * res.gamma2**3), rel=1e-12)


def test_reset_cache():
    saved_engines, saved_tables = dict(pipeline._ENGINES), dict(pipeline._TABLES)
    try:
        pipeline.reset_cache()
        assert not pipeline._ENGINES and not pipeline._TABLES
    finally:
        pipeline._ENGINES.update(saved_engines)
        pipeline._TABLES.update(saved_tables)
