"""
Orquestração cacheada dos cálculos expostos pela CLI.

Princípios de projeto
---------------------
- Motores perturbativos e tabelas de coeficientes ficam em cache por
  (k_max, contour_nodes); `reset_cache()` limpa tudo.
- Documentos de saída contêm apenas resultados (determinísticos, 12 dígitos
  significativos); metadados de execução (started_at_utc, ended_at_utc,
  latency_ms) vão só para o log.
- Funções de conveniência:
    - `run_resonance()`     → documento de constantes da ressonância.
    - `run_coeffs(cfg)`     → tabela de coeficientes + isola + certificado.
    - `run_isola(cfg, eps)` → DataFrame assintótico vs. direto.
    - `run_dn_coeffs(beta, k)` → multiplicadores R_0…R_3 e formas fechadas.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager
from datetime import datetime, timezone
from threading import Lock
from typing import Any, Dict, Iterator, List, Optional, Tuple, TypedDict

import numpy as np
import pandas as pd

# Logger (com fallback a logging básico)
try:
    from src.utils.logger import get_logger

    _log = get_logger(__name__)
except Exception:  # pragma: no cover - fallback simples
    import logging

    logging.basicConfig(level=os.getenv("LOG_LEVEL", "INFO"))
    _log = logging.getLogger(__name__)

from src.stability.dispersion import (
    GAP_K_MAX,
    ResonanceData,
    omega,
    omega_dbeta,
    solve_resonance,
    spectral_gap,
)
from src.stability.dn_operator import (
    closed_form_B,
    closed_form_C,
    closed_form_D3,
    hierarchy_multipliers,
)
from src.stability.instability_analysis import (
    EPS_MAX,
    certify_b30,
    eigenvalues,
    ellipse_constants,
    isola_params,
    theta_grid,
)
from src.stability.kato_engine import (
    CoeffTable,
    ContourSpec,
    PerturbativeEngine,
    default_contour,
    reduced_matrix_direct,
)
from src.stability.series_algebra import reconstruct_pq
from src.stability.stokes_coeffs import reference_pq
from src.utils.config import RunConfig
from src.utils.errors import DomainError
from src.utils.parallel import ordered_map

__all__ = [
    "PIPELINE_VERSION",
    "SCHEMA_VERSION",
    "ISOLA_COLUMNS",
    "DN_COLUMNS",
    "get_engine",
    "get_table",
    "reset_cache",
    "round_sig",
    "run_resonance",
    "run_coeffs",
    "run_isola",
    "run_dn_coeffs",
    "direct_eigenvalue",
    "a01_c01_identity",
]

PIPELINE_VERSION = "1.0.0"
SCHEMA_VERSION = "1"
SIG_DIGITS = 12
DIRECT_MODE = "direct-beta"

ISOLA_COLUMNS = ["theta", "delta", "re_lambda_plus", "im_lambda_plus", "re_direct", "im_direct"]
DN_COLUMNS = ["order", "offset", "k", "beta", "hierarchy", "closed_form", "abs_diff"]


class ResonanceDoc(TypedDict):
    schema_version: str
    beta_star: float
    sigma: float
    gamma1: float
    gamma2: float
    spectral_gap: float


class CoeffsDoc(TypedDict):
    schema_version: str
    k_max: int
    contour_nodes: int
    coefficients: Dict[str, float]
    forbidden_max: float
    kappa0: float
    kappa1: float
    ellipse: Dict[str, float]
    identity: Dict[str, float]
    pq_max_deviation: float
    certificate: Dict[str, Any]


# Utilitários


def _utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


@contextmanager
def _timed(stage: str, **fields: Any) -> Iterator[Dict[str, Any]]:
    """Registra started/ended/latency de uma etapa; relança exceções após log."""
    meta: Dict[str, Any] = {"started_at_utc": _utcnow_iso(), "pipeline_version": PIPELINE_VERSION}
    try:
        yield meta
    except Exception:
        _log.exception("%s | erro", stage)
        raise
    meta["ended_at_utc"] = _utcnow_iso()
    try:
        start = datetime.fromisoformat(meta["started_at_utc"])
        end = datetime.fromisoformat(meta["ended_at_utc"])
        meta["latency_ms"] = int((end - start).total_seconds() * 1000)
    except Exception:
        meta["latency_ms"] = None
    extras = " | ".join(f"{k}={v}" for k, v in fields.items())
    _log.info(
        "%s | %s | latency_ms=%s | version=%s",
        stage,
        extras or "-",
        meta["latency_ms"],
        PIPELINE_VERSION,
    )


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    """Arredonda para `digits` dígitos significativos (0, nan e inf intactos)."""
    x = float(x)
    if x == 0 or not math.isfinite(x):
        return x
    return float(f"{x:.{digits}g}")


def _round_dict(d: Dict[str, Any]) -> Dict[str, Any]:
    return {k: round_sig(v) if isinstance(v, float) else v for k, v in d.items()}


# Cache de motores


_ENGINES: Dict[Tuple[int, int], PerturbativeEngine] = {}
_TABLES: Dict[Tuple[int, int], CoeffTable] = {}
_CACHE_LOCK = Lock()


def get_engine(k_max: int = 32, nodes: int = 128) -> PerturbativeEngine:
    """Obtém (ou cria) o motor perturbativo em cache."""
    key = (int(k_max), int(nodes))
    if key not in _ENGINES:
        with _CACHE_LOCK:
            if key not in _ENGINES:
                res = solve_resonance()
                _ENGINES[key] = PerturbativeEngine(res, k_max, default_contour(res, nodes))
    return _ENGINES[key]


def get_table(k_max: int = 32, nodes: int = 128) -> CoeffTable:
    """Tabela de coeficientes em cache."""
    key = (int(k_max), int(nodes))
    if key not in _TABLES:
        engine = get_engine(*key)
        with _CACHE_LOCK:
            if key not in _TABLES:
                _TABLES[key] = engine.extract_coeff_table()
    return _TABLES[key]


def reset_cache() -> None:
    """Limpa motores e tabelas em cache."""
    with _CACHE_LOCK:
        _ENGINES.clear()
        _TABLES.clear()
    _log.info("Pipeline cache resetado.")


# Resonance


def run_resonance() -> ResonanceDoc:
    with _timed("run_resonance"):
        res = solve_resonance()
        doc = ResonanceDoc(
            schema_version=SCHEMA_VERSION,
            beta_star=res.beta_star,
            sigma=res.sigma,
            gamma1=res.gamma1,
            gamma2=res.gamma2,
            spectral_gap=spectral_gap(res, GAP_K_MAX),
        )
    return _round_dict(doc)  # type: ignore[return-value]


# Coeffs


def a01_c01_identity(table: CoeffTable, res: ResonanceData) -> Tuple[float, float]:
    """
    (a01·c01 numérico, Ω′(−2)Ω′(1)/(4(2+σ)(σ−1))), com Ω′ = ∂Ω/∂β em β*.

    Como Ω(−2) = γ₂² e Ω(1) = γ₁², o lado direito vale −1/(16γ₁³γ₂³) < 0.
    """
    beta, sigma = res.beta_star, res.sigma
    closed = omega_dbeta(-2, beta) * omega_dbeta(1, beta) / (4.0 * (2.0 + sigma) * (sigma - 1.0))
    return float(table.a01 * table.c01), float(closed)


def run_coeffs(cfg: RunConfig) -> CoeffsDoc:
    """
    Etapas
    ------
    1) Tabela de coeficientes (motor perturbativo, verificação de padrão nulo).
    2) κ₀, κ₁ e constantes da elipse.
    3) Identidade a01·c01 e desvio de p, q em relação à transcrição.
    4) Certificado exato de b30.
    """
    with _timed("run_coeffs", k_max=cfg.k_max, nodes=cfg.contour_nodes):
        res = solve_resonance()
        # 1)
        table = get_table(cfg.k_max, cfg.contour_nodes)
        # 2)
        params = isola_params(table)
        ellipse = ellipse_constants(params, res.sigma)
        # 3)
        product, closed = a01_c01_identity(table, res)
        p, q, qz = reconstruct_pq(cfg.profile)
        ref = reference_pq(cfg.profile)
        deviation = max(a.max_abs_difference(b) for a, b in zip((p, q, qz), ref))
        # 4)
        cert = certify_b30()

        doc = CoeffsDoc(
            schema_version=SCHEMA_VERSION,
            k_max=cfg.k_max,
            contour_nodes=cfg.contour_nodes,
            coefficients=_round_dict(table.to_dict()),
            forbidden_max=round_sig(table.forbidden_max),
            kappa0=round_sig(params.kappa0),
            kappa1=round_sig(params.kappa1),
            ellipse=_round_dict(ellipse),
            identity=_round_dict(
                {"a01_c01": product, "closed_form": closed, "residual": abs(product - closed)}
            ),
            pq_max_deviation=round_sig(float(deviation)),
            certificate={
                "verdict": cert["verdict"],
                "gcd_degree": cert["gcd_degree"],
                "b30_numeric": round_sig(cert["b30_numeric"]),
                "gamma1_bracket": [round_sig(x) for x in cert["gamma1_bracket"]],
            },
        )
    return doc


# Isola


def direct_eigenvalue(
    eps: float,
    delta: float,
    contour: ContourSpec,
    k_max: int,
    res: ResonanceData,
    mode: str = DIRECT_MODE,
) -> complex:
    """λ₊ da matriz reduzida direta (maior parte real, depois maior parte imaginária)."""
    L = reduced_matrix_direct(eps, delta, contour, mode, k_max, res)  # type: ignore[arg-type]
    vals = np.linalg.eigvals(L)
    return complex(max(vals, key=lambda z: (round(z.real, 15), z.imag)))


def run_isola(
    cfg: RunConfig,
    eps: float,
    n_theta: Optional[int] = None,
    with_direct: bool = True,
    theta_window: float = 1.0,
) -> pd.DataFrame:
    """
    Pontos da isola em δ = κ₀ε² + θε³.

    Parameters
    ----------
    cfg : RunConfig
    eps : float
        Amplitude em (0, 0.1].
    n_theta : int, optional
        Pontos θ (default cfg.theta_grid).
    with_direct : bool
        Se False, colunas *_direct ficam NaN (sem quadratura).
    theta_window : float
        Fração de κ₁ usada na grade (1.0 = janela inteira).

    Returns
    -------
    pd.DataFrame
        Colunas fixas `ISOLA_COLUMNS`, uma linha por θ.
    """
    n = int(n_theta or cfg.theta_grid)
    if not 0 < eps <= EPS_MAX:
        raise DomainError(f"eps deve estar em (0, {EPS_MAX}] (recebido {eps})")
    with _timed("run_isola", eps=eps, n_theta=n, direct=with_direct):
        res = solve_resonance()
        table = get_table(cfg.k_max, cfg.contour_nodes)
        params = isola_params(table)
        thetas = theta_grid(params.kappa1 * theta_window, n)
        deltas = params.kappa0 * eps**2 + thetas * eps**3
        asym = [eigenvalues(eps, float(d), table, res.sigma)[0] for d in deltas]

        if with_direct:
            contour = default_contour(res, cfg.contour_nodes)
            direct = ordered_map(
                lambda d: direct_eigenvalue(eps, float(d), contour, cfg.k_max, res), list(deltas)
            )
        else:
            direct = [complex(np.nan, np.nan)] * n

        df = pd.DataFrame(
            {
                "theta": thetas,
                "delta": deltas,
                "re_lambda_plus": [z.real for z in asym],
                "im_lambda_plus": [z.imag for z in asym],
                "re_direct": [z.real for z in direct],
                "im_direct": [z.imag for z in direct],
            },
            columns=ISOLA_COLUMNS,
        )
    return df


# DN multipliers


def _closed_form_for(order: int, offset: int, k: int, beta: float) -> float:
    if order == 0 and offset == 0:
        return float(omega(k, beta))
    forms = {
        (1, -1): lambda: closed_form_C(k, beta, "-"),
        (1, 1): lambda: closed_form_C(k, beta, "+"),
        (2, -2): lambda: closed_form_B(k, beta, "-"),
        (2, 0): lambda: closed_form_B(k, beta, "0"),
        (2, 2): lambda: closed_form_B(k, beta, "+"),
        (3, -3): lambda: closed_form_D3(k, beta, "-"),
        (3, 3): lambda: closed_form_D3(k, beta, "+"),
    }
    fn = forms.get((order, offset))
    return float(fn()) if fn else float("nan")


def run_dn_coeffs(beta: float, k: int) -> pd.DataFrame:
    """
    Todos os deslocamentos de R_0…R_3 no modo de saída k, pela hierarquia e
    pelas formas fechadas (NaN onde não há forma fechada).
    """
    with _timed("run_dn_coeffs", beta=beta, k=k):
        tables = hierarchy_multipliers(beta, (k, k))
        rows: List[Dict[str, Any]] = []
        for table in tables:
            for offset in table.offsets:
                h = float(table.coeff(offset, k))
                cf = _closed_form_for(table.order, offset, k, beta)
                rows.append(
                    {
                        "order": table.order,
                        "offset": offset,
                        "k": k,
                        "beta": round_sig(beta),
                        "hierarchy": round_sig(h),
                        "closed_form": round_sig(cf),
                        "abs_diff": round_sig(abs(h - cf)) if math.isfinite(cf) else float("nan"),
                    }
                )
    return pd.DataFrame(rows, columns=DN_COLUMNS)
