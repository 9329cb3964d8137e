"""
Critérios de aceitação como verificações executáveis (usados por `validate`).

Cada critério devolve um `CriterionResult` com o valor medido, o limite de
tempo e o veredito; falhas numéricas viram FAIL com a mensagem da exceção em
vez de interromper a suíte.

Uso
---
    from src.stability.acceptance import run_acceptance, format_report
    results = run_acceptance(cfg)
    print(format_report(results))
"""

from __future__ import annotations

import time
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypedDict

import numpy as np
from tabulate import tabulate

from src.stability.dispersion import omega, solve_resonance
from src.stability.dn_operator import closed_form_B, closed_form_C, closed_form_D3, hierarchy_multipliers
from src.stability.instability_analysis import certify_b30, discriminant, ellipse_constants, isola_params
from src.stability.kato_engine import (
    default_contour,
    exact_projector,
    kato_transform,
    projector,
    reduced_matrix_direct,
)
from src.stability.operator_assembly import (
    assemble_H,
    basis_vectors,
    reversibility_defect,
    symplectic_pairing,
)
from src.stability.pipeline import a01_c01_identity, get_engine, get_table, run_isola
from src.stability.series_algebra import reconstruct_pq
from src.stability.stokes_coeffs import check_stokes_residuals, check_zeta_consistency, reference_pq
from src.utils.config import RunConfig
from src.utils.errors import StabilityError
from src.utils.logger import get_logger, log_stage

_log = get_logger(__name__)

__all__ = ["CriterionResult", "CRITERIA", "GOLDEN", "SUPPORT_TABLE", "run_acceptance", "format_report"]


class CriterionResult(TypedDict):
    index: int
    name: str
    passed: bool
    measured: str
    seconds: float
    limit_s: Optional[float]


# Valores de referência

GOLDEN: Dict[str, float] = {
    "beta_star": 2.7275211479,
    "sigma": -0.3894887313,
    "gamma1": 1.3894887313,
    "gamma2": 1.6105112687,
    "a01": -0.0931912038,
    "a20": -0.4972909772,
    "a02": 0.0093753194,
    "a21": -0.0081152843,
    "a03": -0.0014671778,
    "b30": -0.4947603203,
    "c01": 0.0598478709,
    "c20": 1.08625864892,
    "c02": -0.0033359912,
    "c21": -0.0002576496,
    "c03": 0.0002892588,
    "x_coeff": 4.085,
    "y_coeff": 86.059,
    "center_drift": 0.467,
    "center": -0.389,
}

SUPPORT_TABLE: Dict[Tuple[int, Tuple[int, int]], Tuple[int, ...]] = {
    (1, (0, 0)): (1,),
    (1, (1, 0)): (0, 2),
    (1, (0, 1)): (1,),
    (1, (2, 0)): (-1, 1, 3),
    (1, (1, 1)): (0, 2),
    (1, (0, 2)): (1,),
    (1, (3, 0)): (-2, 0, 2, 4),
    (1, (2, 1)): (-1, 1, 3),
    (1, (1, 2)): (0, 2),
    (1, (0, 3)): (1,),
    (2, (0, 0)): (-2,),
    (2, (1, 0)): (-3, -1),
    (2, (0, 1)): (-2,),
    (2, (2, 0)): (-4, -2, 0),
    (2, (1, 1)): (-3, -1),
    (2, (0, 2)): (-2,),
    (2, (3, 0)): (-5, -3, -1, 1),
    (2, (2, 1)): (-4, -2, 0),
    (2, (1, 2)): (-3, -1),
    (2, (0, 3)): (-2,),
}

ORACLE_BETAS = (0.5, 1.0, None, 5.0)  # None = β*
ORACLE_K = (-12, 12)
ORACLE_TOL = 1e-11
SMALL_BETA = 1e-8
COEFF_TOL = 1e-8
STRUCT_TOL = 1e-10
HERMITIAN_TOL = 1e-12
ISOLA_WINDOW = 0.9
ISOLA_POINTS = 21

Check = Callable[[RunConfig], Tuple[bool, str]]


# 1) ressonância


def check_resonance(cfg: RunConfig) -> Tuple[bool, str]:
    res = solve_resonance()
    got = {"beta_star": res.beta_star, "sigma": res.sigma, "gamma1": res.gamma1, "gamma2": res.gamma2}
    worst = max(abs(round(v, 10) - GOLDEN[k]) for k, v in got.items())
    return worst < 1e-12, f"max |Δ| (10 casas) = {worst:.1e}"


# 2) multiplicadores: hierarquia vs formas fechadas


def _oracle_worst(beta: float) -> float:
    tables = hierarchy_multipliers(beta, ORACLE_K)
    ks = tables[0].ks
    pairs = [
        (tables[0].offsets[0], omega(ks, beta)),
        (tables[1].offsets[-1], closed_form_C(ks, beta, "-")),
        (tables[1].offsets[1], closed_form_C(ks, beta, "+")),
        (tables[2].offsets[-2], closed_form_B(ks, beta, "-")),
        (tables[2].offsets[0], closed_form_B(ks, beta, "0")),
        (tables[2].offsets[2], closed_form_B(ks, beta, "+")),
        (tables[3].offsets[-3], closed_form_D3(ks, beta, "-")),
        (tables[3].offsets[3], closed_form_D3(ks, beta, "+")),
    ]
    return max(float(np.max(np.abs(h - c))) for h, c in pairs)


def check_multipliers(cfg: RunConfig) -> Tuple[bool, str]:
    beta_star = solve_resonance().beta_star
    worst = max(_oracle_worst(b if b is not None else beta_star) for b in ORACLE_BETAS)
    small = hierarchy_multipliers(SMALL_BETA, ORACLE_K)[1:]
    small_max = max(float(np.max(np.abs(a))) for t in small for a in t.offsets.values())
    ok = worst < ORACLE_TOL and small_max < 1e-6
    return ok, f"oracle={worst:.1e}; beta=1e-8 max={small_max:.1e}"


# 3) reconstrução de p, q


def check_reconstruction(cfg: RunConfig) -> Tuple[bool, str]:
    got, ref = reconstruct_pq("exact"), reference_pq("exact")
    diff = max(a.max_abs_difference(b) for a, b in zip(got, ref))
    report = check_stokes_residuals(3)
    zeta_ok = check_zeta_consistency()
    ok = diff == 0 and report["exact_zero"] and zeta_ok
    return ok, f"pq diff={diff:g}; residuals exact={report['exact_zero']}; zeta={zeta_ok}"


# 4) suportes


def check_supports(cfg: RunConfig) -> Tuple[bool, str]:
    supports = get_engine(cfg.k_max, cfg.contour_nodes).supports()
    wrong = sorted(key for key, expected in SUPPORT_TABLE.items() if supports.get(key) != expected)
    return not wrong, f"{len(SUPPORT_TABLE)}/{len(SUPPORT_TABLE)}" if not wrong else f"divergentes: {wrong}"


# 5) tabela de coeficientes


def check_coefficients(cfg: RunConfig) -> Tuple[bool, str]:
    table = get_table(cfg.k_max, cfg.contour_nodes)
    values = table.to_dict()
    worst = max(abs(values[k] - GOLDEN[k]) for k in values)
    ok = worst < COEFF_TOL and table.forbidden_max < 1e-9
    return ok, f"max |Δ|={worst:.1e}; forbidden_max={table.forbidden_max:.1e}"


# 6) identidade a01·c01


def check_identity(cfg: RunConfig) -> Tuple[bool, str]:
    product, closed = a01_c01_identity(get_table(cfg.k_max, cfg.contour_nodes), solve_resonance())
    residual = abs(product - closed)
    return residual < 1e-10 and product < 0, f"a01·c01={product:.10f}; residual={residual:.1e}"


# 7) certificado


def check_certificate(cfg: RunConfig) -> Tuple[bool, str]:
    try:
        report = certify_b30()
    except StabilityError as e:
        return False, str(e)
    err = abs(report["b30_numeric"] - GOLDEN["b30"])
    ok = report["gcd_degree"] == 0 and err < 5e-9
    return ok, f"{report['verdict']}; b30={report['b30_numeric']:.10f}"


# 8) elipse


def check_ellipse(cfg: RunConfig) -> Tuple[bool, str]:
    res = solve_resonance()
    consts = ellipse_constants(isola_params(get_table(cfg.k_max, cfg.contour_nodes)), res.sigma)
    rounded = {k: round(consts[k], 3) for k in ("x_coeff", "y_coeff", "center_drift", "center")}
    ok = all(abs(rounded[k] - GOLDEN[k]) < 1e-9 for k in rounded)
    return ok, ", ".join(f"{k}={v:.3f}" for k, v in rounded.items())


# 9) ordem de precisão


def _slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def check_order(cfg: RunConfig) -> Tuple[bool, str]:
    eps_list = sorted(cfg.eps_list)
    if len(eps_list) < 2:
        return False, "eps_list precisa de ao menos dois valores"
    errors, growth = [], []
    for eps in eps_list:
        df = run_isola(cfg, eps, n_theta=ISOLA_POINTS, theta_window=ISOLA_WINDOW)
        direct = df["re_direct"].to_numpy() + 1j * df["im_direct"].to_numpy()
        asym = df["re_lambda_plus"].to_numpy() + 1j * df["im_lambda_plus"].to_numpy()
        errors.append(float(np.max(np.abs(direct - asym))))
        growth.append(float(df["re_direct"].max()))
    err_slope = _slope(eps_list, errors)
    growth_slope = _slope(eps_list, growth)
    ok = err_slope >= 3.6 and 2.85 <= growth_slope <= 3.15
    return ok, f"erro slope={err_slope:.3f}; Re λ slope={growth_slope:.3f}"


# 10) invariantes estruturais


def _other_k(k_max: int) -> int:
    return 24 if k_max != 24 else 32


def check_structure(cfg: RunConfig) -> Tuple[bool, str]:
    res = solve_resonance()
    K = cfg.k_max
    grid = (0.0, 0.05, -0.05)

    # 1) 𝓗 hermitiano e reversível
    herm = rev = 0.0
    for mode in ("expanded3", "direct-beta"):
        for eps in grid:
            for delta in grid:
                H = assemble_H(eps, delta, res, K, mode)  # type: ignore[arg-type]
                herm = max(herm, H.hermitian_defect())
                rev = max(rev, reversibility_defect(H))

    # 2) matriz reduzida, projetor e simpleticidade em (0.05, 0.01)
    contour = default_contour(res, cfg.contour_nodes)
    L = reduced_matrix_direct(0.05, 0.01, contour, "expanded3", K, res)
    reduced = max(float(np.max(np.abs(L.real))), abs(L[0, 1] + L[1, 0]))
    P = projector(0.05, 0.01, contour, "expanded3", K, res)
    idem = float(np.max(np.abs(P.matrix @ P.matrix - P.matrix)))
    trace = abs(np.trace(P.matrix) - 2.0)
    Kt = kato_transform(P, exact_projector(res, K))
    b = basis_vectors(res, K)
    u1, u2 = Kt.apply(b.U1), Kt.apply(b.U2)
    sympl = max(
        abs(symplectic_pairing(u1, u1) + 4j * np.pi * res.gamma1),
        abs(symplectic_pairing(u2, u2) - 4j * np.pi * res.gamma2),
        abs(symplectic_pairing(u1, u2)),
        abs(symplectic_pairing(u2, u1)),
    )

    # 3) convergência em K
    a = get_table(K, cfg.contour_nodes).to_dict()
    b2 = get_table(_other_k(K), cfg.contour_nodes).to_dict()
    trunc = max(abs(a[k] - b2[k]) for k in a)

    ok = (
        herm < HERMITIAN_TOL
        and rev < HERMITIAN_TOL
        and max(reduced, idem, trace, sympl, trunc) < STRUCT_TOL
    )
    measured = (
        f"herm={herm:.1e}; rev={rev:.1e}; L={reduced:.1e}; P²-P={idem:.1e}; "
        f"tr={trace:.1e}; J={sympl:.1e}; K{K} vs K{_other_k(K)}={trunc:.1e}"
    )
    return ok, measured


# 11) controle negativo


def check_negative_control(cfg: RunConfig) -> Tuple[bool, str]:
    table = get_table(cfg.k_max, cfg.contour_nodes).second_order()
    worst = max(
        discriminant(float(e), float(d), table)
        for e in np.linspace(0.0, 0.02, 21)
        for d in np.linspace(-0.05, 0.05, 41)
    )
    return worst <= 0.0, f"max Δ={worst:.1e}"


CRITERIA: List[Tuple[int, str, Check, Optional[float]]] = [
    (1, "Resonance constants", check_resonance, 0.1),
    (2, "Multiplier oracle", check_multipliers, 5.0),
    (3, "p, q reconstruction", check_reconstruction, 1.0),
    (4, "Wave-number supports", check_supports, None),
    (5, "Coefficient table", check_coefficients, 60.0),
    (6, "a01·c01 identity", check_identity, None),
    (7, "b30 certificate", check_certificate, 5.0),
    (8, "Ellipse constants", check_ellipse, None),
    (9, "Order of accuracy", check_order, 300.0),
    (10, "Structural invariants", check_structure, None),
    (11, "Negative control", check_negative_control, None),
]


def run_acceptance(cfg: RunConfig, only: Optional[Sequence[int]] = None) -> List[CriterionResult]:
    """
    Executa os critérios selecionados (todos por padrão), em ordem.

    Parameters
    ----------
    cfg : RunConfig
    only : sequence[int], optional
        Índices 1..11.

    Returns
    -------
    list[CriterionResult]
    """
    selected = set(only) if only else None
    results: List[CriterionResult] = []
    for index, name, check, limit in CRITERIA:
        if selected is not None and index not in selected:
            continue
        t0 = time.perf_counter()
        try:
            ok, measured = check(cfg)
        except (StabilityError, ValueError) as e:
            ok, measured = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - t0
        if limit is not None and elapsed > limit:
            ok = False
            measured += f" (tempo {elapsed:.2f}s > {limit:g}s)"
        results.append(
            CriterionResult(
                index=index, name=name, passed=ok, measured=measured, seconds=elapsed, limit_s=limit
            )
        )
        log_stage(_log, "Acceptance", index=index, passed=ok, seconds=elapsed)
    return results


def format_report(results: Sequence[CriterionResult]) -> str:
    rows = [
        [r["index"], r["name"], "PASS" if r["passed"] else "FAIL", f"{r['seconds']:.2f}", r["measured"]]
        for r in results
    ]
    return tabulate(rows, headers=["#", "criterion", "status", "s", "measured"], tablefmt="github")
