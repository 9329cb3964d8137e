#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
CLI do toolkit de instabilidade transversal de ondas de Stokes.

Subcomandos
-----------
- resonance                 : β*, σ, γ₁, γ₂ e gap espectral (JSON)
- coeffs                    : tabela de coeficientes, κ₀, κ₁, elipse e certificado (JSON)
- isola --eps V [--svg]     : pontos assintóticos vs. diretos da isola (CSV [+ SVG])
- dn-coeffs --beta V --k K  : multiplicadores R_0…R_3 e formas fechadas (CSV)
- validate                  : suíte de aceitação com PASS/FAIL por critério

Flags globais
-------------
--k-max, --nodes, --out, --format {json,csv}, --config <arquivo chave=valor>

Códigos de saída
----------------
0 ok | 1 entrada inválida | 2 falha numérica | 3 consistência | 4 certificado | 130 Ctrl+C

Uso
---
python -m src.cli resonance
python -m src.cli --k-max 24 coeffs
python -m src.cli isola --eps 0.01 --svg
python -m src.cli dn-coeffs --beta 2.7275 --k 3 --format json
python -m src.cli validate
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import pandas as pd
from dotenv import load_dotenv

# Garante import de 'src' quando rodar como script
REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from src.stability import pipeline  # noqa: E402
from src.stability.acceptance import format_report, run_acceptance  # noqa: E402
from src.stability.dispersion import solve_resonance  # noqa: E402
from src.stability.instability_analysis import isola_params  # noqa: E402
from src.utils.config import RunConfig, load_config  # noqa: E402
from src.utils.errors import exit_code_for  # noqa: E402
from src.utils.logger import get_logger  # noqa: E402
from src.utils.svg import write_isola_svg  # noqa: E402

_log = get_logger(__name__)


# Emissão


def _json_text(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _json_value(v: Any) -> Any:
    if isinstance(v, float):
        return None if math.isnan(v) else pipeline.round_sig(v)
    return v


def _flatten(doc: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for k, v in doc.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out[key] = ";".join(str(x) for x in v)
        else:
            out[key] = v
    return out


def _emit_doc(doc: Dict[str, Any], cfg: RunConfig, stem: str) -> Path:
    """Documento (dict) em JSON ou CSV chave,valor; grava e ecoa em stdout."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    if cfg.format == "json":
        text = _json_text(doc)
        path = cfg.output_dir / f"{stem}.json"
    else:
        flat = _flatten(doc)
        frame = pd.DataFrame({"key": list(flat), "value": list(flat.values())})
        text = frame.to_csv(index=False, lineterminator="\n")
        path = cfg.output_dir / f"{stem}.csv"
    path.write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return path


def _emit_frame(df: pd.DataFrame, cfg: RunConfig, stem: str) -> Path:
    """Tabela em CSV (cabeçalho fixo) ou JSON {schema_version, rows}."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    if cfg.format == "csv":
        text = df.to_csv(index=False, lineterminator="\n", float_format="%.12g")
        path = cfg.output_dir / f"{stem}.csv"
    else:
        rows = [
            {k: _json_value(v) for k, v in row.items()}
            for row in df.to_dict(orient="records")
        ]
        text = _json_text({"schema_version": pipeline.SCHEMA_VERSION, "rows": rows})
        path = cfg.output_dir / f"{stem}.json"
    path.write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return path


# Comandos


def cmd_resonance(cfg: RunConfig, args: argparse.Namespace) -> int:
    _emit_doc(dict(pipeline.run_resonance()), cfg, "resonance")
    return 0


def cmd_coeffs(cfg: RunConfig, args: argparse.Namespace) -> int:
    _emit_doc(dict(pipeline.run_coeffs(cfg)), cfg, "coeffs")
    return 0


def cmd_isola(cfg: RunConfig, args: argparse.Namespace) -> int:
    # isola é tabular: CSV salvo pedido explícito de JSON
    if args.format is None:
        cfg = cfg.model_copy(update={"format": "csv"})
    df = pipeline.run_isola(cfg, args.eps)
    stem = f"isola_eps{args.eps:g}"
    _emit_frame(df, cfg, stem)

    if args.svg:
        res = solve_resonance()
        params = isola_params(pipeline.get_table(cfg.k_max, cfg.contour_nodes))
        path = write_isola_svg(
            cfg.output_dir / f"{stem}.svg",
            asymptotic=[complex(r, i) for r, i in zip(df["re_lambda_plus"], df["im_lambda_plus"])],
            direct=[complex(r, i) for r, i in zip(df["re_direct"], df["im_direct"])],
            eps=args.eps,
            sigma=res.sigma,
            center_drift=params.center_drift,
            semi_minor=params.semi_minor,
            semi_major=params.semi_major,
            title=f"isola eps={args.eps:g} K={cfg.k_max}",
        )
        _log.info("SVG gravado em %s", path)
    return 0


def cmd_dn_coeffs(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.format is None:
        cfg = cfg.model_copy(update={"format": "csv"})
    df = pipeline.run_dn_coeffs(args.beta, args.k)
    _emit_frame(df, cfg, f"dn_coeffs_beta{args.beta:g}_k{args.k}")
    return 0


def cmd_validate(cfg: RunConfig, args: argparse.Namespace) -> int:
    only = [int(tok) for tok in args.only.split(",") if tok.strip()] if args.only else None
    print(f"\n== Acceptance | pipeline v{pipeline.PIPELINE_VERSION} | K={cfg.k_max} "
          f"| nodes={cfg.contour_nodes} ==\n")
    results = run_acceptance(cfg, only)
    print(format_report(results))
    failures = sum(1 for r in results if not r["passed"])
    total = sum(r["seconds"] for r in results)
    if failures:
        print(f"\nConcluído com {failures} falha(s) em {total:.1f}s.")
        return 1
    print(f"\nConcluído com sucesso em {total:.1f}s.")
    return 0


COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace], int]] = {
    "resonance": cmd_resonance,
    "coeffs": cmd_coeffs,
    "isola": cmd_isola,
    "dn-coeffs": cmd_dn_coeffs,
    "validate": cmd_validate,
}


# Argumentos


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    p = argparse.ArgumentParser(
        prog="stokes-transverse",
        description="Instabilidade transversal de ondas de Stokes: constantes, coeficientes e isola.",
    )
    p.add_argument("--k-max", type=int, default=None, help="Truncamento K (default 32).")
    p.add_argument("--nodes", type=int, default=None, help="Nós do contorno Γ (default 128).")
    p.add_argument("--out", default=None, help="Diretório de saída (default 'out').")
    p.add_argument("--format", choices=("json", "csv"), default=None, help="Formato de saída.")
    p.add_argument("--config", default=None, help="Arquivo chave=valor com campos do RunConfig.")

    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("resonance", help="Constantes da ressonância.")
    sub.add_parser("coeffs", help="Tabela de coeficientes e certificado de b30.")
    iso = sub.add_parser("isola", help="Isola assintótica vs. direta.")
    iso.add_argument("--eps", type=float, required=True, help="Amplitude ε em (0, 0.1].")
    iso.add_argument("--svg", action="store_true", help="Também grava a figura SVG.")
    dn = sub.add_parser("dn-coeffs", help="Multiplicadores R_0…R_3 em (β, k).")
    dn.add_argument("--beta", type=float, required=True, help="β > 0.")
    dn.add_argument("--k", type=int, required=True, help="Número de onda de saída.")
    val = sub.add_parser("validate", help="Suíte de aceitação.")
    val.add_argument("--only", default=None, help="Critérios, ex.: '1,5,7'. Default: todos.")
    return p.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv(override=False)
    try:
        args = parse_args(argv)
    except SystemExit as e:
        # argparse: 0 para --help, 2 para erro de uso → contrato: 1
        return 0 if e.code in (0, None) else 1

    try:
        cfg = load_config(
            args.config,
            k_max=args.k_max,
            contour_nodes=args.nodes,
            output_dir=args.out,
            format=args.format,
        )
        return COMMANDS[args.command](cfg, args)
    except KeyboardInterrupt:
        print("\nInterrompido pelo usuário (Ctrl+C).", file=sys.stderr)
        return 130
    except Exception as e:
        code = exit_code_for(e)
        _log.error("%s | %s: %s | exit=%d", args.command, type(e).__name__, e, code)
        return code


if __name__ == "__main__":
    raise SystemExit(main())
