#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Acceptance test do toolkit de instabilidade transversal.

Objetivo
--------
Executa os critérios de aceitação e exibe, para cada um:
- índice e nome do critério
- PASS/FAIL
- valor medido (desvios, inclinações, resíduos)
- tempo de execução

Uso
---
# Execução padrão (todos os critérios, K=32, 128 nós):
python scripts/acceptance_test.py

# Selecionar critérios específicos (por índice 1..11):
python scripts/acceptance_test.py --only 1,5,7

# Truncamento degradado (sensibilidade):
python scripts/acceptance_test.py --k-max 8

# Exportar um resumo em JSON:
python scripts/acceptance_test.py --json out/acceptance_results.json
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

# Garante import de 'src' quando rodar fora do pytest
REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from src.stability.acceptance import CRITERIA, format_report, run_acceptance  # noqa: E402
from src.stability.pipeline import PIPELINE_VERSION  # noqa: E402
from src.utils.config import load_config  # noqa: E402


def _select(indices_csv: Optional[str]) -> Optional[List[int]]:
    """Converte '1,3,6' em índices válidos (None = todos)."""
    if not indices_csv:
        return None
    valid = {c[0] for c in CRITERIA}
    out: List[int] = []
    for tok in indices_csv.split(","):
        tok = tok.strip()
        if tok.isdigit() and int(tok) in valid:
            out.append(int(tok))
    return out or None


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    p = argparse.ArgumentParser(
        prog="acceptance_test",
        description="Executa os critérios de aceitação e imprime PASS/FAIL com os valores medidos.",
    )
    p.add_argument("--only", default=None, help="Lista de índices (1..11), ex.: '1,3,5'. Default: todos.")
    p.add_argument("--k-max", type=int, default=None, help="Truncamento K. Default: 32.")
    p.add_argument("--nodes", type=int, default=None, help="Nós do contorno. Default: 128.")
    p.add_argument("--config", default=None, help="Arquivo chave=valor com campos do RunConfig.")
    p.add_argument("--json", dest="json_out", default=None, help="Caminho para salvar um resumo em JSON.")
    return p.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    cfg = load_config(args.config, k_max=args.k_max, contour_nodes=args.nodes)

    print(f"\n== Acceptance Test | pipeline v{PIPELINE_VERSION} ==")
    print(f"K={cfg.k_max} | nodes={cfg.contour_nodes} | eps_list={cfg.eps_list}\n")

    try:
        results = run_acceptance(cfg, _select(args.only))
    except KeyboardInterrupt:
        print("\nInterrompido pelo usuário (Ctrl+C).")
        # 130 é um código comum para SIGINT
        return 130

    print(format_report(results))

    if args.json_out:
        out_path = Path(args.json_out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with out_path.open("w", encoding="utf-8") as f:
            json.dump(results, f, ensure_ascii=False, indent=2)
        print(f"\nResumo salvo em: {out_path}")

    failures = sum(1 for r in results if not r["passed"])
    if failures:
        print(f"\nConcluído com {failures} critério(s) em FAIL.")
        return 1

    print("\nConcluído com sucesso")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
