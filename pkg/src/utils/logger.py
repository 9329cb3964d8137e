"""
src/utils/logger.py
-------------------

Logger utilitário com formatação consistente, nível configurável por variáveis
de ambiente e saída em stderr (stdout fica reservado para JSON/CSV da CLI).

Configuração por ENV
--------------------
- LOG_LEVEL   : nível mínimo de log (DEBUG, INFO, WARNING, ERROR, CRITICAL).
                Default = INFO.
- LOG_FMT     : formato customizado (opcional).
- LOG_DATEFMT : formato da data (opcional).

Exemplo de uso
--------------
    from src.utils.logger import get_logger, log_stage

    log = get_logger(__name__)
    log_stage(log, "Resonance", beta_star=2.7275, residual=1e-16)
    # -> "... | INFO | src.stability.dispersion | Resonance | beta_star=2.7275 | residual=1e-16"
"""

from __future__ import annotations

import logging
import os
import sys
from typing import Any, Optional

_DEFAULT_FMT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
_DEFAULT_DATEFMT = "%Y-%m-%d %H:%M:%S"


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    Retorna um logger configurado com handler único (stderr) e formato consistente.

    Parameters
    ----------
    name : Optional[str]
        Nome do logger (geralmente __name__). Se None, usa "stability".

    Returns
    -------
    logging.Logger
        Instância pronta para uso, com nível e formato definidos por env.
    """
    # 1) Nível a partir de LOG_LEVEL (tolerante a valores inválidos)
    level_str = (os.getenv("LOG_LEVEL") or "INFO").strip().upper()
    level = getattr(logging, level_str, logging.INFO)

    # 2) Formato
    log_fmt = os.getenv("LOG_FMT") or _DEFAULT_FMT
    date_fmt = os.getenv("LOG_DATEFMT") or _DEFAULT_DATEFMT

    # 3) Logger nomeado
    logger = logging.getLogger(name or "stability")

    # 4) Handler único mesmo com reimportações
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(fmt=log_fmt, datefmt=date_fmt))
        logger.addHandler(handler)
        logger.propagate = False

    # 5) Nível reaplicado a cada chamada (permite trocar LOG_LEVEL em runtime)
    logger.setLevel(level)
    return logger


def _fmt_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, complex):
        return f"{value.real:.6g}{value.imag:+.6g}j"
    return str(value)


def log_stage(
    logger: logging.Logger, stage: str, level: int = logging.INFO, **fields: Any
) -> None:
    """
    Emite uma linha de etapa no padrão "Etapa | chave=valor | ...".

    Parameters
    ----------
    logger : logging.Logger
        Logger de destino.
    stage : str
        Nome curto da etapa (ex.: "Projector", "Coeffs").
    level : int
        Nível de log. Default = INFO.
    **fields
        Pares chave/valor anexados na ordem em que foram passados.
    """
    if not logger.isEnabledFor(level):
        return
    parts = [stage] + [f"{k}={_fmt_value(v)}" for k, v in fields.items()]
    logger.log(level, " | ".join(parts))
