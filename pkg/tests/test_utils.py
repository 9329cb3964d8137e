"""
Testes dos utilitários transversais (logger, paralelismo, códigos de saída, SVG).

Critérios validados
-------------------
- LOG_LEVEL reaplicado a cada `get_logger`; handler único; linhas de etapa
  no formato "Etapa | chave=valor".
- `ordered_map` preserva a ordem para 1 ou N threads (STL_THREADS).
- `exit_code_for` segue o contrato 1/2/3/4.
- SVG da isola é um documento válido com elipse e pontos.
"""

import importlib
import logging

import pytest

from src.utils import errors, logger, parallel
from src.utils.svg import isola_svg, write_isola_svg


def test_logger_level_from_env(monkeypatch):
    monkeypatch.setenv("LOG_LEVEL", "DEBUG")
    importlib.reload(logger)
    log = logger.get_logger("stability.test")
    assert log.level == logging.DEBUG
    monkeypatch.setenv("LOG_LEVEL", "nao-existe")
    assert logger.get_logger("stability.test").level == logging.INFO
    assert len(log.handlers) == 1
    assert log.propagate is False


def test_log_stage_format(caplog):
    log = logging.getLogger("stability.stage")
    log.setLevel(logging.INFO)
    log.propagate = True
    with caplog.at_level(logging.INFO, logger="stability.stage"):
        logger.log_stage(log, "Projector", eps=0.05, nodes=128, quad_err=1.5e-12)
    assert caplog.messages == ["Projector | eps=0.05 | nodes=128 | quad_err=1.5e-12"]


@pytest.mark.parametrize("threads", ["1", "4", "abc"])
def test_ordered_map(monkeypatch, threads):
    monkeypatch.setenv("STL_THREADS", threads)
    assert parallel.max_workers() >= 1
    assert parallel.ordered_map(lambda x: x * x, range(20)) == [x * x for x in range(20)]


def test_exit_codes():
    assert errors.exit_code_for(errors.DomainError("x")) == 1
    assert errors.exit_code_for(errors.QuadratureError("x")) == 2
    assert errors.exit_code_for(errors.KatoNormError("x")) == 2
    assert errors.exit_code_for(errors.ConsistencyError("x")) == 3
    assert errors.exit_code_for(errors.CertificateError("x")) == 4
    assert errors.exit_code_for(KeyError("x")) == 1


def test_isola_svg(tmp_path):
    eps, sigma = 0.01, -0.3894887313
    pts = [complex(0.49 * eps**3, sigma + 0.467 * eps**2), complex(float("nan"), float("nan"))]
    text = isola_svg(pts, pts[:1], eps, sigma, 0.467, 0.4948, 0.1078, title="isola <teste>")
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert text.count("<circle") == 2
    assert "<ellipse" in text and "&lt;teste&gt;" in text
    path = write_isola_svg(
        tmp_path / "sub" / "isola.svg",
        asymptotic=pts, direct=[], eps=eps, sigma=sigma,
        center_drift=0.467, semi_minor=0.4948, semi_major=0.1078,
    )
    assert path.read_text(encoding="utf-8").count("<circle") == 1
