"""
Configuração de execução (RunConfig) com validação pydantic.

Precedência (da menor para a maior)
-----------------------------------
1) defaults dos campos
2) variáveis de ambiente (STL_*)
3) arquivo chave=valor passado em --config (lido com python-dotenv)
4) flags da CLI (overrides explícitos)

Configuração por ENV
--------------------
- STL_K_MAX          : truncamento de Fourier K (default 32)
- STL_CONTOUR_NODES  : nós da quadratura do contorno (default 128)
- STL_EPS_LIST       : lista de ε separada por vírgula (default "0.02,0.01,0.005")
- STL_THETA_GRID     : pontos da grade θ da isola (default 201)
- STL_OUTPUT_DIR     : diretório de saída (default "out")
- STL_FORMAT         : json | csv (default json)
- STL_PROFILE        : exact | float (default exact)

Uso
---
    from src.utils.config import load_config
    cfg = load_config("run.cfg", k_max=24)
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.utils.errors import DomainError

__all__ = ["RunConfig", "load_config", "ENV_PREFIX"]

ENV_PREFIX = "STL_"


class RunConfig(BaseModel):
    """
    Parâmetros de uma execução da CLI.

    Campos
    ------
    k_max : int
        Truncamento K (modos −K…K). Deve ser ≥ 8.
    contour_nodes : int
        Nós do trapézio no círculo Γ; potência de dois ≥ 32.
    eps_list : list[float]
        Amplitudes usadas nos testes de ordem; cada valor em (0, 0.1].
    theta_grid : int
        Número de pontos θ na isola.
    output_dir : Path
        Diretório para arquivos emitidos.
    format : {"json", "csv"}
    profile : {"exact", "float"}
        Perfil de coeficientes da álgebra de séries.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    k_max: int = Field(default=32)
    contour_nodes: int = Field(default=128)
    eps_list: List[float] = Field(default_factory=lambda: [0.02, 0.01, 0.005])
    theta_grid: int = Field(default=201)
    output_dir: Path = Field(default=Path("out"))
    format: Literal["json", "csv"] = "json"
    profile: Literal["exact", "float"] = "exact"

    @field_validator("k_max")
    @classmethod
    def _check_k_max(cls, v: int) -> int:
        if v < 8:
            raise ValueError("k_max deve ser >= 8")
        return v

    @field_validator("contour_nodes")
    @classmethod
    def _check_nodes(cls, v: int) -> int:
        if v < 32 or (v & (v - 1)) != 0:
            raise ValueError("contour_nodes deve ser potência de dois >= 32")
        return v

    @field_validator("eps_list", mode="before")
    @classmethod
    def _split_eps(cls, v: Any) -> Any:
        if isinstance(v, str):
            return [float(tok) for tok in v.split(",") if tok.strip()]
        return v

    @field_validator("eps_list")
    @classmethod
    def _check_eps(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("eps_list não pode ser vazia")
        bad = [e for e in v if not (0.0 < e <= 0.1)]
        if bad:
            raise ValueError(f"valores de eps fora de (0, 0.1]: {bad}")
        return v

    @field_validator("theta_grid")
    @classmethod
    def _check_theta(cls, v: int) -> int:
        if v < 3:
            raise ValueError("theta_grid deve ser >= 3")
        return v


def _from_env() -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for name in RunConfig.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw.strip() != "":
            out[name] = raw.strip()
    return out


def _from_file(path: Path) -> Dict[str, Any]:
    if not path.is_file():
        raise DomainError(f"Arquivo de configuração não encontrado: {path}")
    out: Dict[str, Any] = {}
    for key, val in dotenv_values(path).items():
        if val is None:
            continue
        name = key.strip().lower()
        if name.startswith(ENV_PREFIX.lower()):
            name = name[len(ENV_PREFIX):]
        out[name] = val.strip()
    return out


def load_config(path: Optional[str | Path] = None, **overrides: Any) -> RunConfig:
    """
    Monta o RunConfig efetivo aplicando a precedência do módulo.

    Parameters
    ----------
    path : str | Path | None
        Arquivo chave=valor opcional (mesmos nomes dos campos).
    **overrides
        Valores explícitos (None é ignorado), tipicamente vindos da CLI.

    Returns
    -------
    RunConfig

    Raises
    ------
    DomainError
        Valor inválido em qualquer camada ou arquivo inexistente.
    """
    merged: Dict[str, Any] = {}
    merged.update(_from_env())
    if path:
        merged.update(_from_file(Path(path)))
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        raise DomainError(f"Configuração inválida: {e.errors()[0].get('msg')}") from e
