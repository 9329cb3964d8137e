"""Utilitários de infraestrutura: logger, erros, configuração, paralelismo e SVG."""

from .config import RunConfig, load_config  # Configuração validada (pydantic)
from .errors import StabilityError, exit_code_for  # Hierarquia de erros + códigos de saída
from .logger import get_logger, log_stage  # Logger padronizado
from .parallel import ordered_map  # Map paralelo determinístico

__all__ = ["RunConfig", "load_config", "StabilityError", "exit_code_for", "get_logger", "log_stage", "ordered_map"]
