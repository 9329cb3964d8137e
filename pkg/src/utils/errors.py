"""
Hierarquia de exceções do toolkit e contrato de códigos de saída da CLI.

Contrato
--------
- 0 : sucesso
- 1 : erro genérico / entrada inválida
- 2 : falha numérica (colisão de contorno, quadratura instável, resolvente
      quase singular, forçamento ressonante, norma de Kato, tabela degenerada)
- 3 : violação de consistência (padrão de coeficientes nulos)
- 4 : falha do certificado exato de b30
"""

from __future__ import annotations

__all__ = [
    "StabilityError",
    "DomainError",
    "NumericalError",
    "ContourCollisionError",
    "QuadratureError",
    "NearSingularError",
    "ResonantForcingError",
    "KatoNormError",
    "DegenerateTableError",
    "ConsistencyError",
    "CertificateError",
    "exit_code_for",
]


class StabilityError(RuntimeError):
    """Raiz de todas as falhas do pipeline."""

    exit_code: int = 1


class DomainError(ValueError):
    """Parâmetro fora do domínio (β ≤ 0, K pequeno demais, ε fora da faixa...)."""

    exit_code: int = 1


class NumericalError(StabilityError):
    exit_code = 2


class ContourCollisionError(NumericalError):
    """Autovalor a menos de 1e-3 do contorno Γ."""


class QuadratureError(NumericalError):
    """Regra de quadratura instável (dobrar nós altera o resultado)."""


class NearSingularError(NumericalError):
    """Determinante de bloco 2×2 abaixo da tolerância."""


class ResonantForcingError(NumericalError):
    """Taxa do forçamento coincide com a taxa homogênea da EDO."""


class KatoNormError(NumericalError):
    """‖P − P0‖ ≥ 1: a série binomial da transformação de Kato diverge."""


class DegenerateTableError(NumericalError):
    """|a01 − c01| pequeno demais para definir κ0, κ1."""


class ConsistencyError(StabilityError):
    exit_code = 3


class CertificateError(StabilityError):
    exit_code = 4


def exit_code_for(exc: BaseException) -> int:
    """
    Mapeia qualquer exceção para o código de saída da CLI.

    Parameters
    ----------
    exc : BaseException
        Exceção capturada.

    Returns
    -------
    int
        Código conforme o contrato do módulo (1 para exceções desconhecidas).
    """
    return int(getattr(exc, "exit_code", 1))
