"""Pacote raiz do toolkit de instabilidade transversal de ondas de Stokes.

Expõe os namespaces principais:
- src.stability → álgebra de séries, operadores, projetores de Kato e isola
- src.utils     → utilitários (logger, erros, configuração, paralelismo, SVG)
- src.cli       → linha de comando
"""

__all__ = ["stability", "utils"]
