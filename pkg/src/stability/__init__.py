"""
Núcleo numérico da instabilidade transversal de ondas de Stokes.

Camadas (de baixo para cima)
----------------------------
series_algebra → dispersion / stokes_coeffs → dn_operator → operator_assembly
→ kato_engine → instability_analysis → pipeline / acceptance
"""

from .dispersion import ResonanceData, solve_resonance
from .instability_analysis import certify_b30, eigenvalues, isola_params
from .kato_engine import CoeffTable, PerturbativeEngine

__all__ = [
    "ResonanceData",
    "solve_resonance",
    "CoeffTable",
    "PerturbativeEngine",
    "certify_b30",
    "eigenvalues",
    "isola_params",
]
