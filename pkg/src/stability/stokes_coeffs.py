"""
Expansões congeladas da onda de Stokes (g = 1) e autoverificações.

Conteúdo
--------
- η*, ψ* até ε⁴, velocidade c = 1 + ½ε², deslocamento ζ − x até ε³.
- Perfis de referência de p, q e (1+q)/ζ′ (transcrição independente) para
  comparação com a reconstrução de `series_algebra.reconstruct_pq`.
- Resíduos das equações de Stokes (cinemática e Bernoulli) por ordem, via
  G(0), G′(0), G″(0), e a consistência de ζ − x = 𝓗[η∘ζ].

Uso
---
    from src.stability.stokes_coeffs import stokes_profiles, check_stokes_residuals
    st = stokes_profiles()
    check_stokes_residuals(3)["max_residual"]   # -> 0.0
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as F
from functools import lru_cache
from typing import Dict, Tuple, TypedDict

from src.stability.series_algebra import (
    GradedSeries,
    Profile,
    TrigPoly,
    compose_with_zeta,
    dn_series,
    hilbert,
    surface_velocities,
    dx,
)
from src.utils.errors import DomainError
from src.utils.logger import get_logger, log_stage

_log = get_logger(__name__)

__all__ = [
    "StokesExpansion",
    "ResidualReport",
    "stokes_profiles",
    "reference_pq",
    "check_stokes_residuals",
    "check_zeta_consistency",
]


@dataclass(frozen=True)
class StokesExpansion:
    """
    Expansões da onda de Stokes.

    Campos
    ------
    eta : GradedSeries
        Elevação η*, ordens ε¹…ε⁴ (termos pares, média nula).
    psi : GradedSeries
        Potencial ψ*, ordens ε¹…ε⁴ (termos ímpares).
    c1 : GradedSeries
        Velocidade de fase 1 + ½ε² (constante em x).
    zeta_minus_x : GradedSeries
        Deslocamento ζ − x, ordens ε¹…ε³ (termos ímpares).
    """

    eta: GradedSeries
    psi: GradedSeries
    c1: GradedSeries
    zeta_minus_x: GradedSeries


def _t(profile: Profile, cos=None, sin=None, const=0) -> TrigPoly:
    return TrigPoly.trig(cos=cos, sin=sin, const=const, profile=profile)


@lru_cache(maxsize=2)
def stokes_profiles(profile: Profile = "exact") -> StokesExpansion:
    """
    Séries congeladas em racionais (convertidas para float sob demanda).

    Returns
    -------
    StokesExpansion
    """
    eta = GradedSeries.from_eps(
        {
            1: _t(profile, cos={1: 1}),
            2: _t(profile, cos={2: F(1, 2)}),
            3: _t(profile, cos={1: F(1, 8), 3: F(3, 8)}),
            4: _t(profile, cos={2: F(5, 6), 4: F(1, 3)}),
        },
        max_order=4,
        profile=profile,
    )
    psi = GradedSeries.from_eps(
        {
            1: _t(profile, sin={1: 1}),
            2: _t(profile, sin={2: F(1, 2)}),
            # ¼(3 sin x cos 2x + sin x)
            3: _t(profile, sin={1: F(-1, 8), 3: F(3, 8)}),
            4: _t(profile, sin={2: F(5, 12), 4: F(1, 3)}),
        },
        max_order=4,
        profile=profile,
    )
    c1 = GradedSeries.from_eps(
        {0: _t(profile, const=1), 2: _t(profile, const=F(1, 2))},
        max_order=4,
        profile=profile,
    )
    zeta = GradedSeries.from_eps(
        {
            1: _t(profile, sin={1: 1}),
            2: _t(profile, sin={2: 1}),
            3: _t(profile, sin={1: -1, 3: F(3, 2)}),
        },
        max_order=3,
        profile=profile,
    )
    return StokesExpansion(eta=eta, psi=psi, c1=c1, zeta_minus_x=zeta)


@lru_cache(maxsize=2)
def reference_pq(profile: Profile = "exact") -> Tuple[GradedSeries, GradedSeries, GradedSeries]:
    """p, q e (1+q)/ζ′ transcritos diretamente (até ε³)."""
    p = GradedSeries.from_eps(
        {
            0: _t(profile, const=1),
            1: _t(profile, cos={1: -2}),
            2: _t(profile, cos={2: -2}, const=F(3, 2)),
            3: _t(profile, cos={1: 3, 3: -3}),
        },
        profile=profile,
    )
    q = GradedSeries.from_eps(
        {
            1: _t(profile, cos={1: -1}),
            2: _t(profile, cos={2: -1}, const=1),
            3: _t(profile, cos={1: 2, 3: F(-3, 2)}),
        },
        profile=profile,
    )
    qz = GradedSeries.from_eps(
        {
            0: _t(profile, const=1),
            1: _t(profile, cos={1: -2}),
            2: _t(profile, cos={2: -2}, const=2),
            3: _t(profile, cos={1: 4, 3: -3}),
        },
        profile=profile,
    )
    return p, q, qz


class ResidualReport(TypedDict):
    order: int
    kinematic: Dict[int, float]
    bernoulli: Dict[int, float]
    max_residual: float
    exact_zero: bool


def check_stokes_residuals(order: int) -> ResidualReport:
    """
    Resíduos das equações da onda progressiva, ordem a ordem até `order`.

        cinemática : G(η)ψ + c·ηx
        Bernoulli  : −c·V + η + ½(V² + B²)

    Parameters
    ----------
    order : int
        1, 2 ou 3 (a ordem 4 exigiria G‴(0)).

    Returns
    -------
    ResidualReport
        Máximo |coeficiente| por ordem e flag de nulidade exata.
    """
    if order not in (1, 2, 3):
        raise DomainError(f"ordem de resíduo deve estar em {{1,2,3}}, recebida {order}")

    st = stokes_profiles("exact")
    eta = st.eta.truncate(order)
    psi = st.psi.truncate(order)
    c = st.c1.truncate(order)

    b, v = surface_velocities(eta, psi)
    kin = dn_series(eta, psi) + c * eta.map_terms(dx)
    half = F(1, 2)
    ber = -(c * v) + eta + (v * v + b * b) * half

    kin_by = {m: kin.term(m).max_abs() for m in range(1, order + 1)}
    ber_by = {m: ber.term(m).max_abs() for m in range(1, order + 1)}
    exact_zero = not kin.terms and not ber.terms
    worst = max(list(kin_by.values()) + list(ber_by.values()))
    log_stage(_log, "StokesResiduals", order=order, max_residual=worst, exact_zero=exact_zero)
    return ResidualReport(
        order=order,
        kinematic=kin_by,
        bernoulli=ber_by,
        max_residual=worst,
        exact_zero=exact_zero,
    )


def check_zeta_consistency() -> bool:
    """
    Verifica exatamente ζ − x = 𝓗[η∘ζ] até ε³ (ponto fixo da deformação).
    """
    st = stokes_profiles("exact")
    zeta = st.zeta_minus_x
    eta_z = compose_with_zeta(st.eta.truncate(zeta.max_order), zeta)
    ok = eta_z.map_terms(hilbert) == zeta
    log_stage(_log, "ZetaFixedPoint", ok=ok)
    return bool(ok)
