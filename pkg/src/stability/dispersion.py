"""
Relação de dispersão, autovalores não perturbados e ressonância transversal.

Objetivos
---------
- Ω(k) = (k² + β)^{1/2} (aceita arrays e β complexo para diferenciação de Cauchy),
  com derivadas em k e em β.
- λ⁰±(k) = i[k ± Ω(k)^{1/2}].
- Resolver (β* + 4)^{1/4} + (β* + 1)^{1/4} = 3 (bisseção + Newton) e derivar
  σ = 1 − γ₁ = −2 + γ₂, γ_j = (β* + j²)^{1/4}.
- Gap espectral de iσ e raio do contorno Γ.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Literal

import numpy as np
from scipy import optimize

from src.utils.errors import DomainError
from src.utils.logger import get_logger, log_stage

_log = get_logger(__name__)

__all__ = [
    "ResonanceData",
    "omega",
    "omega_prime",
    "omega_dbeta",
    "lambda0",
    "delta0",
    "solve_resonance",
    "resonant_modes",
    "spectral_gap",
    "contour_radius",
]

Branch = Literal["+", "-"]

# Bracket e tolerâncias do solver de ressonância
BRACKET = (1e-3, 1e2)
RESIDUAL_TOL = 1e-14
GAP_K_MAX = 50


@dataclass(frozen=True)
class ResonanceData:
    """
    Constantes da ressonância m = 1.

    Campos
    ------
    beta_star : float
        Quadrado do número de onda transversal crítico.
    sigma : float
        Parte imaginária do autovalor duplo iσ.
    gamma1, gamma2 : float
        γ_j = (β* + j²)^{1/4}.
    """

    beta_star: float
    sigma: float
    gamma1: float
    gamma2: float

    @property
    def residual(self) -> float:
        return abs(self.gamma1 + self.gamma2 - 3.0)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def _check_beta(beta) -> None:
    b = np.asarray(beta)
    if np.isrealobj(b) and np.any(b <= 0):
        raise DomainError(f"beta deve ser > 0 (recebido {beta!r})")


def omega(k, beta):
    """
    Ω(k) = (k² + β)^{1/2}, par em k.

    Parameters
    ----------
    k : int | float | np.ndarray
    beta : float | complex | np.ndarray
        β > 0 (valores complexos usam o ramo principal).

    Returns
    -------
    float | complex | np.ndarray

    Raises
    ------
    DomainError
        β real ≤ 0.
    """
    _check_beta(beta)
    k = np.asarray(k)
    b = np.asarray(beta)
    if not np.iscomplexobj(b):
        b = b.astype(float)
    val = np.sqrt(k * k + b)
    return val[()] if val.ndim == 0 else val


def omega_prime(k, beta):
    """dΩ/dk = k/Ω(k)."""
    return np.asarray(k) / omega(k, beta)


def omega_dbeta(k, beta):
    """∂Ω/∂β = 1/(2Ω(k))."""
    return 0.5 / omega(k, beta)


def lambda0(k, beta, branch: Branch):
    """
    Autovalor não perturbado λ⁰±(k, β) = i[k ± Ω(k)^{1/2}] (puramente imaginário).
    """
    if branch not in ("+", "-"):
        raise DomainError(f"ramo inválido: {branch!r}")
    sign = 1.0 if branch == "+" else -1.0
    return 1j * (np.asarray(k) + sign * np.sqrt(omega(k, beta)))


def delta0(lam: complex, k, beta):
    """Δ₀(λ; k, β) = det([[ik − λ, Ω],[−1, ik − λ]]) = (ik − λ)² + Ω(k)."""
    a = 1j * np.asarray(k) - lam
    return a * a + omega(k, beta)


def _resonance_fn(beta: float) -> float:
    return (beta + 4.0) ** 0.25 + (beta + 1.0) ** 0.25 - 3.0


def _resonance_fprime(beta: float) -> float:
    return 0.25 * ((beta + 4.0) ** -0.75 + (beta + 1.0) ** -0.75)


@lru_cache(maxsize=1)
def solve_resonance() -> ResonanceData:
    """
    Resolve a condição de ressonância m = 1 para o único β* > 0.

    Etapas
    ------
    1) Bisseção em [1e-3, 1e2] (lado esquerdo crescente, direito decrescente).
    2) Polimento de Newton até resíduo < 1e-14.

    Returns
    -------
    ResonanceData
    """
    # 1) bisseção
    beta = optimize.bisect(_resonance_fn, *BRACKET, xtol=1e-12, maxiter=200)
    # 2) Newton
    beta = optimize.newton(_resonance_fn, beta, fprime=_resonance_fprime, tol=1e-15, maxiter=50)
    residual = abs(_resonance_fn(beta))
    if residual >= RESIDUAL_TOL:
        _log.warning("Resonance | resíduo acima da tolerância: %.3e", residual)

    beta = float(beta)
    gamma1 = float((beta + 1.0) ** 0.25)
    gamma2 = float((beta + 4.0) ** 0.25)
    res = ResonanceData(beta_star=beta, sigma=1.0 - gamma1, gamma1=gamma1, gamma2=gamma2)
    log_stage(_log, "Resonance", beta_star=res.beta_star, sigma=res.sigma, residual=residual)
    return res


def resonant_modes(res: ResonanceData, ks: Iterable[int], tol: float = 1e-10) -> List[int]:
    """Números de onda k com Δ₀(iσ; k, β*) = 0 (até `tol`)."""
    ks = np.asarray(list(ks))
    d = np.abs(delta0(1j * res.sigma, ks, res.beta_star))
    return [int(k) for k in ks[d < tol]]


def spectral_gap(res: ResonanceData, k_max: int) -> float:
    """
    Distância de iσ ao restante do espectro não perturbado.

    Parameters
    ----------
    res : ResonanceData
    k_max : int
        Varredura k ∈ [−k_max, k_max]; deve ser ≥ 8.

    Returns
    -------
    float
        min |λ⁰(k, β*, ±) − iσ| excluindo (−2, +) e (1, −).
    """
    if k_max < 8:
        raise DomainError(f"k_max deve ser >= 8 (recebido {k_max})")
    ks = np.arange(-k_max, k_max + 1)
    lam_p = lambda0(ks, res.beta_star, "+")
    lam_m = lambda0(ks, res.beta_star, "-")
    dist_p = np.abs(lam_p - 1j * res.sigma)
    dist_m = np.abs(lam_m - 1j * res.sigma)
    dist_p[ks == -2] = np.inf
    dist_m[ks == 1] = np.inf
    return float(min(dist_p.min(), dist_m.min()))


def contour_radius(res: ResonanceData) -> float:
    """Raio de Γ: metade do gap calculado com k_max = 50."""
    return 0.5 * spectral_gap(res, GAP_K_MAX)
