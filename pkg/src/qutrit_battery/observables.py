"""Energy, ergotropy, populations and charging power."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .model import Spectrum


@dataclass(frozen=True)
class ChargeReport:
    ergotropy: float
    power: float
    power_ratio: float
    populations: tuple[float, float, float]


def populations(rho) -> np.ndarray:
    """Level populations; works on a single state or a stack of shape (..., 3, 3)."""
    return np.real(np.diagonal(np.asarray(rho), axis1=-2, axis2=-1))


def energy(rho, spectrum: Spectrum):
    return populations(rho) @ spectrum.energies


def ergotropy(rho, spectrum: Spectrum):
    # energy above the ground level; the battery always starts from |eps1>
    return energy(rho, spectrum) - spectrum.omega1


def power(ergotropy_at_tau: float, tau: float) -> float:
    if not tau > 0:
        raise InputError(f"tau must be positive, got {tau}")
    return ergotropy_at_tau / tau


def p_max(spectrum: Spectrum) -> float:
    """Speed-limit power normalisation pi / (2 (omega3 - omega1)), hbar = 1."""
    return np.pi / (2.0 * spectrum.gap31)


def power_ratio(ergotropy_at_tau: float, tau: float, spectrum: Spectrum) -> float:
    return power(ergotropy_at_tau, tau) / p_max(spectrum)


def charge_report(rho, spectrum: Spectrum, tau: float) -> ChargeReport:
    c = float(ergotropy(rho, spectrum))
    p = populations(rho)
    return ChargeReport(
        ergotropy=c,
        power=power(c, tau),
        power_ratio=power_ratio(c, tau, spectrum),
        populations=(float(p[0]), float(p[1]), float(p[2])),
    )
