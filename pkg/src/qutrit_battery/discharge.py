"""Closed-form self-discharge of an undriven battery.

With the charger off and a diagonal initial state, only the populations
matter. They obey the cascade 3 -> 2 -> 1:

    dP3/dt = -g32 P3
    dP2/dt = -g21 P2 + g32 P3

whose solution is a sum of two exponentials. When g21 == g32 the general
expression is 0/0 and the confluent limit is used instead.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .lindblad import NoiseRates
from .model import Spectrum

DEGENERATE_RTOL = 1e-6


@dataclass(frozen=True)
class DischargeCurve:
    gamma21_t: np.ndarray
    t: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    ergotropy: np.ndarray
    normalized_ergotropy: np.ndarray


def _check_rates(rates: NoiseRates) -> tuple[float, float]:
    g21, g32 = rates.gamma21, rates.gamma32
    if not (g21 > 0 and g32 > 0):
        raise InputError(f"self-discharge needs gamma21 > 0 and gamma32 > 0, got {g21}, {g32}")
    if rates.gamma31:
        raise InputError("the closed-form cascade has no direct 3 -> 1 channel; set gamma31 = 0")
    return g21, g32


def _degenerate(g21: float, g32: float) -> bool:
    return abs(g21 - g32) < DEGENERATE_RTOL * g21


def _check_times(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InputError("times must be non-negative")
    return t


def populations_closed_form(rates: NoiseRates, t, initial: tuple[float, float] = (0.0, 1.0)):
    """Populations ``(P2, P3)`` at time(s) ``t`` from initial ``(P2(0), P3(0))``."""
    g21, g32 = _check_rates(rates)
    t = _check_times(t)
    p2c, p3c = initial
    e21, e32 = np.exp(-g21 * t), np.exp(-g32 * t)
    p3 = p3c * e32
    if _degenerate(g21, g32):
        p2 = (p2c + g21 * t * p3c) * e21
    else:
        p2 = (e32 * g32 * p3c + e21 * (g21 * p2c - g32 * (p2c + p3c))) / (g21 - g32)
    return p2, p3


def ergotropy_closed_form(spectrum: Spectrum, rates: NoiseRates, t):
    """Ergotropy of a battery released fully charged at ``t = 0``."""
    g21, g32 = _check_rates(rates)
    t = _check_times(t)
    d21, d32, d31 = spectrum.gap21, spectrum.gap32, spectrum.gap31
    e21, e32 = np.exp(-g21 * t), np.exp(-g32 * t)
    if _degenerate(g21, g32):
        return e21 * (d31 + g21 * t * d21)
    return (e32 * (g21 * d31 - g32 * d32) - e21 * d21 * g32) / (g21 - g32)


def discharge_curve(spectrum: Spectrum, rates: NoiseRates, t_max: float, n_samples: int) -> DischargeCurve:
    """Sample the fully-charged discharge on ``gamma21 * t`` in ``[0, t_max]``."""
    if n_samples < 2:
        raise InputError("n_samples must be >= 2")
    if not t_max > 0:
        raise InputError("t_max must be positive")
    g21, _ = _check_rates(rates)
    x = np.linspace(0.0, t_max, n_samples)
    t = x / g21
    p2, p3 = populations_closed_form(rates, t)
    c = ergotropy_closed_form(spectrum, rates, t)
    return DischargeCurve(x, t, p2, p3, c, c / spectrum.gap31)
