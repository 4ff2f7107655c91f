"""Adiabatic-limit predictions for both charging paths.

The unstable path starts in an equal superposition of the two bright states
and picks up opposite dynamical phases, so its stored energy keeps sloshing
between levels 2 and 3. The stable path follows the dark state, which
carries no phase and never touches level 2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .model import EPS1, EPS2, EPS3, Direction, Protocol, Spectrum, check_time, eigensystem

DEFAULT_PANELS = 4096


@dataclass(frozen=True)
class AdiabaticPrediction:
    t: float
    state: np.ndarray
    ergotropy: float


def _simpson(y: np.ndarray, h: float) -> float:
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def phase_phi(protocol: Protocol, t: float, quadrature_points: int = DEFAULT_PANELS) -> float:
    """Accumulated mixing phase: integral of sqrt(omega12^2 + omega23^2) over [0, t].

    Composite Simpson over the ramp with ``quadrature_points`` panels (rounded
    up to even); the frozen hold segment is integrated exactly.
    """
    check_time(protocol, t)
    if quadrature_points < 2:
        raise InputError("quadrature_points must be >= 2")
    n = quadrature_points + (quadrature_points % 2)
    t_ramp = min(max(t, 0.0), protocol.tau)
    phi = 0.0
    if t_ramp > 0.0:
        grid = np.linspace(0.0, t_ramp, n + 1)
        o12, o23 = protocol.fields(grid)
        phi = _simpson(np.hypot(o12, o23), t_ramp / n)
    if t > protocol.tau:
        o12, o23 = protocol.fields(protocol.tau)
        phi += float(np.hypot(o12, o23)) * (t - protocol.tau)
    return phi


def unstable_state_from(omega12: float, omega23: float, phi: float) -> np.ndarray:
    delta = np.hypot(omega12, omega23)
    return np.cos(phi) / delta * (omega12 * EPS1 + omega23 * EPS3) - 1j * np.sin(phi) * EPS2


def unstable_ergotropy_from(omega12: float, omega23: float, phi: float, spectrum: Spectrum) -> float:
    d2 = omega12**2 + omega23**2
    c2, s2 = np.cos(phi) ** 2, np.sin(phi) ** 2
    w1, w2, w3 = spectrum.energies
    return float(c2 * (w1 * omega12**2 + w3 * omega23**2) / d2 + w2 * s2 - w1)


def stable_ergotropy_from(omega12: float, omega23: float, spectrum: Spectrum) -> float:
    d2 = omega12**2 + omega23**2
    w1, _, w3 = spectrum.energies
    return float((w3 * omega12**2 + w1 * omega23**2) / d2 - w1)


def _require(protocol: Protocol, direction: Direction) -> None:
    if protocol.direction is not direction:
        raise InputError(f"expected a {direction.value} protocol, got {protocol.direction.value}")


def state_unstable(protocol: Protocol, t: float, quadrature_points: int = DEFAULT_PANELS) -> np.ndarray:
    _require(protocol, Direction.UNSTABLE)
    phi = phase_phi(protocol, t, quadrature_points)
    o12, o23 = protocol.fields(t)
    return unstable_state_from(float(o12), float(o23), phi)


def ergotropy_unstable(
    protocol: Protocol, spectrum: Spectrum, t: float, quadrature_points: int = DEFAULT_PANELS
) -> float:
    _require(protocol, Direction.UNSTABLE)
    phi = phase_phi(protocol, t, quadrature_points)
    o12, o23 = protocol.fields(t)
    return unstable_ergotropy_from(float(o12), float(o23), phi, spectrum)


def state_stable(protocol: Protocol, t: float) -> np.ndarray:
    _require(protocol, Direction.STABLE)
    check_time(protocol, t)
    o12, o23 = protocol.fields(t)
    return eigensystem(float(o12), float(o23)).dark


def ergotropy_stable(protocol: Protocol, spectrum: Spectrum, t: float) -> float:
    _require(protocol, Direction.STABLE)
    check_time(protocol, t)
    o12, o23 = protocol.fields(t)
    return stable_ergotropy_from(float(o12), float(o23), spectrum)


def predict(protocol: Protocol, spectrum: Spectrum, t: float) -> AdiabaticPrediction:
    if protocol.direction is Direction.STABLE:
        return AdiabaticPrediction(t, state_stable(protocol, t), ergotropy_stable(protocol, spectrum, t))
    return AdiabaticPrediction(
        t, state_unstable(protocol, t), ergotropy_unstable(protocol, spectrum, t)
    )
