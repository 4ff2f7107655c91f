"""Battery Hamiltonians, drive protocols and the driven eigensystem.

Units: hbar = 1; frequencies in units of the drive amplitude scale and times
in its inverse, so energies and angular frequencies coincide.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateInputError, InputError

EPS1, EPS2, EPS3 = np.eye(3, dtype=complex)


@dataclass(frozen=True)
class Spectrum:
    omega1: float
    omega2: float
    omega3: float

    def __post_init__(self):
        if not (self.omega1 < self.omega2 < self.omega3):
            raise InputError(
                f"spectrum must satisfy omega1 < omega2 < omega3, got "
                f"({self.omega1}, {self.omega2}, {self.omega3})"
            )

    @property
    def energies(self) -> np.ndarray:
        return np.array([self.omega1, self.omega2, self.omega3], dtype=float)

    @property
    def gap21(self) -> float:
        return self.omega2 - self.omega1

    @property
    def gap32(self) -> float:
        return self.omega3 - self.omega2

    @property
    def gap31(self) -> float:
        return self.omega3 - self.omega1

    @property
    def c_max(self) -> float:
        """Largest storable ergotropy, reached with all population in level 3."""
        return self.gap31


# anharmonic transmon ladder
TRANSMON_SPECTRUM = Spectrum(0.0, 1.0, 1.95)


def h0(spectrum: Spectrum) -> np.ndarray:
    return np.diag(spectrum.energies).astype(complex)


def _linear(u):
    return u


def _smoothstep(u):
    return u * u * (3.0 - 2.0 * u)


RAMPS: dict[str, Callable] = {
    "linear": _linear,
    "smoothstep": _smoothstep,
}


class Direction(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class Protocol:
    """Pulse pair ramped over ``[0, tau]`` then frozen for ``hold`` more.

    Stable (STIRAP, counter-intuitive ordering) starts with only the 2-3
    coupling on and ends with only the 1-2 coupling on; Unstable is the
    mirror image.
    """

    omega0: float = 1.0
    tau: float = 10.0
    ramp: str = "linear"
    direction: Direction = Direction.STABLE
    hold: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        if not self.omega0 > 0:
            raise InputError(f"omega0 must be positive, got {self.omega0}")
        if not self.tau > 0:
            raise InputError(f"tau must be positive, got {self.tau}")
        if not self.hold >= 0:
            raise InputError(f"hold must be non-negative, got {self.hold}")
        if self.ramp not in RAMPS:
            raise InputError(f"unknown ramp {self.ramp!r}; choose from {sorted(RAMPS)}")
        f = RAMPS[self.ramp]
        if abs(f(0.0)) > 1e-12 or abs(f(1.0) - 1.0) > 1e-12:
            raise InputError(f"ramp {self.ramp!r} violates f(0)=0, f(tau)=1")

    @property
    def duration(self) -> float:
        return self.tau + self.hold

    def shape(self, t):
        """Ramp value f(t), clamped to 1 after ``tau``."""
        u = np.clip(np.asarray(t, dtype=float) / self.tau, 0.0, 1.0)
        return RAMPS[self.ramp](u)

    def fields(self, t):
        """Vectorised ``(omega12, omega23)``; no domain check."""
        f = self.shape(t)
        rising, falling = self.omega0 * f, self.omega0 * (1.0 - f)
        if self.direction is Direction.STABLE:
            return rising, falling
        return falling, rising

    def max_coupling(self) -> float:
        o12, o23 = self.fields(np.linspace(0.0, self.tau, 1025))
        return float(np.max(np.hypot(o12, o23)))


@dataclass(frozen=True)
class ConstantDrive:
    """Both couplings frozen at fixed values for all times."""

    omega12: float
    omega23: float

    def fields(self, t):
        t = np.asarray(t, dtype=float)
        return np.full_like(t, self.omega12), np.full_like(t, self.omega23)

    def max_coupling(self) -> float:
        return float(np.hypot(self.omega12, self.omega23))


def check_time(protocol: Protocol, t: float) -> None:
    slack = 1e-12 * max(1.0, protocol.duration)
    if not (-slack <= t <= protocol.duration + slack):
        raise InputError(f"t={t} outside protocol domain [0, {protocol.duration}]")


def ramp_eval(protocol: Protocol, t: float) -> tuple[float, float]:
    check_time(protocol, t)
    o12, o23 = protocol.fields(t)
    return float(o12), float(o23)


def h_int(omega12: float, omega23: float) -> np.ndarray:
    """Rotating-frame drive Hamiltonian for resonant couplings."""
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = h[1, 0] = omega12
    h[1, 2] = h[2, 1] = omega23
    return h


@dataclass(frozen=True)
class EigenSystem:
    delta: float
    minus: np.ndarray
    dark: np.ndarray
    plus: np.ndarray

    @property
    def energies(self) -> np.ndarray:
        return np.array([-self.delta, 0.0, self.delta])

    @property
    def states(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.minus, self.dark, self.plus


def eigensystem(omega12: float, omega23: float) -> EigenSystem:
    """Closed-form eigenvectors of :func:`h_int`.

    The zero-energy dark state has no weight on level 2 and is returned with
    unit norm.
    """
    delta = float(np.hypot(omega12, omega23))
    if delta == 0.0:
        raise DegenerateInputError("eigensystem undefined when both couplings vanish")
    a, b = omega12 / delta, omega23 / delta
    r = 1.0 / np.sqrt(2.0)
    minus = r * (a * EPS1 - EPS2 + b * EPS3)
    plus = r * (a * EPS1 + EPS2 + b * EPS3)
    dark = b * EPS1 - a * EPS3
    return EigenSystem(delta, minus, dark, plus)
