"""Density-matrix evolution with sequential relaxation and pure dephasing.

Charging runs integrate the rotating-frame master equation with the drive
Hamiltonian from a :class:`~qutrit_battery.model.Protocol`. With no drive
(``protocol=None``) the battery is left to relax; this is integrated in the
frame of the bare Hamiltonian, where only the dissipators act.

The production integrator is a fixed-step classical RK4 compiled with numba
that works on matrix elements directly. Two slower routes exist for checking
it: :func:`lindblad_rhs` (operator sums, one Lindblad term per channel) and
the 9x9 Liouvillian from :func:`liouvillian_matrix` exponentiated by
:func:`propagate_piecewise_constant`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from .errors import InputError, IntegrationDiverged, NumericError
from .linalg import DIM, ValidationReport, as_matrix3, dm_validate, rehermitize
from .model import TRANSMON_SPECTRUM, Protocol, Spectrum, check_time, h_int
from .observables import ergotropy, populations


@dataclass(frozen=True)
class NoiseRates:
    """Relaxation rates ``gamma_kj`` (level k -> j) and dephasing rates of levels 2, 3."""

    gamma21: float = 0.0
    gamma32: float = 0.0
    gamma31: float = 0.0
    deph2: float = 0.0
    deph3: float = 0.0

    def __post_init__(self):
        for name in ("gamma21", "gamma32", "gamma31", "deph2", "deph3"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InputError(f"{name} must be a finite non-negative rate, got {v}")

    @classmethod
    def transmon(cls, gamma21: float, gamma31: float = 0.0) -> "NoiseRates":
        """Single-knob transmon noise: gamma32 = deph3 = 2 gamma21, deph2 = gamma21."""
        return cls(
            gamma21=gamma21,
            gamma32=2.0 * gamma21,
            gamma31=gamma31,
            deph2=gamma21,
            deph3=2.0 * gamma21,
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.gamma21, self.gamma32, self.gamma31, self.deph2, self.deph3])

    def max_rate(self) -> float:
        return float(self.as_array().max())


NOISELESS = NoiseRates()


def sigma(k: int, j: int) -> np.ndarray:
    """|eps_k><eps_j| with 1-based level labels."""
    s = np.zeros((DIM, DIM), dtype=complex)
    s[k - 1, j - 1] = 1.0
    return s


def _decay_channels(rates: NoiseRates):
    # (upper, lower, rate)
    return ((2, 1, rates.gamma21), (3, 2, rates.gamma32), (3, 1, rates.gamma31))


def _lindblad_term(jump: np.ndarray, rho: np.ndarray) -> np.ndarray:
    jd = jump.conj().T
    n = jd @ jump
    return jump @ rho @ jd - 0.5 * (n @ rho + rho @ n)


def dissipator_relaxation(rho, rates: NoiseRates) -> np.ndarray:
    rho = as_matrix3(rho)
    out = np.zeros((DIM, DIM), dtype=complex)
    for upper, lower, g in _decay_channels(rates):
        if g:
            out += g * _lindblad_term(sigma(lower, upper), rho)
    return out


def dissipator_dephasing(rho, rates: NoiseRates) -> np.ndarray:
    rho = as_matrix3(rho)
    out = np.zeros((DIM, DIM), dtype=complex)
    for j, g in ((2, rates.deph2), (3, rates.deph3)):
        if g:
            out += g * _lindblad_term(sigma(j, j), rho)
    return out


def _drive_fields(drive, t: float) -> tuple[float, float]:
    if drive is None:
        return 0.0, 0.0
    if isinstance(drive, Protocol):
        check_time(drive, t)
    o12, o23 = drive.fields(t)
    return float(o12), float(o23)


def lindblad_rhs(t: float, rho, protocol, rates: NoiseRates) -> np.ndarray:
    """Time derivative of ``rho``.

    ``protocol`` may be a :class:`Protocol`, any object with a ``fields(t)``
    method, or ``None`` for undriven relaxation.
    """
    rho = as_matrix3(rho)
    o12, o23 = _drive_fields(protocol, t)
    h = h_int(o12, o23)
    return -1j * (h @ rho - rho @ h) + dissipator_relaxation(rho, rates) + dissipator_dephasing(rho, rates)


def liouvillian_matrix(omega12: float, omega23: float, rates: NoiseRates) -> np.ndarray:
    """Superoperator acting on column-stacked ``rho`` (``rho.reshape(-1, order='F')``)."""
    eye = np.eye(DIM)
    h = h_int(omega12, omega23)
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    jumps = [(g, sigma(lower, upper)) for upper, lower, g in _decay_channels(rates)]
    jumps += [(rates.deph2, sigma(2, 2)), (rates.deph3, sigma(3, 3))]
    for g, c in jumps:
        if not g:
            continue
        n = c.conj().T @ c
        lv += g * (np.kron(c.conj(), c) - 0.5 * np.kron(eye, n) - 0.5 * np.kron(n.T, eye))
    return lv


def vec(rho) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v) -> np.ndarray:
    return np.asarray(v).reshape(DIM, DIM, order="F")


def expm_taylor(a: np.ndarray, terms: int = 16) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    a = np.asarray(a, dtype=complex)
    norm = np.linalg.norm(a, 1)
    if not np.isfinite(norm):
        raise NumericError("non-finite generator in matrix exponential")
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    b = a / 2.0**squarings
    eye = np.eye(a.shape[0], dtype=complex)
    total, term = eye.copy(), eye.copy()
    for k in range(1, terms + 1):
        term = term @ b / k
        total += term
    if not np.all(np.isfinite(total)) or np.linalg.norm(term, 1) > 1e-15 * np.linalg.norm(total, 1):
        raise NumericError("Taylor series for the matrix exponential did not converge")
    for _ in range(squarings):
        total = total @ total
    return total


def propagate_piecewise_constant(
    rho0, schedule: Sequence[tuple[float, float, float]], rates: NoiseRates
) -> np.ndarray:
    """Exact propagation through segments of frozen fields ``(omega12, omega23, dt)``."""
    v = vec(as_matrix3(rho0))
    for o12, o23, dt in schedule:
        if not dt > 0:
            raise InputError(f"segment durations must be positive, got {dt}")
        v = expm_taylor(liouvillian_matrix(o12, o23, rates) * dt) @ v
    return unvec(v)


def staircase_schedule(protocol: Protocol, segments: int) -> list[tuple[float, float, float]]:
    """Ramp discretised into ``segments`` equal steps with fields at each midpoint."""
    dt = protocol.tau / segments
    mid = (np.arange(segments) + 0.5) * dt
    o12, o23 = protocol.fields(mid)
    return [(float(a), float(b), dt) for a, b in zip(o12, o23)]


# ---------------------------------------------------------------------------
# compiled RK4 kernel


@numba.njit(cache=True)
def _rhs_into(r, a, b, dec, dph, g21, g31, g32, out):
    for i in range(3):
        for j in range(3):
            # H r - r H for the tridiagonal drive Hamiltonian
            hr = 0j
            if i == 0:
                hr = a * r[1, j]
            elif i == 1:
                hr = a * r[0, j] + b * r[2, j]
            else:
                hr = b * r[1, j]
            rh = 0j
            if j == 0:
                rh = a * r[i, 1]
            elif j == 1:
                rh = a * r[i, 0] + b * r[i, 2]
            else:
                rh = b * r[i, 1]
            v = -1j * (hr - rh) - 0.5 * (dec[i] + dec[j]) * r[i, j]
            if i != j:
                v -= 0.5 * (dph[i] + dph[j]) * r[i, j]
            out[i, j] = v
    out[0, 0] += g21 * r[1, 1] + g31 * r[2, 2]
    out[1, 1] += g32 * r[2, 2]


@numba.njit(cache=True)
def _rk4_advance(r, o12, o23, h, rates):
    g21, g32, g31, d2, d3 = rates[0], rates[1], rates[2], rates[3], rates[4]
    dec = np.array([0.0, g21, g32 + g31])
    dph = np.array([0.0, d2, d3])
    k1 = np.empty((3, 3), np.complex128)
    k2 = np.empty((3, 3), np.complex128)
    k3 = np.empty((3, 3), np.complex128)
    k4 = np.empty((3, 3), np.complex128)
    r = r.copy()
    n = (o12.shape[0] - 1) // 2
    for s in range(n):
        a0, am, a1 = o12[2 * s], o12[2 * s + 1], o12[2 * s + 2]
        b0, bm, b1 = o23[2 * s], o23[2 * s + 1], o23[2 * s + 2]
        _rhs_into(r, a0, b0, dec, dph, g21, g31, g32, k1)
        _rhs_into(r + 0.5 * h * k1, am, bm, dec, dph, g21, g31, g32, k2)
        _rhs_into(r + 0.5 * h * k2, am, bm, dec, dph, g21, g31, g32, k3)
        _rhs_into(r + h * k3, a1, b1, dec, dph, g21, g31, g32, k4)
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        r = 0.5 * (r + r.conj().T)
    return r


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvolutionTrace:
    t: np.ndarray
    rho: np.ndarray
    populations: np.ndarray
    ergotropy: np.ndarray
    trace_error: np.ndarray
    hermiticity_error: np.ndarray
    min_eigenvalue: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.rho[-1]

    def __len__(self) -> int:
        return len(self.t)


def default_steps(drive, rates: NoiseRates, duration: float) -> int:
    """At least 2000 steps per fastest time scale (never fewer than 20000)."""
    scale = max(1.0, rates.max_rate())
    if drive is not None:
        scale = max(scale, drive.max_coupling())
    return max(20000, math.ceil(2000.0 * duration * scale))


def default_stride(steps: int, duration: float, per_unit_time: float = 20.0, max_samples: int | None = None) -> int:
    target = max(1, math.ceil(per_unit_time * duration))
    if max_samples is not None:
        target = min(target, max_samples)
    return max(1, steps // target)


def evolve(
    rho0,
    protocol,
    rates: NoiseRates,
    duration: float,
    steps: int | None = None,
    sample_every: int | None = None,
    spectrum: Spectrum = TRANSMON_SPECTRUM,
) -> EvolutionTrace:
    """Integrate from ``t=0`` to ``duration`` with fixed-step RK4.

    The state is re-Hermitised after every step. Every ``sample_every``
    steps (and at the final step) it is validated and recorded;
    :class:`IntegrationDiverged` is raised as soon as a sample fails.
    """
    rho0 = as_matrix3(rho0)
    if not duration > 0:
        raise InputError(f"duration must be positive, got {duration}")
    if isinstance(protocol, Protocol):
        check_time(protocol, duration)
    report = dm_validate(rho0)
    if not report.ok:
        raise InputError(f"initial state is not a valid density matrix: {report}")
    if steps is None:
        steps = default_steps(protocol, rates, duration)
    if steps < 1:
        raise InputError("steps must be >= 1")
    if sample_every is None:
        sample_every = default_stride(steps, duration)
    if sample_every < 1:
        raise InputError("sample_every must be >= 1")

    h = duration / steps
    rate_arr = rates.as_array()
    rho = rehermitize(rho0)
    samples_t, samples_rho, reports = [0.0], [rho], [report]
    done = 0
    while done < steps:
        n = min(sample_every, steps - done)
        half_steps = np.arange(2 * done, 2 * (done + n) + 1) * (0.5 * h)
        if protocol is None:
            o12 = o23 = np.zeros_like(half_steps)
        else:
            o12, o23 = protocol.fields(half_steps)
            o12 = np.ascontiguousarray(o12, dtype=float)
            o23 = np.ascontiguousarray(o23, dtype=float)
        rho = _rk4_advance(rho, o12, o23, h, rate_arr)
        done += n
        t = duration if done == steps else done * h
        report = dm_validate(rho)
        if not report.ok:
            raise IntegrationDiverged(t, report)
        samples_t.append(t)
        samples_rho.append(rho)
        reports.append(report)

    rho_arr = np.array(samples_rho)
    return EvolutionTrace(
        t=np.array(samples_t),
        rho=rho_arr,
        populations=populations(rho_arr),
        ergotropy=ergotropy(rho_arr, spectrum),
        trace_error=np.array([r.trace_error for r in reports]),
        hermiticity_error=np.array([r.hermiticity_error for r in reports]),
        min_eigenvalue=np.array([r.min_eigenvalue for r in reports]),
    )
