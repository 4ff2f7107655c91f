"""Configurable experiment runs that emit CSV.

Config files are UTF-8 ``key = value`` lines; ``#`` starts a comment. Missing
keys fall back to :data:`DEFAULTS`. ``preset = transmon`` fixes the spectrum
to (0, 1, 1.95) and ties every rate to the single knob ``gamma21``
(gamma32 = deph3 = 2 gamma21, deph2 = gamma21); setting one of those derived
keys explicitly to a different value is a config error. ``gamma31`` stays
free so the direct 3 -> 1 decay can be switched on.
"""
from __future__ import annotations

import contextlib
import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .discharge import DischargeCurve, discharge_curve
from .errors import ConfigError, ConfigParseError, InputError, NumericError
from .linalg import dm_pure
from .lindblad import EvolutionTrace, NoiseRates, default_steps, default_stride, evolve
from .model import TRANSMON_SPECTRUM, Direction, Protocol, Spectrum, RAMPS
from .observables import p_max

log = logging.getLogger(__name__)

CHARGE_HEADER = ("t", "P1", "P2", "P3", "ergotropy", "trace_error")
SWEEP_HEADER = ("tau", "ergotropy", "ergotropy_ratio", "power", "power_ratio", "max_P2", "trace_error_max")
DISCHARGE_HEADER = ("gamma21_t", "gap_ratio", "P2", "P3", "ergotropy", "ergotropy_normalized")

DISCHARGE_SAMPLES = 501
SWEEP_MAX_SAMPLES = 1000

DEFAULTS = {
    "preset": "none",
    "omega1": "0",
    "omega2": "1",
    "omega3": "1.95",
    "gamma21": "0",
    "gamma32": "0",
    "gamma31": "0",
    "deph2": "0",
    "deph3": "0",
    "direction": "stable",
    "ramp": "linear",
    "omega0": "1",
    "tau": "100",
    "tau_min": "1",
    "tau_max": "1000",
    "tau_points": "40",
    "spacing": "log",
    "hold": "0",
    "steps": "auto",
    "sample_stride": "auto",
    "gap_ratios": "0.5,0.95,2.0",
    "tmax": "5",
}
KEYS = tuple(DEFAULTS)
PRESET_DERIVED = ("omega1", "omega2", "omega3", "gamma32", "deph2", "deph3")


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = "none"
    spectrum: Spectrum = TRANSMON_SPECTRUM
    rates: NoiseRates = NoiseRates()
    direction: Direction = Direction.STABLE
    ramp: str = "linear"
    omega0: float = 1.0
    tau: float = 100.0
    hold: float = 0.0
    tau_min: float = 1.0
    tau_max: float = 1000.0
    tau_points: int = 40
    spacing: str = "log"
    steps: int | None = None
    sample_stride: int | None = None
    gap_ratios: tuple[float, ...] = (0.5, 0.95, 2.0)
    tmax: float = 5.0
    output: Path | None = field(default=None, compare=False)

    def protocol(self, tau: float | None = None, hold: float | None = None) -> Protocol:
        return Protocol(
            omega0=self.omega0,
            tau=self.tau if tau is None else tau,
            ramp=self.ramp,
            direction=self.direction,
            hold=self.hold if hold is None else hold,
        )

    def tau_grid(self) -> np.ndarray:
        if self.tau_points == 1:
            return np.array([self.tau_min])
        if self.spacing == "log":
            return np.geomspace(self.tau_min, self.tau_max, self.tau_points)
        return np.linspace(self.tau_min, self.tau_max, self.tau_points)

    def to_text(self) -> str:
        s, r = self.spectrum, self.rates
        values = {
            "preset": self.preset,
            "omega1": s.omega1,
            "omega2": s.omega2,
            "omega3": s.omega3,
            "gamma21": r.gamma21,
            "gamma32": r.gamma32,
            "gamma31": r.gamma31,
            "deph2": r.deph2,
            "deph3": r.deph3,
            "direction": self.direction.value,
            "ramp": self.ramp,
            "omega0": self.omega0,
            "tau": self.tau,
            "tau_min": self.tau_min,
            "tau_max": self.tau_max,
            "tau_points": self.tau_points,
            "spacing": self.spacing,
            "hold": self.hold,
            "steps": "auto" if self.steps is None else self.steps,
            "sample_stride": "auto" if self.sample_stride is None else self.sample_stride,
            "gap_ratios": ",".join(repr(g) for g in self.gap_ratios),
            "tmax": self.tmax,
        }
        return "".join(f"{k} = {v}\n" for k, v in values.items())


# ---------------------------------------------------------------------------
# parsing


def _read_pairs(text: str) -> dict[str, tuple[str, int]]:
    pairs: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if not sep or not key or not value:
            raise ConfigParseError(lineno, f"expected 'key = value', got {raw.strip()!r}")
        if key not in DEFAULTS:
            raise ConfigParseError(lineno, f"unknown key {key!r}")
        pairs[key] = (value, lineno)
    return pairs


class _Values:
    """Typed access to raw config strings, reporting the source line on failure."""

    def __init__(self, pairs):
        self.pairs = pairs

    def raw(self, key: str) -> str:
        return self.pairs.get(key, (DEFAULTS[key], 0))[0]

    def _fail(self, key, message):
        lineno = self.pairs.get(key, (None, 0))[1]
        if lineno:
            raise ConfigParseError(lineno, f"{key}: {message}")
        raise ConfigError(f"{key}: {message}")

    def real(self, key: str) -> float:
        try:
            v = float(self.raw(key))
        except ValueError:
            self._fail(key, f"not a number: {self.raw(key)!r}")
        if not math.isfinite(v):
            self._fail(key, "must be finite")
        return v

    def integer(self, key: str, allow_auto: bool = False) -> int | None:
        text = self.raw(key)
        if allow_auto and text.lower() == "auto":
            return None
        try:
            return int(text)
        except ValueError:
            self._fail(key, f"not an integer: {text!r}")

    def choice(self, key: str, options: Iterable[str]) -> str:
        v = self.raw(key).lower()
        if v not in options:
            self._fail(key, f"must be one of {sorted(options)}, got {v!r}")
        return v


def parse_config(text: str) -> ExperimentConfig:
    pairs = _read_pairs(text)
    vals = _Values(pairs)

    preset = vals.choice("preset", ("none", "transmon"))
    gamma21 = vals.real("gamma21")
    gamma31 = vals.real("gamma31")
    for key in ("gamma21", "gamma32", "gamma31", "deph2", "deph3"):
        if vals.real(key) < 0:
            raise ConfigError(f"{key} must be non-negative, got {vals.real(key)}")

    if preset == "transmon":
        implied = NoiseRates.transmon(gamma21, gamma31)
        expected = {
            "omega1": TRANSMON_SPECTRUM.omega1,
            "omega2": TRANSMON_SPECTRUM.omega2,
            "omega3": TRANSMON_SPECTRUM.omega3,
            "gamma32": implied.gamma32,
            "deph2": implied.deph2,
            "deph3": implied.deph3,
        }
        for key in PRESET_DERIVED:
            if key in pairs and vals.real(key) != expected[key]:
                raise ConfigError(
                    f"{key} = {vals.raw(key)} conflicts with preset 'transmon' (which sets {expected[key]})"
                )
        spectrum, rates = TRANSMON_SPECTRUM, implied
    else:
        try:
            spectrum = Spectrum(vals.real("omega1"), vals.real("omega2"), vals.real("omega3"))
        except InputError as exc:
            raise ConfigError(str(exc)) from None
        rates = NoiseRates(gamma21, vals.real("gamma32"), gamma31, vals.real("deph2"), vals.real("deph3"))

    cfg = ExperimentConfig(
        preset=preset,
        spectrum=spectrum,
        rates=rates,
        direction=Direction(vals.choice("direction", ("stable", "unstable"))),
        ramp=vals.choice("ramp", tuple(RAMPS)),
        omega0=vals.real("omega0"),
        tau=vals.real("tau"),
        hold=vals.real("hold"),
        tau_min=vals.real("tau_min"),
        tau_max=vals.real("tau_max"),
        tau_points=vals.integer("tau_points"),
        spacing={"lin": "linear"}.get(vals.raw("spacing").lower(), vals.raw("spacing").lower()),
        steps=vals.integer("steps", allow_auto=True),
        sample_stride=vals.integer("sample_stride", allow_auto=True),
        gap_ratios=_ratios(vals),
        tmax=vals.real("tmax"),
    )
    _check(cfg)
    return cfg


def _ratios(vals: _Values) -> tuple[float, ...]:
    out = []
    for item in vals.raw("gap_ratios").split(","):
        try:
            out.append(float(item))
        except ValueError:
            vals._fail("gap_ratios", f"not a number: {item.strip()!r}")
    return tuple(out)


def _check(cfg: ExperimentConfig) -> None:
    positive = {"omega0": cfg.omega0, "tau": cfg.tau, "tau_min": cfg.tau_min, "tau_max": cfg.tau_max, "tmax": cfg.tmax}
    for key, v in positive.items():
        if not v > 0:
            raise ConfigError(f"{key} must be positive, got {v}")
    if cfg.hold < 0:
        raise ConfigError(f"hold must be non-negative, got {cfg.hold}")
    if cfg.tau_max < cfg.tau_min:
        raise ConfigError("tau_max must be >= tau_min")
    if cfg.tau_points < 1:
        raise ConfigError("tau_points must be >= 1")
    if cfg.spacing not in ("log", "linear"):
        raise ConfigError(f"spacing must be 'log' or 'linear', got {cfg.spacing!r}")
    for key in ("steps", "sample_stride"):
        v = getattr(cfg, key)
        if v is not None and v < 1:
            raise ConfigError(f"{key} must be >= 1 or 'auto'")
    if not cfg.gap_ratios or any(not g > 0 for g in cfg.gap_ratios):
        raise ConfigError("gap_ratios must be a non-empty list of positive numbers")


def apply_overrides(text: str, overrides: Iterable[str]) -> str:
    """Append ``key=value`` overrides; later lines win."""
    extra = []
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, value = item.split("=", 1)
        extra.append(f"{key.strip()} = {value.strip()}")
    if not extra:
        return text
    sep = "" if not text or text.endswith("\n") else "\n"
    return text + sep + "\n".join(extra) + "\n"


# ---------------------------------------------------------------------------
# CSV


def fmt(x) -> str:
    return format(float(x), ".11e")


@contextlib.contextmanager
def _sink(out):
    if out is None:
        yield io.StringIO()
    elif isinstance(out, (str, Path)):
        with open(out, "w", newline="", encoding="utf-8") as fh:
            yield fh
    else:
        yield out


def _write(out, header, rows) -> None:
    with _sink(out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


# ---------------------------------------------------------------------------
# runs


def run_charge(config: ExperimentConfig, out: Path | str | TextIO | None = None) -> EvolutionTrace:
    """One charging trajectory (ramp plus hold) from the ground state."""
    protocol = config.protocol()
    duration = protocol.duration
    steps = config.steps or default_steps(protocol, config.rates, duration)
    stride = config.sample_stride or default_stride(steps, duration)
    trace = evolve(dm_pure(1), protocol, config.rates, duration, steps, stride, config.spectrum)
    rows = (
        (t, p[0], p[1], p[2], c, e)
        for t, p, c, e in zip(trace.t, trace.populations, trace.ergotropy, trace.trace_error)
    )
    _write(out if out is not None else config.output, CHARGE_HEADER, rows)
    return trace


@dataclass(frozen=True)
class SweepRow:
    tau: float
    ergotropy: float
    ergotropy_ratio: float
    power: float
    power_ratio: float
    max_p2: float
    trace_error_max: float
    error: str | None = None

    def values(self) -> tuple[float, ...]:
        return (
            self.tau,
            self.ergotropy,
            self.ergotropy_ratio,
            self.power,
            self.power_ratio,
            self.max_p2,
            self.trace_error_max,
        )


def sweep_point(config: ExperimentConfig, tau: float) -> SweepRow:
    """Charge over a ramp of length ``tau`` (no hold) and summarise the end state."""
    protocol = config.protocol(tau=tau, hold=0.0)
    steps = config.steps or default_steps(protocol, config.rates, tau)
    stride = config.sample_stride or default_stride(steps, tau, max_samples=SWEEP_MAX_SAMPLES)
    try:
        trace = evolve(dm_pure(1), protocol, config.rates, tau, steps, stride, config.spectrum)
    except NumericError as exc:
        log.warning("sweep point tau=%g failed: %s", tau, exc)
        nan = float("nan")
        return SweepRow(tau, nan, nan, nan, nan, nan, nan, error=str(exc))
    c = float(trace.ergotropy[-1])
    power = c / tau
    return SweepRow(
        tau=tau,
        ergotropy=c,
        ergotropy_ratio=c / config.spectrum.c_max,
        power=power,
        power_ratio=power / p_max(config.spectrum),
        max_p2=float(trace.populations[:, 1].max()),
        trace_error_max=float(trace.trace_error.max()),
    )


def _sweep_point_star(args):
    return sweep_point(*args)


def run_sweep(
    config: ExperimentConfig, out: Path | str | TextIO | None = None, workers: int = 1
) -> list[SweepRow]:
    taus = [float(t) for t in config.tau_grid()]
    jobs = [(config, t) for t in taus]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point_star, jobs))
    else:
        rows = [sweep_point(*job) for job in jobs]
    rows.sort(key=lambda r: r.tau)
    _write(out if out is not None else config.output, SWEEP_HEADER, (r.values() for r in rows))
    return rows


def gap_spectrum(base: Spectrum, ratio: float) -> Spectrum:
    """Keep the lower gap of ``base`` and set the upper gap to ``ratio`` times it."""
    return Spectrum(base.omega1, base.omega2, base.omega2 + ratio * base.gap21)


def run_self_discharge(
    config: ExperimentConfig, out: Path | str | TextIO | None = None
) -> list[tuple[float, DischargeCurve]]:
    try:
        curves = [
            (g, discharge_curve(gap_spectrum(config.spectrum, g), config.rates, config.tmax, DISCHARGE_SAMPLES))
            for g in config.gap_ratios
        ]
    except InputError as exc:
        raise ConfigError(str(exc)) from None
    rows = (
        (x, g, p2, p3, c, cn)
        for g, cv in curves
        for x, p2, p3, c, cn in zip(cv.gamma21_t, cv.p2, cv.p3, cv.ergotropy, cv.normalized_ergotropy)
    )
    _write(out if out is not None else config.output, DISCHARGE_HEADER, rows)
    return curves


def load_config(path: Path | str | None, overrides: Iterable[str] = ()) -> ExperimentConfig:
    text = "" if path is None else Path(path).read_text(encoding="utf-8")
    return parse_config(apply_overrides(text, overrides))

