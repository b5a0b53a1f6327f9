"""Spatial-temporal flow speed v(z, t): gridded storage, a synthetic
Gulf-Stream-like generator, and bilinear interpolation for the planner.

Depths are positive-down metres, times are hours, speeds are m/s. The
synthesizer stands in for measured current-profiler data; its CSV format
(documented in save_csv) is what real measurements would be ingested as.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, CoverageError


@dataclass(frozen=True)
class CurrentField:
    """Flow speed on a depth x time grid. Immutable after construction."""

    depth_bins: np.ndarray   # [m] strictly ascending
    time_stamps: np.ndarray  # [h] strictly ascending, uniform spacing
    speeds: np.ndarray       # [m/s] shape (n_times, n_depths), >= 0

    def __post_init__(self):
        depths = np.asarray(self.depth_bins, dtype=float)
        times = np.asarray(self.time_stamps, dtype=float)
        speeds = np.asarray(self.speeds, dtype=float)
        if depths.ndim != 1 or times.ndim != 1:
            raise ConfigError("depth_bins and time_stamps must be 1-D")
        if depths.size < 2 or times.size < 2:
            raise ConfigError("need at least two depth bins and two time stamps")
        if not np.all(np.diff(depths) > 0):
            raise ConfigError("depth_bins must be strictly ascending")
        dt = np.diff(times)
        if not np.all(dt > 0):
            raise ConfigError("time_stamps must be strictly ascending")
        if not np.allclose(dt, dt[0], rtol=1e-9, atol=1e-12):
            raise ConfigError("time_stamps must be uniformly spaced")
        if speeds.shape != (times.size, depths.size):
            raise ConfigError(
                f"speeds shape {speeds.shape} does not match "
                f"(n_times={times.size}, n_depths={depths.size})")
        if np.any(speeds < 0) or not np.all(np.isfinite(speeds)):
            raise ConfigError("speeds must be finite and >= 0")
        for name, arr in (("depth_bins", depths), ("time_stamps", times),
                          ("speeds", speeds)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def covers(self, depth_lo: float, depth_hi: float,
               t_lo: float, t_hi: float) -> bool:
        return (self.depth_bins[0] <= depth_lo and depth_hi <= self.depth_bins[-1]
                and self.time_stamps[0] <= t_lo and t_hi <= self.time_stamps[-1])

    def sample(self, depths, t: float) -> np.ndarray:
        """Speeds at the given depths and one time, bilinearly interpolated."""
        return self.sample_many(depths, np.asarray([t], dtype=float))[0]

    def sample_many(self, depths, times) -> np.ndarray:
        """Bilinear interpolation on a depths x times lattice; shape
        (len(times), len(depths)). Exact at grid nodes."""
        depths = np.asarray(depths, dtype=float)
        times = np.asarray(times, dtype=float)
        if np.any(times < self.time_stamps[0]) or np.any(times > self.time_stamps[-1]):
            raise CoverageError(
                f"time query outside field coverage "
                f"[{self.time_stamps[0]}, {self.time_stamps[-1]}] h")
        if np.any(depths < self.depth_bins[0]) or np.any(depths > self.depth_bins[-1]):
            raise CoverageError(
                f"depth query outside field coverage "
                f"[{self.depth_bins[0]}, {self.depth_bins[-1]}] m")
        it = np.searchsorted(self.time_stamps, times, side="right") - 1
        it = np.minimum(it, self.time_stamps.size - 2)
        wt = ((times - self.time_stamps[it])
              / (self.time_stamps[it + 1] - self.time_stamps[it]))[:, None]
        rows = (1.0 - wt) * self.speeds[it] + wt * self.speeds[it + 1]
        out = np.empty((times.size, depths.size))
        for i in range(times.size):
            out[i] = np.interp(depths, self.depth_bins, rows[i])
        return out


def speed_at(field: CurrentField, z: float, t: float) -> float:
    """Flow speed [m/s] at depth z and time t (bilinear; exact at grid nodes)."""
    return float(field.sample(np.asarray([z], dtype=float), t)[0])


@dataclass(frozen=True)
class SynthesisSpec:
    """Knobs for the synthetic field: a sinusoidal-plus-noise surface speed
    decaying exponentially below ``surface_depth``."""

    mean: float = 0.67            # [m/s] surface forcing mean
    amplitude: float = 0.25       # [m/s] sinusoid amplitude
    period_hours: float = 48.0    # [h]
    noise_std: float = 0.05       # [m/s] per-stamp Gaussian noise
    decay_length: float = 120.0   # [m] e-folding depth of the shear profile
    surface_depth: float = 50.0   # [m] depth where the decay starts (shallower is flat)
    depth_start: float = 0.0      # [m]
    depth_stop: float = 400.0     # [m]
    depth_step: float = 5.0       # [m]
    duration_hours: float = 360.0 # [h]
    time_step_hours: float = 1.0  # [h]

    def __post_init__(self):
        if self.mean <= 0 or self.amplitude < 0 or self.noise_std < 0:
            raise ConfigError("mean must be > 0; amplitude and noise_std >= 0")
        if self.period_hours <= 0 or self.decay_length <= 0:
            raise ConfigError("period_hours and decay_length must be > 0")
        if self.depth_step <= 0 or self.time_step_hours <= 0:
            raise ConfigError("depth_step and time_step_hours must be > 0")
        if self.depth_stop <= self.depth_start:
            raise ConfigError("depth_stop must exceed depth_start")
        if self.duration_hours < self.time_step_hours:
            raise ConfigError("duration_hours must cover at least one time step")


def synthesize(seed: int, spec: SynthesisSpec = SynthesisSpec()) -> CurrentField:
    """Deterministic synthetic field: v(z, t) = surface(t) * shear(z).

    surface(t) = mean + amplitude * sin(2*pi*t/period) + noise, floored at 0;
    shear(z) = exp(-(z - surface_depth)/decay_length) clamped to [0, 1], so
    speed never increases with depth.
    """
    rng = np.random.default_rng(seed)
    depths = np.arange(spec.depth_start, spec.depth_stop + 0.5 * spec.depth_step,
                       spec.depth_step)
    times = np.arange(0.0, spec.duration_hours + 0.5 * spec.time_step_hours,
                      spec.time_step_hours)
    surface = (spec.mean
               + spec.amplitude * np.sin(2.0 * np.pi * times / spec.period_hours)
               + rng.normal(0.0, spec.noise_std, size=times.size))
    surface = np.maximum(surface, 0.0)
    shear = np.clip(np.exp(-(depths - spec.surface_depth) / spec.decay_length),
                    0.0, 1.0)
    return CurrentField(depth_bins=depths, time_stamps=times,
                        speeds=surface[:, None] * shear[None, :])


def save_csv(field: CurrentField, path) -> None:
    """Write `time_h, <depth_1>, <depth_2>, ...` then one row per time stamp.

    Floats use shortest round-trip formatting, so load_csv restores the
    field exactly.
    """
    lines = ["time_h," + ",".join(repr(float(z)) for z in field.depth_bins)]
    for t, row in zip(field.time_stamps, field.speeds):
        lines.append(repr(float(t)) + "," + ",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_csv(path) -> CurrentField:
    """Read a field written by save_csv (or measured data in the same layout)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty current-field file")
    header = [c.strip() for c in lines[0].split(",")]
    if header[0] != "time_h" or len(header) < 3:
        raise ConfigError(f"{path}:1: header must be 'time_h,<depth>,...'")
    try:
        depths = np.asarray([float(c) for c in header[1:]])
    except ValueError:
        raise ConfigError(f"{path}:1: non-numeric depth in header") from None
    times, rows = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise ConfigError(
                f"{path}:{lineno}: expected {len(header)} columns, got {len(cells)}")
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: non-numeric value") from None
        times.append(values[0])
        rows.append(values[1:])
    try:
        return CurrentField(depth_bins=depths,
                            time_stamps=np.asarray(times),
                            speeds=np.asarray(rows))
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
