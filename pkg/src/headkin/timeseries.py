"""Uniformly sampled time-series containers and the helpers shared by every stage.

All containers are immutable: sample arrays are copied on construction and
flagged read-only, so a series can be handed to worker processes or cached
without defensive copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidInputError, OutOfRangeError

# Relative slack used when counting grid points on an interval, so that
# 0.2 s / (1/1125 s) = 224.99999999999997 still counts as 225 intervals.
_GRID_EPS = 1e-9


def _frozen(values: ArrayLike, ndim: int) -> NDArray[np.float64]:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim or (ndim == 2 and arr.shape[1] != 3):
        shape = "(n, 3)" if ndim == 2 else "(n,)"
        raise InvalidInputError(f"samples must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("samples must be finite")
    arr.setflags(write=False)
    return arr


def _check_dt(dt: float) -> float:
    dt = float(dt)
    if not (dt > 0 and math.isfinite(dt)):
        raise InvalidInputError(f"sample interval must be positive, got {dt}")
    return dt


@dataclass(frozen=True)
class _Series:
    start_time: float
    dt: float
    samples: NDArray[np.float64] = field(repr=False)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def times(self) -> NDArray[np.float64]:
        return self.start_time + self.dt * np.arange(len(self))

    @property
    def end_time(self) -> float:
        return self.start_time + self.dt * (len(self) - 1)

    @property
    def sample_rate(self) -> float:
        return 1.0 / self.dt

    def shifted(self, offset: float):
        """Return the same samples with the time axis moved by ``offset`` seconds."""
        return type(self)(self.start_time + offset, self.dt, self.samples)


@dataclass(frozen=True)
class Vec3Series(_Series):
    """Three-component series, e.g. angular velocity (rad/s) or acceleration (m/s^2).

    ``samples`` has shape ``(n, 3)``.
    """

    def __post_init__(self):
        object.__setattr__(self, "start_time", float(self.start_time))
        object.__setattr__(self, "dt", _check_dt(self.dt))
        object.__setattr__(self, "samples", _frozen(self.samples, 2))

    def axis(self, index: int) -> ScalarSeries:
        return ScalarSeries(self.start_time, self.dt, self.samples[:, index])


@dataclass(frozen=True)
class ScalarSeries(_Series):
    """Single-channel series; ``samples`` has shape ``(n,)``."""

    def __post_init__(self):
        object.__setattr__(self, "start_time", float(self.start_time))
        object.__setattr__(self, "dt", _check_dt(self.dt))
        object.__setattr__(self, "samples", _frozen(self.samples, 1))


@dataclass(frozen=True)
class ImpactWindow:
    """Analysis window around a trigger.

    ``pre_trigger`` is the span before beta = 0, ``post_trigger`` the span after
    it, and ``beta_end`` marks the end of head motion (the late slice used by the
    cutoff selection). All values in seconds.
    """

    pre_trigger: float = 0.050
    post_trigger: float = 0.150
    beta_end: float = 0.100

    def __post_init__(self):
        if self.pre_trigger < 0:
            raise InvalidInputError("pre_trigger must be >= 0")
        if not (self.post_trigger >= self.beta_end > 0):
            raise InvalidInputError("require post_trigger >= beta_end > 0")

    @property
    def duration(self) -> float:
        return self.pre_trigger + self.post_trigger

    def sample_counts(self, dt: float) -> tuple[int, int]:
        """Return ``(n_pre, n_post)`` sample offsets on a grid with spacing ``dt``.

        The total count is ``floor(duration / dt) + 1``; the pre-trigger part is
        the nearest whole number of samples.
        """
        n_total = int(math.floor(self.duration / dt * (1 + _GRID_EPS))) + 1
        n_pre = int(round(self.pre_trigger / dt))
        return n_pre, n_total - 1 - n_pre


def resample(series: Vec3Series, target_dt: float) -> Vec3Series:
    """Linearly interpolate ``series`` onto a uniform grid of spacing ``target_dt``.

    The new grid starts at the same time and covers the original span up to the
    last whole ``target_dt`` step.
    """
    target_dt = _check_dt(target_dt)
    if len(series) == 0:
        raise InvalidInputError("cannot resample an empty series")
    if target_dt == series.dt:
        return series
    span = series.end_time - series.start_time
    n_new = int(math.floor(span / target_dt * (1 + _GRID_EPS))) + 1
    old_t = series.times
    new_t = series.start_time + target_dt * np.arange(n_new)
    new_t = np.minimum(new_t, old_t[-1])
    out = np.column_stack([np.interp(new_t, old_t, series.samples[:, k]) for k in range(3)])
    return Vec3Series(series.start_time, target_dt, out)


def nearest_index(series: _Series, time: float) -> int:
    return int(round((time - series.start_time) / series.dt))


def extract_window(series, trigger_time: float, window: ImpactWindow):
    """Slice ``[trigger - pre_trigger, trigger + post_trigger]`` out of ``series``.

    The trigger sample is the grid point nearest ``trigger_time``. Works for both
    :class:`Vec3Series` and :class:`ScalarSeries`; absolute times are kept.
    """
    i0 = nearest_index(series, trigger_time)
    n_pre, n_post = window.sample_counts(series.dt)
    lo, hi = i0 - n_pre, i0 + n_post
    if lo < 0 or hi > len(series) - 1:
        raise OutOfRangeError(
            f"window [{trigger_time - window.pre_trigger:.6g}, "
            f"{trigger_time + window.post_trigger:.6g}] s exceeds recording "
            f"[{series.start_time:.6g}, {series.end_time:.6g}] s"
        )
    return type(series)(series.start_time + lo * series.dt, series.dt, series.samples[lo : hi + 1])


def resultant(series: Vec3Series) -> ScalarSeries:
    if len(series) == 0:
        raise InvalidInputError("empty series")
    return ScalarSeries(series.start_time, series.dt, np.linalg.norm(series.samples, axis=1))


def same_grid(a: _Series, b: _Series, rtol: float = 1e-9) -> bool:
    """True when two series share length, spacing and start time."""
    return (
        len(a) == len(b)
        and math.isclose(a.dt, b.dt, rel_tol=rtol)
        and abs(a.start_time - b.start_time) <= rtol * max(1.0, abs(a.start_time)) + 1e-3 * a.dt
    )


def align(series_list, dt: float) -> list[Vec3Series]:
    """Interpolate every series onto one grid of spacing ``dt`` covering the
    span all of them share."""
    dt = _check_dt(dt)
    if not series_list:
        return []
    start = max(s.start_time for s in series_list)
    end = min(s.end_time for s in series_list)
    if end < start:
        raise InvalidInputError("streams do not overlap in time")
    n = int(math.floor((end - start) / dt * (1 + _GRID_EPS))) + 1
    grid = np.minimum(start + dt * np.arange(n), end)
    out = []
    for s in series_list:
        if s.dt == dt and s.start_time == start and len(s) == n:
            out.append(s)
            continue
        t = s.times
        cols = [np.interp(grid, t, s.samples[:, k]) for k in range(3)]
        out.append(Vec3Series(start, dt, np.column_stack(cols)))
    return out
