"""Agreement statistics between headband and reference kinematics.

Peak values are normalized by the largest reference peak before any statistic
is computed. The curve rating is a simplified CORA-style score: a corridor
sub-score plus cross-correlation sub-scores for phase, size and shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import CoraParams
from .errors import InvalidInputError, UndefinedStatisticError
from .filtering import five_point_derivative
from .timeseries import ScalarSeries, Vec3Series, resultant, same_grid

LOA_Z = 1.96


@dataclass(frozen=True)
class PairedPeaks:
    """Reference (``x``) and candidate (``y``) peak values, normalized by ``max(x)``."""

    reference: NDArray[np.float64]
    candidate: NDArray[np.float64]
    normalization: float

    @classmethod
    def from_raw(cls, reference: ArrayLike, candidate: ArrayLike, min_length: int = 2) -> PairedPeaks:
        x = np.asarray(reference, dtype=np.float64)
        y = np.asarray(candidate, dtype=np.float64)
        if x.ndim != 1 or x.shape != y.shape:
            raise InvalidInputError("reference and candidate must be 1-D and of equal length")
        if x.size < min_length:
            raise InvalidInputError(f"need at least {min_length} pairs")
        scale = float(x.max())
        if not scale > 0:
            raise InvalidInputError("largest reference value must be positive")
        return cls(x / scale, y / scale, scale)

    def __len__(self) -> int:
        return self.reference.size


def pearson_r(pairs: PairedPeaks) -> float:
    x, y = pairs.reference, pairs.candidate
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(np.dot(dx, dx)), float(np.dot(dy, dy))
    if sxx == 0 or syy == 0:
        raise UndefinedStatisticError("correlation undefined for zero variance")
    return float(np.dot(dx, dy)) / math.sqrt(sxx * syy)


def ccc(pairs: PairedPeaks) -> float:
    """Concordance correlation ``2 rho / (mu + 1/mu + u**2)``.

    ``mu = S_x / S_y`` and ``u = (mean_x - mean_y) / sqrt(S_x S_y)`` with
    population standard deviations, which makes this equal to Lin's coefficient.
    """
    x, y = pairs.reference, pairs.candidate
    sx, sy = float(x.std()), float(y.std())
    if sx == 0 or sy == 0:
        raise UndefinedStatisticError("concordance undefined for zero variance")
    rho = pearson_r(pairs)
    mu = sx / sy
    u = (x.mean() - y.mean()) / math.sqrt(sx * sy)
    return float(2 * rho / (mu + 1 / mu + u * u))


def nrmse(pairs: PairedPeaks) -> float:
    """Root mean square of the per-pair relative errors ``(y - x) / x``."""
    x, y = pairs.reference, pairs.candidate
    if np.any(x == 0):
        raise UndefinedStatisticError("relative error undefined where the reference is 0")
    return float(np.sqrt(np.mean(((y - x) / x) ** 2)))


@dataclass(frozen=True)
class BlandAltman:
    mean_bias: float
    sd: float | None
    loa_lower: float | None
    loa_upper: float | None

    def as_dict(self) -> dict:
        return {"mean_bias": self.mean_bias, "sd": self.sd, "loa_lower": self.loa_lower, "loa_upper": self.loa_upper}


def bland_altman(pairs: PairedPeaks) -> BlandAltman:
    """Bias of ``reference - candidate``; negative means the candidate over-predicts.

    With a single pair only the bias is defined.
    """
    d = pairs.reference - pairs.candidate
    bias = float(d.mean())
    if d.size < 2:
        return BlandAltman(bias, None, None, None)
    sd = float(d.std(ddof=1))
    return BlandAltman(bias, sd, bias - LOA_Z * sd, bias + LOA_Z * sd)


class CoraBin(str, Enum):
    EXCELLENT = "excellent"
    GOOD = "good"
    FAIR = "fair"
    MARGINAL = "marginal"
    UNACCEPTABLE = "unacceptable"


def cora_bin(score: float) -> CoraBin:
    """Map a rating in [0, 1] to its verbal bin.

    Upper edges are inclusive except for ``excellent`` (strictly above 0.86).
    """
    if score > 0.86:
        return CoraBin.EXCELLENT
    if score > 0.65:
        return CoraBin.GOOD
    if score > 0.44:
        return CoraBin.FAIR
    if score >= 0.26:
        return CoraBin.MARGINAL
    return CoraBin.UNACCEPTABLE


@dataclass(frozen=True)
class CoraRating:
    score: float
    bin: CoraBin
    corridor: float
    phase: float
    size: float
    shape: float
    lag: float  # seconds the candidate is shifted to best match the reference

    def as_dict(self) -> dict:
        return {
            "score": self.score,
            "bin": self.bin.value,
            "corridor": self.corridor,
            "phase": self.phase,
            "size": self.size,
            "shape": self.shape,
            "lag": self.lag,
        }


def _corridor_score(ref: NDArray, cand: NDArray, p: CoraParams) -> float:
    peak = np.abs(ref).max()
    inner, outer = p.inner_corridor * peak, p.outer_corridor * peak
    dev = np.abs(cand - ref)
    if outer == 0:
        return float(np.all(dev == 0))
    partial = np.clip((outer - dev) / (outer - inner), 0.0, 1.0) ** p.corridor_exponent
    return float(np.where(dev <= inner, 1.0, partial).mean())


def _overlap(ref: NDArray, cand: NDArray, lag: int) -> tuple[NDArray, NDArray]:
    """Pair ref[i] with cand[i + lag] over the samples both have."""
    if lag >= 0:
        return ref[: ref.size - lag], cand[lag:]
    return ref[-lag:], cand[: cand.size + lag]


def _xcorr(ref: NDArray, cand: NDArray, lag: int) -> float:
    r, c = _overlap(ref, cand, lag)
    denom = math.sqrt(float(np.dot(r, r)) * float(np.dot(c, c)))
    return float(np.dot(r, c)) / denom if denom > 0 else 0.0


def cora_score(reference: ScalarSeries, candidate: ScalarSeries, params: CoraParams | None = None) -> CoraRating:
    """Rate how well ``candidate`` follows ``reference`` over the rated interval.

    Both series must share a grid. The rated interval is ``[0, interval_ms]``
    on their time axis (time measured from the impact trigger).
    """
    p = params or CoraParams()
    if not same_grid(reference, candidate):
        raise InvalidInputError("reference and candidate must share a sample grid")
    t = reference.times
    interval = p.interval_ms / 1000
    mask = (t >= -1e-9) & (t <= interval + 1e-9)
    if mask.sum() < 2:
        raise InvalidInputError("series do not cover the rated interval")
    ref, cand = reference.samples[mask], candidate.samples[mask]
    if not np.abs(ref).max() > 0:
        raise UndefinedStatisticError("reference curve is identically zero")

    corridor = _corridor_score(ref, cand, p)

    dt = reference.dt
    max_lag = max(1, int(math.floor(p.delta_max * interval / dt)))
    max_lag = min(max_lag, ref.size - 2)
    lags = range(-max_lag, max_lag + 1)
    rhos = [_xcorr(ref, cand, k) for k in lags]
    best = int(np.argmax(rhos))
    lag = lags[best]
    rho = rhos[best]
    if not np.dot(cand, cand) > 0:
        phase = size = shape = 0.0
    else:
        shift = abs(lag) * dt
        lo, hi = p.delta_min * interval, p.delta_max * interval
        phase = 1.0 if shift <= lo else max(0.0, (hi - shift) / (hi - lo)) ** p.phase_exponent
        r, c = _overlap(ref, cand, lag)
        er, ec = float(np.dot(r, r)), float(np.dot(c, c))
        size = (min(er, ec) / max(er, ec)) ** p.size_exponent if max(er, ec) > 0 else 0.0
        shape = max(rho, 0.0) ** p.shape_exponent
    correlation = (phase + size + shape) / 3.0
    score = float(np.clip(p.corridor_weight * corridor + p.correlation_weight * correlation, 0.0, 1.0))
    return CoraRating(score, cora_bin(score), corridor, phase, size, shape, lag * dt)


@dataclass(frozen=True)
class Peaks:
    prv: float
    pra: float
    pla: float | None = None


def peak_metrics(
    angular_velocity: Vec3Series,
    angular_acceleration: Vec3Series | None = None,
    linear_acceleration: Vec3Series | None = None,
    t_range: tuple[float, float] | None = None,
) -> Peaks:
    """Maxima of the resultant series, optionally restricted to ``t_range``.

    Angular acceleration is derived by the five-point stencil when not given.
    """

    def peak(series: Vec3Series) -> float:
        mag = resultant(series)
        if t_range is None:
            return float(mag.samples.max())
        t = mag.times
        m = (t >= t_range[0] - 1e-9) & (t <= t_range[1] + 1e-9)
        return float(mag.samples[m].max())

    if angular_acceleration is None:
        angular_acceleration = five_point_derivative(angular_velocity)
    pla = peak(linear_acceleration) if linear_acceleration is not None else None
    return Peaks(peak(angular_velocity), peak(angular_acceleration), pla)


def summarize(reference: Sequence[float], candidate: Sequence[float]) -> dict:
    """All peak-agreement statistics for one group of impacts.

    Statistics that are undefined for the data (fewer than two pairs, zero
    variance, zero reference) are reported as None.
    """
    out: dict = {"n": len(reference), "pearson_r": None, "ccc": None, "nrmse": None, "bland_altman": None}
    if len(reference) == 0:
        return out
    try:
        pairs = PairedPeaks.from_raw(reference, candidate, min_length=1)
    except InvalidInputError:
        return out
    for name, fn in (("pearson_r", pearson_r), ("ccc", ccc), ("nrmse", nrmse)):
        if name != "nrmse" and len(pairs) < 2:
            continue
        try:
            out[name] = fn(pairs)
        except UndefinedStatisticError:
            pass
    out["bland_altman"] = bland_altman(pairs).as_dict()
    return out
