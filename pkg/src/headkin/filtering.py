"""Per-impact cutoff selection from wavelet slices, Butterworth low-pass filtering
and five-point-stencil differentiation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray
from scipy import signal as sps

from .errors import DegenerateSignalError, InvalidCutoffError, InvalidInputError
from .timeseries import ScalarSeries, Vec3Series
from .wavelet import WaveletSpectrum

DEFAULT_THRESHOLD = 0.1
DEFAULT_CAP_HZ = 180.0


class Branch(str, Enum):
    NOISE_SEPARATED = "noise-separated"
    OVERLAPPING = "overlapping"
    CAPPED = "capped"


class FilterMode(str, Enum):
    CAUSAL = "causal"
    ZERO_PHASE = "zero-phase"


@dataclass(frozen=True)
class CoefficientSlice:
    """Normalized coefficient magnitudes at one shift ``beta``.

    Only bins at or below Nyquist are kept; ``frequencies`` is descending.
    """

    frequencies: NDArray[np.float64]
    values: NDArray[np.float64]
    beta: float


@dataclass(frozen=True)
class FilterDecision:
    f_ss: float
    f_n: float | None
    f_0: float
    branch: Branch
    threshold: float = DEFAULT_THRESHOLD

    def as_dict(self) -> dict:
        return {
            "f_ss": self.f_ss,
            "f_n": self.f_n,
            "f_0": self.f_0,
            "branch": self.branch.value,
            "threshold": self.threshold,
        }

    @classmethod
    def from_dict(cls, d: dict) -> FilterDecision:
        return cls(d["f_ss"], d["f_n"], d["f_0"], Branch(d["branch"]), d["threshold"])


def normalized_slice(spectrum: WaveletSpectrum, beta: float) -> CoefficientSlice:
    """Magnitudes at ``beta`` divided by the largest magnitude at beta = 0.

    Both the early and late slices share the beta = 0 denominator, so the early
    slice peaks at exactly 1 and the late one shows how much of it survives.
    """
    keep = ~spectrum.above_nyquist
    i_beta = spectrum.beta_index(beta)
    i_zero = spectrum.beta_index(0.0)
    for i, target in ((i_beta, beta), (i_zero, 0.0)):
        if abs(spectrum.betas[i] - target) > 0.5 * spectrum.dt * (1 + 1e-9):
            raise InvalidInputError(f"beta = {target:g} s is not on the spectrum's shift grid")
    mags = np.abs(spectrum.coefficients[:, keep])
    peak = mags[i_zero].max() if mags.size else 0.0
    if not peak > 0:
        raise DegenerateSignalError("wavelet coefficients vanish at beta = 0")
    return CoefficientSlice(spectrum.frequencies[keep], mags[i_beta] / peak, float(spectrum.betas[i_beta]))


def transient_difference(w0: CoefficientSlice, w_end: CoefficientSlice) -> NDArray[np.float64]:
    """Early-minus-late normalized magnitude per frequency bin."""
    if w0.frequencies.shape != w_end.frequencies.shape or not np.array_equal(
        w0.frequencies, w_end.frequencies
    ):
        raise InvalidInputError("slices have different frequency axes")
    return w0.values - w_end.values


def signal_end_frequency(w_end: CoefficientSlice, threshold: float = DEFAULT_THRESHOLD) -> float:
    """Highest frequency still carrying signal at the end of head motion.

    Falls back to the lowest available frequency when nothing exceeds the
    threshold.
    """
    above = w_end.values > threshold
    if not above.any():
        return float(w_end.frequencies.min())
    return float(w_end.frequencies[above].max())


def noise_onset_frequency(
    frequencies: NDArray[np.float64], delta: NDArray[np.float64], threshold: float = DEFAULT_THRESHOLD
) -> float | None:
    """Lowest frequency where the transient difference exceeds ``threshold``, or None."""
    above = np.asarray(delta) > threshold
    if not above.any():
        return None
    return float(np.asarray(frequencies)[above].min())


def cutoff_frequency(
    f_ss: float,
    f_n: float | None,
    cap_hz: float = DEFAULT_CAP_HZ,
    threshold: float = DEFAULT_THRESHOLD,
) -> FilterDecision:
    """Pick the low-pass cutoff from the signal-end and noise-onset frequencies.

    The cutoff is ``max(f_ss, f_n)`` unless that exceeds ``cap_hz``; a missing
    noise onset counts as above the cap.
    """
    highest = np.inf if f_n is None else max(f_ss, f_n)
    if highest > cap_hz:
        return FilterDecision(f_ss, f_n, float(cap_hz), Branch.CAPPED, threshold)
    branch = Branch.NOISE_SEPARATED if f_n > f_ss else Branch.OVERLAPPING
    return FilterDecision(f_ss, f_n, float(highest), branch, threshold)


def decide_cutoff(
    spectrum: WaveletSpectrum,
    beta_end: float,
    threshold: float = DEFAULT_THRESHOLD,
    cap_hz: float = DEFAULT_CAP_HZ,
) -> FilterDecision:
    """Run the full slice -> difference -> cutoff chain on one spectrum."""
    w0 = normalized_slice(spectrum, 0.0)
    w_end = normalized_slice(spectrum, beta_end)
    f_ss = signal_end_frequency(w_end, threshold)
    f_n = noise_onset_frequency(w0.frequencies, transient_difference(w0, w_end), threshold)
    return cutoff_frequency(f_ss, f_n, cap_hz, threshold)


def butterworth_lowpass(series, cutoff: float, order: int = 4, mode: str | FilterMode = FilterMode.ZERO_PHASE):
    """Low-pass ``series`` (scalar or 3-vector) with a Butterworth filter.

    ``causal`` runs one order-``order`` pass, started from the steady state of
    the first sample. ``zero-phase`` runs an order-``order // 2`` design forwards
    and backwards, giving an effective order of ``order`` with no phase lag.
    """
    mode = FilterMode(mode)
    if order not in (2, 4):
        raise InvalidInputError("order must be 2 or 4")
    fs = series.sample_rate
    if not 0 < cutoff < fs / 2:
        raise InvalidCutoffError(f"cutoff {cutoff:g} Hz must lie in (0, {fs / 2:g}) Hz")
    x = series.samples
    if mode is FilterMode.CAUSAL:
        sos = sps.butter(order, cutoff, fs=fs, output="sos")
        zi = sps.sosfilt_zi(sos)
        zi = zi[..., None] * x[0] if x.ndim == 2 else zi * x[0]
        y, _ = sps.sosfilt(sos, x, axis=0, zi=zi)
    else:
        sos = sps.butter(order // 2, cutoff, fs=fs, output="sos")
        y = sps.sosfiltfilt(sos, x, axis=0)
    return type(series)(series.start_time, series.dt, y)


def five_point_derivative(series, dt: float | None = None):
    """Central five-point derivative; two samples are dropped at each end."""
    h = series.dt if dt is None else float(dt)
    f = series.samples
    if f.shape[0] < 5:
        raise InvalidInputError("five-point derivative needs at least 5 samples")
    d = (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * h)
    return type(series)(series.start_time + 2 * series.dt, series.dt, d)
