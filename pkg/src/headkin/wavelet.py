"""Continuous wavelet transform with a Gabor wavelet.

The transform is evaluated directly as a rectangle-rule sum,

    w(beta, eta) = eta**-0.5 * sum_k x(t_k) * conj(psi((t_k - beta) / (eta * dt))) * dt

where ``eta`` is a scale measured in samples, so the centre frequency of scale
``eta`` is ``f_c / (eta * dt)`` Hz. The wavelet is truncated where its Gaussian
envelope drops below 1e-8.

Scales follow a log grid of ``octaves`` x ``voices`` values
``alpha * 2**(oct - 1) * 2**(voc / voices)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import ArrayLike, NDArray
from scipy.signal import fftconvolve

from .errors import InvalidInputError, OutOfRangeError
from .timeseries import ScalarSeries

MODULATION = 15.0
ENVELOPE_FLOOR = 1e-8
# |u| beyond which exp(-u^2 / 2) < ENVELOPE_FLOOR (about 6.07)
SUPPORT = math.sqrt(-2.0 * math.log(ENVELOPE_FLOOR))


def gabor(tau: ArrayLike, modulation: float = MODULATION):
    """Gabor wavelet ``exp(i c tau) / (pi**0.25 * exp(tau**2 / 2))``."""
    tau = np.asarray(tau, dtype=np.float64)
    return np.exp(1j * modulation * tau - 0.5 * tau * tau) / np.pi**0.25


def central_frequency(modulation: float = MODULATION) -> float:
    """Centre frequency of the wavelet in cycles per unit of its argument."""
    return modulation / (2.0 * np.pi)


@dataclass(frozen=True)
class ScaleGrid:
    alpha: float = 1.92
    octaves: int = 10
    voices: int = 40

    def __post_init__(self):
        if self.alpha <= 0 or self.octaves < 1 or self.voices < 1:
            raise InvalidInputError("scale grid needs alpha > 0, octaves >= 1, voices >= 1")

    @cached_property
    def etas(self) -> NDArray[np.float64]:
        octs = np.arange(1, self.octaves + 1)[:, None]
        vocs = np.arange(1, self.voices + 1)[None, :]
        etas = (self.alpha * 2.0 ** (octs - 1) * 2.0 ** (vocs / self.voices)).ravel()
        etas.setflags(write=False)
        return etas

    def __len__(self) -> int:
        return self.octaves * self.voices

    def frequencies(self, dt: float, modulation: float = MODULATION) -> NDArray[np.float64]:
        return central_frequency(modulation) / (self.etas * dt)


@dataclass(frozen=True)
class WaveletSpectrum:
    """Complex coefficients indexed ``[beta, eta]``.

    ``edge_mask`` marks coefficients whose truncated wavelet support runs past
    either end of the signal; those were summed over the available samples only.
    """

    betas: NDArray[np.float64]
    grid: ScaleGrid
    coefficients: NDArray[np.complex128] = field(repr=False)
    dt: float
    central_frequency: float
    edge_mask: NDArray[np.bool_] = field(repr=False)

    @property
    def frequencies(self) -> NDArray[np.float64]:
        return self.central_frequency / (self.grid.etas * self.dt)

    @property
    def nyquist(self) -> float:
        return 0.5 / self.dt

    @property
    def above_nyquist(self) -> NDArray[np.bool_]:
        """Grid bins whose frequency exceeds Nyquist; they are aliased."""
        return self.frequencies > self.nyquist

    def beta_index(self, beta: float) -> int:
        return int(np.argmin(np.abs(self.betas - beta)))


def _lag_kernel(eta: float, max_lag: int, modulation: float) -> NDArray[np.complex128]:
    """conj(psi(m / eta)) for m = -max_lag..max_lag, zeroed outside the support."""
    m = np.arange(-max_lag, max_lag + 1, dtype=np.float64)
    u = m / eta
    kern = np.conj(gabor(u, modulation))
    kern[np.abs(u) > SUPPORT] = 0.0
    return kern


def _grid_offsets(betas: NDArray[np.float64], t0: float, dt: float) -> NDArray[np.int64] | None:
    pos = (betas - t0) / dt
    idx = np.rint(pos)
    if np.all(np.abs(pos - idx) < 1e-6):
        return idx.astype(np.int64)
    return None


def cwt(
    signal: ScalarSeries,
    grid: ScaleGrid | None = None,
    betas: ArrayLike | None = None,
    *,
    method: str = "direct",
    modulation: float = MODULATION,
) -> WaveletSpectrum:
    """Wavelet coefficients of ``signal`` at shifts ``betas`` (seconds, on the
    signal's own time axis; default every sample).

    ``method="direct"`` sums the rectangle rule explicitly; ``method="fft"``
    evaluates the same truncated sum as an FFT convolution and requires the
    shifts to lie on the sample grid.
    """
    grid = grid or ScaleGrid()
    x = signal.samples
    n = x.shape[0]
    if n == 0:
        raise InvalidInputError("cannot transform an empty signal")
    dt = signal.dt
    t = signal.times
    betas = t.copy() if betas is None else np.atleast_1d(np.asarray(betas, dtype=np.float64))
    tol = 1e-6 * dt
    if np.any(betas < t[0] - tol) or np.any(betas > t[-1] + tol):
        raise OutOfRangeError("wavelet shifts must lie within the signal span")

    etas = grid.etas
    offsets = _grid_offsets(betas, signal.start_time, dt)
    if method == "fft" and offsets is None:
        raise InvalidInputError("fft method requires shifts on the sample grid")
    if method not in ("direct", "fft"):
        raise InvalidInputError(f"unknown method {method!r}")

    coeffs = np.empty((betas.size, etas.size), dtype=np.complex128)
    for j, eta in enumerate(etas):
        reach = min(int(math.ceil(SUPPORT * eta)), n - 1)
        if offsets is None:
            # off-grid shifts: evaluate the kernel for every (beta, sample) pair
            u = (t[None, :] - betas[:, None]) / (eta * dt)
            kern = np.conj(gabor(u, modulation))
            kern[np.abs(u) > SUPPORT] = 0.0
            col = kern @ x
        elif method == "direct":
            # row b of the Toeplitz matrix holds kernel lags (k - b) for k = 0..n-1
            kern = _lag_kernel(eta, n - 1, modulation)
            rows = sliding_window_view(kern, n)[::-1]
            col = rows[offsets] @ x
        else:
            kern = _lag_kernel(eta, reach, modulation)
            full = fftconvolve(x, kern[::-1], mode="full")
            col = full[offsets + reach]
        coeffs[:, j] = col * (dt / math.sqrt(eta))

    half_width = SUPPORT * etas[None, :] * dt
    edge = (betas[:, None] - half_width < t[0] - tol) | (betas[:, None] + half_width > t[-1] + tol)
    coeffs.setflags(write=False)
    edge.setflags(write=False)
    betas.setflags(write=False)
    return WaveletSpectrum(betas, grid, coeffs, dt, central_frequency(modulation), edge)


def scalogram(spectrum: WaveletSpectrum) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Magnitudes ``|w|`` (shape ``[beta, eta]``) and the matching frequency axis in Hz."""
    return np.abs(spectrum.coefficients), spectrum.frequencies
