import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from headkin.errors import InvalidInputError, OutOfRangeError
from headkin.timeseries import ScalarSeries
from headkin.wavelet import SUPPORT, ScaleGrid, central_frequency, cwt, gabor, scalogram

FS = 1125.0
DT = 1 / FS
SMALL = ScaleGrid(octaves=6, voices=8)


def tone(freq, n=1125, start=0.0):
    t = start + DT * np.arange(n)
    return ScalarSeries(start, DT, np.sin(2 * np.pi * freq * t))


def brute_force(x, dt, betas, eta, modulation=15.0):
    """Term-by-term evaluation of the truncated rectangle-rule transform."""
    out = []
    for b in betas:
        acc = 0j
        for k, xk in enumerate(x):
            u = (k * dt - b) / (eta * dt)
            if abs(u) <= SUPPORT:
                acc += xk * np.conj(np.exp(1j * modulation * u) / (math.pi**0.25 * math.exp(u * u / 2)))
        out.append(acc * dt / math.sqrt(eta))
    return np.array(out)


def test_gabor_at_origin_and_unit_energy():
    assert gabor(0.0) == pytest.approx(math.pi**-0.25)
    u = np.linspace(-12, 12, 200001)
    energy = np.sum(np.abs(gabor(u)) ** 2) * (u[1] - u[0])
    assert energy == pytest.approx(1.0, rel=1e-9)


def test_central_frequency_value():
    assert central_frequency() == pytest.approx(2.3873241, rel=1e-7)


def test_default_grid_shape_and_monotone():
    g = ScaleGrid()
    assert len(g) == 400 and g.etas.size == 400
    assert np.all(np.diff(g.etas) > 0)
    assert g.etas[0] == pytest.approx(1.92 * 2 ** (1 / 40))
    assert g.etas[-1] == pytest.approx(1.92 * 2**10)


def test_grid_validation():
    with pytest.raises(InvalidInputError):
        ScaleGrid(alpha=0)
    with pytest.raises(InvalidInputError):
        ScaleGrid(voices=0)


def test_direct_matches_term_by_term_sum():
    rng = np.random.default_rng(3)
    x = rng.normal(size=120)
    s = ScalarSeries(0.0, DT, x)
    grid = ScaleGrid(octaves=3, voices=4)
    betas = s.times[[0, 17, 60, 119]]
    spec = cwt(s, grid, betas)
    for j, eta in enumerate(grid.etas):
        np.testing.assert_allclose(spec.coefficients[:, j], brute_force(x, DT, betas, eta), rtol=1e-10, atol=1e-14)


def test_off_grid_shift_matches_term_by_term_sum():
    rng = np.random.default_rng(4)
    x = rng.normal(size=80)
    s = ScalarSeries(0.0, DT, x)
    grid = ScaleGrid(octaves=2, voices=3)
    betas = np.array([10.3 * DT, 40.77 * DT])
    spec = cwt(s, grid, betas)
    for j, eta in enumerate(grid.etas):
        np.testing.assert_allclose(spec.coefficients[:, j], brute_force(x, DT, betas, eta), rtol=1e-10, atol=1e-14)


def test_fft_requires_grid_shifts():
    with pytest.raises(InvalidInputError):
        cwt(tone(30, 50), SMALL, [0.5 * DT], method="fft")
    with pytest.raises(InvalidInputError):
        cwt(tone(30, 50), SMALL, method="wavelet")


def test_shift_outside_signal():
    with pytest.raises(OutOfRangeError):
        cwt(tone(30, 50), SMALL, [-DT])


def test_tone_ridge_on_nearest_bin():
    spec = cwt(tone(30.0), ScaleGrid(), [562 * DT], method="fft")
    mag, freqs = scalogram(spec)
    nearest = np.argmin(np.abs(freqs - 30.0))
    assert np.argmax(mag[0]) == nearest


def test_edge_mask_marks_long_scales_near_ends():
    spec = cwt(tone(30, 200), SMALL, [0.0, 100 * DT])
    assert spec.edge_mask[0].all()
    assert not spec.edge_mask[1, 0]
    assert spec.edge_mask[1, -1]


def test_above_nyquist_flags():
    spec = cwt(tone(30, 50), ScaleGrid(), [0.0])
    assert np.array_equal(spec.above_nyquist, spec.frequencies > FS / 2)
    assert spec.above_nyquist.any() and not spec.above_nyquist.all()


@settings(max_examples=20, deadline=None)
@given(
    seed=st.integers(0, 2**31 - 1),
    a=st.floats(-5, 5, allow_subnormal=False),
    b=st.floats(-5, 5, allow_subnormal=False),
)
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=(2, 150))
    sx, sy = ScalarSeries(0, DT, x), ScalarSeries(0, DT, y)
    combo = ScalarSeries(0, DT, a * x + b * y)
    betas = sx.times[::10]
    lhs = cwt(combo, SMALL, betas).coefficients
    rhs = a * cwt(sx, SMALL, betas).coefficients + b * cwt(sy, SMALL, betas).coefficients
    scale = np.abs(lhs).max() + np.abs(rhs).max() + 1e-300
    assert np.abs(lhs - rhs).max() <= 1e-9 * scale


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), shift=st.integers(1, 40))
def test_time_shift_covariance(seed, shift):
    rng = np.random.default_rng(seed)
    x = np.zeros(300)
    x[120:180] = rng.normal(size=60)
    moved = np.roll(x, shift)
    s, m = ScalarSeries(0, DT, x), ScalarSeries(0, DT, moved)
    betas = s.times[100:200]
    w = cwt(s, SMALL, betas).coefficients
    wm = cwt(m, SMALL, betas + shift * DT).coefficients
    assert np.abs(w - wm).max() <= 1e-9 * np.abs(w).max()


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(20, 300))
def test_fft_matches_direct(seed, n):
    x = np.random.default_rng(seed).normal(size=n)
    s = ScalarSeries(0.25, DT, x)
    d = cwt(s, SMALL, method="direct").coefficients
    f = cwt(s, SMALL, method="fft").coefficients
    assert np.abs(d - f).max() <= 1e-9 * np.abs(d).max()
