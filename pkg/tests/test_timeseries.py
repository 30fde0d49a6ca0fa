import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from headkin.errors import InvalidInputError, OutOfRangeError
from headkin.timeseries import (
    ImpactWindow,
    ScalarSeries,
    Vec3Series,
    align,
    extract_window,
    resample,
    resultant,
    same_grid,
)

DT = 1 / 1125


def ramp(n=1125, start=0.0, dt=DT):
    t = start + dt * np.arange(n)
    return Vec3Series(start, dt, np.column_stack([t, 2 * t, -t]))


def test_samples_are_read_only():
    s = ramp(10)
    with pytest.raises(ValueError):
        s.samples[0, 0] = 1.0


@pytest.mark.parametrize("bad", [0.0, -1e-3, np.inf, np.nan])
def test_rejects_bad_dt(bad):
    with pytest.raises(InvalidInputError):
        Vec3Series(0.0, bad, np.zeros((3, 3)))


def test_rejects_wrong_shape_and_nonfinite():
    with pytest.raises(InvalidInputError):
        Vec3Series(0.0, DT, np.zeros((4, 2)))
    with pytest.raises(InvalidInputError):
        ScalarSeries(0.0, DT, np.zeros((4, 3)))
    with pytest.raises(InvalidInputError):
        ScalarSeries(0.0, DT, [0.0, np.nan])


def test_window_sample_counts_at_1125_hz():
    # 200 ms at 1125 Hz is 225 intervals; the float quotient is just below 225
    n_pre, n_post = ImpactWindow().sample_counts(DT)
    assert (n_pre, n_post) == (56, 169)
    assert n_pre + n_post + 1 == 226


def test_window_validation():
    with pytest.raises(InvalidInputError):
        ImpactWindow(pre_trigger=-0.01)
    with pytest.raises(InvalidInputError):
        ImpactWindow(post_trigger=0.05, beta_end=0.1)


def test_extract_window_keeps_absolute_times():
    s = ramp()
    w = extract_window(s, 0.4, ImpactWindow())
    assert len(w) == 226
    i0 = round(0.4 / DT)
    assert w.start_time == pytest.approx((i0 - 56) * DT)
    np.testing.assert_allclose(w.samples[:, 0], w.times, atol=1e-12)


def test_extract_window_out_of_range():
    with pytest.raises(OutOfRangeError):
        extract_window(ramp(), 0.02, ImpactWindow())
    with pytest.raises(OutOfRangeError):
        extract_window(ramp(), 0.95, ImpactWindow())


def test_resample_identity_and_linear():
    s = ramp(101, dt=0.01)
    assert resample(s, 0.01) is s
    r = resample(s, 0.004)
    np.testing.assert_allclose(r.samples[:, 1], 2 * r.times, atol=1e-12)
    assert r.end_time <= s.end_time + 1e-12


def test_resultant():
    s = Vec3Series(0.0, 1.0, [[3.0, 4.0, 0.0], [0.0, 0.0, -2.0]])
    np.testing.assert_allclose(resultant(s).samples, [5.0, 2.0])


def test_align_common_span():
    a = ramp(200, start=0.0, dt=0.001)
    b = ramp(300, start=0.05, dt=0.0008)
    a2, b2 = align([a, b], 0.001)
    assert same_grid(a2, b2)
    assert a2.start_time == pytest.approx(0.05)
    np.testing.assert_allclose(a2.samples, b2.samples, atol=1e-12)


def test_align_disjoint_streams():
    with pytest.raises(InvalidInputError):
        align([ramp(10), ramp(10, start=5.0)], DT)


@settings(max_examples=50, deadline=None)
@given(offset=st.floats(-10, 10), n=st.integers(2, 50))
def test_shift_preserves_samples(offset, n):
    s = ramp(n)
    moved = s.shifted(offset)
    assert np.array_equal(moved.samples, s.samples)
    np.testing.assert_allclose(moved.times - s.times, offset, atol=1e-9)
