import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from headkin.errors import InvalidInputError
from headkin.filtering import Branch
from headkin.fusion import to_head_frame
from headkin.metrics import peak_metrics
from headkin.pipeline import head_frame_average, reconstruct
from headkin.synth import (
    SyntheticScenario,
    decay_factor,
    generate_ground_truth,
    haversine,
    hertz_contact_duration,
    synthesize_impact,
)

QUIET = SyntheticScenario(noise_amplitude=0.0, gyro_noise_sd=0.0)


def test_hertz_reference_case():
    tc = hertz_contact_duration(0.425, 67e3, 0.70 / (2 * math.pi), 13.0)
    assert tc == pytest.approx(0.02516, rel=0.02)


def test_hertz_exponents():
    base = hertz_contact_duration(0.425, 67e3, 0.11, 13.0)
    assert hertz_contact_duration(0.425, 67e3, 0.11, 26.0) / base == pytest.approx(2**-0.2, rel=1e-12)
    assert hertz_contact_duration(0.425, 4 * 67e3, 0.11, 13.0) / base == pytest.approx(4**-0.4, rel=1e-12)


@pytest.mark.parametrize("args", [(0, 1, 1, 1), (1, -1, 1, 1), (1, 1, 0, 1), (1, 1, 1, 0)])
def test_hertz_rejects_non_positive(args):
    with pytest.raises(InvalidInputError):
        hertz_contact_duration(*args)


def test_ground_truth_closed_form():
    sc = replace(QUIET, pulse_amplitude=10.0, pulse_width=0.05)
    truth = generate_ground_truth(sc)
    assert truth.prv == 10.0
    assert truth.pra == pytest.approx(628.3185, rel=1e-6)
    p = peak_metrics(truth.angular_velocity)
    assert p.prv == pytest.approx(truth.prv, rel=1e-3)
    assert p.pra == pytest.approx(truth.pra, rel=1e-3)


def test_ground_truth_axis_and_zero_amplitude():
    truth = generate_ground_truth(replace(QUIET, pulse_axis=(0, 0, 1)))
    assert not truth.angular_velocity.samples[:, :2].any()
    zero = generate_ground_truth(replace(QUIET, pulse_amplitude=0.0))
    assert not zero.angular_velocity.samples.any()


def test_haversine_support():
    t = np.array([-0.01, 0.0, 0.025, 0.05, 0.06])
    np.testing.assert_allclose(haversine(t, 2.0, 0.05), [0, 0, 2, 0, 0], atol=1e-15)


@pytest.mark.parametrize(
    "change",
    [
        {"pulse_width": 0.0},
        {"sensor_count": 0, "sensor_position_angles": ()},
        {"noise_band": (100.0, 600.0)},
        {"noise_band": (0.0, 100.0)},
        {"sensor_count": 2},
        {"peak_linear_acceleration": 10.0},
    ],
)
def test_scenario_validation(change):
    with pytest.raises(InvalidInputError):
        replace(SyntheticScenario(), **change)


def test_noise_free_average_is_truth():
    record, truth = synthesize_impact(QUIET)
    avg = head_frame_average(record)
    rms = np.sqrt(np.mean((avg.samples - truth.angular_velocity.samples) ** 2))
    assert rms < 1e-9


def test_deterministic_under_seed():
    a, _ = synthesize_impact(SyntheticScenario(), seed=5)
    b, _ = synthesize_impact(SyntheticScenario(), seed=5)
    c, _ = synthesize_impact(SyntheticScenario(), seed=6)
    for sid in a.sensors:
        assert np.array_equal(a.sensors[sid].gyro.samples, b.sensors[sid].gyro.samples)
        assert np.array_equal(a.sensors[sid].accel_hi.samples, b.sensors[sid].accel_hi.samples)
    assert not np.array_equal(a.sensors["BT1"].gyro.samples, c.sensors["BT1"].gyro.samples)


def test_white_noise_mean_is_zero():
    sc = replace(SyntheticScenario(), noise_amplitude=0.0)
    record, truth = synthesize_impact(sc, seed=11)
    n = len(truth.angular_velocity)
    for m in record.mounts:
        resid = to_head_frame(record.sensors[m.sensor_id].gyro, m).samples - truth.angular_velocity.samples
        assert np.all(np.abs(resid.mean(axis=0)) < 3 * sc.gyro_noise_sd / math.sqrt(n))


def test_transient_noise_confined_to_contact_window():
    sc = replace(SyntheticScenario(), gyro_noise_sd=0.0)
    record, truth = synthesize_impact(sc)
    t = truth.angular_velocity.times - truth.trigger_time
    outside = (t < -1e-12) | (t > sc.noise_duration + 1e-12)
    for m in record.mounts:
        resid = to_head_frame(record.sensors[m.sensor_id].gyro, m).samples - truth.angular_velocity.samples
        assert np.abs(resid[outside]).max() < 1e-9
        assert np.abs(resid[~outside]).max() > 1.0


def test_trigger_detected_at_rotation_start():
    record, truth = synthesize_impact(QUIET)
    kin = reconstruct(record)
    assert kin.trigger_time == pytest.approx(truth.trigger_time, abs=1e-12)


@settings(max_examples=50)
@given(a=st.floats(0, 180), b=st.floats(0, 180), far=st.floats(0, 1))
def test_decay_non_increasing(a, b, far):
    lo, hi = sorted((a, b))
    assert decay_factor(lo, far) >= decay_factor(hi, far)
    assert decay_factor(0, far) == 1.0


def test_noise_separated_scenario():
    record, truth = synthesize_impact(SyntheticScenario())
    d = reconstruct(record).decision
    assert d.branch is Branch.NOISE_SEPARATED
    assert d.f_n > d.f_ss
