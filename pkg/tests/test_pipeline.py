from dataclasses import replace

import numpy as np
import pytest

from headkin.config import PipelineConfig
from headkin.errors import NoImpactFoundError
from headkin.filtering import Branch
from headkin.fusion import ImpactRecord, SensorStreams
from headkin.pipeline import head_frame_acceleration, reconstruct
from headkin.synth import SyntheticScenario, synthesize_impact

QUIET = SyntheticScenario(noise_amplitude=0.0, gyro_noise_sd=0.0)


def test_quiet_scenario_peaks():
    record, truth = synthesize_impact(QUIET)
    kin = reconstruct(record)
    assert kin.prv == pytest.approx(truth.prv, rel=0.01)
    assert kin.pra == pytest.approx(truth.pra, rel=0.02)
    assert kin.pla == pytest.approx(200.0, rel=0.05)
    assert kin.angular_velocity.start_time == pytest.approx(-0.05, abs=1e-3)
    assert len(kin.angular_acceleration) == len(kin.angular_velocity) - 4


def test_single_axis_motion_skips_empty_axes():
    record, _ = synthesize_impact(replace(QUIET, pulse_axis=(0, 0, 1)))
    kin = reconstruct(record)
    assert kin.axis_decisions[0] is None and kin.axis_decisions[1] is None
    assert kin.decision == kin.axis_decisions[2]


def test_decision_is_max_over_axes():
    record, _ = synthesize_impact(SyntheticScenario(pulse_axis=(1, 1, 0.5)))
    kin = reconstruct(record)
    used = [d for d in kin.axis_decisions if d is not None]
    assert kin.decision.f_0 == max(d.f_0 for d in used)


def test_explicit_trigger_without_accelerometers():
    record, truth = synthesize_impact(QUIET)
    bare = ImpactRecord(
        {k: SensorStreams(v.gyro) for k, v in record.sensors.items()}, record.mounts, truth.trigger_time
    )
    assert head_frame_acceleration(bare, 1 / 1125) is None
    kin = reconstruct(bare)
    assert kin.pla is None
    assert kin.prv == pytest.approx(truth.prv, rel=0.01)
    with pytest.raises(NoImpactFoundError):
        reconstruct(replace(bare, trigger_time=None))


def test_noisy_scenario_is_noise_separated():
    record, truth = synthesize_impact(SyntheticScenario())
    kin = reconstruct(record)
    assert kin.decision.branch is Branch.NOISE_SEPARATED
    raw_peak = np.linalg.norm(kin.unfiltered.samples, axis=1).max()
    assert abs(kin.prv - truth.prv) < abs(raw_peak - truth.prv)


def test_mode_changes_output_not_decision():
    record, _ = synthesize_impact(SyntheticScenario())
    a = reconstruct(record)
    b = reconstruct(record, replace(PipelineConfig(), filter_mode="causal"))
    assert a.decision == b.decision
    assert not np.allclose(a.angular_velocity.samples, b.angular_velocity.samples)
