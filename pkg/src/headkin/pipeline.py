"""End-to-end reconstruction of head rotational kinematics for one impact.

Steps: rotate every gyro into the head frame, average the array, find the
trigger from the averaged accelerations, transform each axis of the windowed
average, pick one cutoff for the impact, low-pass, then differentiate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .errors import DegenerateSignalError, NoImpactFoundError
from .filtering import (
    FilterDecision,
    butterworth_lowpass,
    decide_cutoff,
    five_point_derivative,
)
from .fusion import (
    G,
    LOW_G_FULL_SCALE,
    ImpactRecord,
    average_angular_velocity,
    detect_impact_start,
    merge_accel,
    to_head_frame,
)
from .timeseries import Vec3Series, align, extract_window, resultant
from .wavelet import cwt


@dataclass(frozen=True)
class HeadKinematics:
    """Reconstructed kinematics on the analysis window, time measured from the trigger.

    ``angular_acceleration`` is four samples shorter than ``angular_velocity``
    (the stencil drops two at each end). ``pla`` is None when the record has no
    accelerometer streams.
    """

    angular_velocity: Vec3Series
    angular_acceleration: Vec3Series
    prv: float
    pra: float
    pla: float | None
    decision: FilterDecision
    axis_decisions: tuple[FilterDecision | None, ...]
    unfiltered: Vec3Series
    trigger_time: float


def head_frame_average(record: ImpactRecord) -> Vec3Series:
    """Mean head-frame angular velocity of the array on the first gyro's grid."""
    gyros = [record.sensors[m.sensor_id].gyro for m in record.mounts]
    gyros = align(gyros, gyros[0].dt)
    rotated = [to_head_frame(g, m) for g, m in zip(gyros, record.mounts)]
    return average_angular_velocity(rotated)


def head_frame_acceleration(record: ImpactRecord, dt: float, saturation_factor: float = 0.9) -> Vec3Series | None:
    """Merged (low-g / high-g) accelerations, rotated and averaged across sensors."""
    per_sensor = []
    for mount in record.mounts:
        streams = record.sensors[mount.sensor_id]
        lo, hi = streams.accel_lo, streams.accel_hi
        if lo is not None and hi is not None:
            lo, hi = align([lo, hi], dt)
            acc = merge_accel(lo, hi, saturation_factor * LOW_G_FULL_SCALE)
        elif lo is not None or hi is not None:
            acc = align([lo if lo is not None else hi], dt)[0]
        else:
            continue
        per_sensor.append(to_head_frame(acc, mount))
    if not per_sensor:
        return None
    return average_angular_velocity(align(per_sensor, dt))


def _peak(series: Vec3Series, t_lo: float, t_hi: float) -> float:
    t = series.times
    mask = (t >= t_lo - 1e-9) & (t <= t_hi + 1e-9)
    return float(resultant(series).samples[mask].max())


def reconstruct(record: ImpactRecord, config: PipelineConfig | None = None) -> HeadKinematics:
    cfg = config or PipelineConfig()
    window = cfg.window
    omega = head_frame_average(record)
    dt = omega.dt
    accel = head_frame_acceleration(record, dt, cfg.saturation_factor)

    trigger = record.trigger_time
    if trigger is None:
        if accel is None:
            raise NoImpactFoundError("no trigger time and no accelerometer streams to detect one")
        trigger = detect_impact_start(accel, cfg.trigger_g * G)
    # snap to the gyro grid so beta = 0 is a sample
    trigger = omega.start_time + round((trigger - omega.start_time) / dt) * dt

    raw = extract_window(omega, trigger, window).shifted(-trigger)
    beta_end = round(window.beta_end / dt) * dt
    grid = cfg.scale_grid

    peaks, spectra = [], []
    for k in range(3):
        spec = cwt(raw.axis(k), grid, [0.0, beta_end])
        keep = ~spec.above_nyquist
        peaks.append(float(np.abs(spec.coefficients[0, keep]).max()))
        spectra.append(spec)
    strongest = max(peaks)
    if not strongest > 0:
        raise DegenerateSignalError("averaged angular velocity vanishes at the trigger")

    axis_decisions: list[FilterDecision | None] = []
    for peak, spec in zip(peaks, spectra):
        if peak == 0 or peak < cfg.axis_floor * strongest:
            axis_decisions.append(None)
        else:
            axis_decisions.append(decide_cutoff(spec, beta_end, cfg.threshold, cfg.cap_hz))
    decision = max((d for d in axis_decisions if d is not None), key=lambda d: d.f_0)

    filtered_full = butterworth_lowpass(omega, decision.f_0, cfg.filter_order, cfg.filter_mode)
    velocity = extract_window(filtered_full, trigger, window).shifted(-trigger)
    acceleration = five_point_derivative(velocity)
    post = window.post_trigger
    pla = None
    if accel is not None:
        pla = _peak(extract_window(accel, trigger, window).shifted(-trigger), 0.0, post)
    return HeadKinematics(
        angular_velocity=velocity,
        angular_acceleration=acceleration,
        prv=_peak(velocity, 0.0, post),
        pra=_peak(acceleration, 0.0, post),
        pla=pla,
        decision=decision,
        axis_decisions=tuple(axis_decisions),
        unfiltered=raw,
        trigger_time=float(trigger),
    )
