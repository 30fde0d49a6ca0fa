"""Synthetic impacts with known ground truth, and the Hertz contact-time estimate.

A scenario is a rigid-body haversine angular-velocity pulse seen by every sensor
of the array, plus per-sensor transient "contact" vibrations that die out within
the contact window, plus white gyro noise. A linear-acceleration pulse is
embedded so that the 3 g trigger fires exactly at the start of the rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidInputError
from .fusion import (
    G,
    LOW_G_FULL_SCALE,
    TRIGGER_THRESHOLD,
    ImpactLocation,
    ImpactRecord,
    SensorMount,
    SensorStreams,
)
from .timeseries import Vec3Series

GYRO_RATE = 1125.0
HIGH_G_RATE = 1600.0
LOW_G_RATE = 1125.0
# accuracy figures of the sensor datasheet, read as 3-sigma bounds
GYRO_NOISE_SD = math.radians(5.0) / 3
LOW_G_NOISE_SD = 0.05 * G / 3
HIGH_G_NOISE_SD = 6.0 * G / 3
HIGH_G_FULL_SCALE = 200 * G
NOISE_TONES = 3
NOISE_RESIDUAL = 0.01  # envelope left at the end of the contact window


def hertz_contact_duration(mass: float, effective_modulus: float, radius: float, speed: float) -> float:
    """Contact time of an elastic sphere striking a rigid surface (seconds).

    ``t_c = 2.94 * (5 m / (4 E* sqrt(R)))**(2/5) * v**(-1/5)``
    """
    if min(mass, effective_modulus, radius, speed) <= 0:
        raise InvalidInputError("mass, modulus, radius and speed must all be positive")
    return 2.94 * (5 * mass / (4 * effective_modulus * math.sqrt(radius))) ** 0.4 * speed ** -0.2


def rotation_z(angle_deg: float) -> NDArray[np.float64]:
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def angular_distance(a_deg: float, b_deg: float) -> float:
    d = abs(a_deg - b_deg) % 360.0
    return min(d, 360.0 - d)


def decay_factor(distance_deg: float, far_value: float = 0.2) -> float:
    """Linear falloff of contact noise from 1 at the impact to ``far_value`` opposite it."""
    return 1.0 - (1.0 - far_value) * min(abs(distance_deg), 180.0) / 180.0


LOCATION_ANGLES = {
    ImpactLocation.FRONT: 0.0,
    ImpactLocation.FRONT_SIDE: 45.0,
    ImpactLocation.SIDE: 90.0,
    ImpactLocation.BACK_SIDE: 135.0,
    ImpactLocation.BACK: 180.0,
}


@dataclass(frozen=True)
class SyntheticScenario:
    pulse_amplitude: float = 20.0
    pulse_width: float = 0.080
    pulse_axis: tuple[float, float, float] = (0.6, 0.8, 0.0)
    noise_band: tuple[float, float] = (100.0, 250.0)
    noise_amplitude: float = 60.0
    noise_duration: float = 0.025
    sensor_count: int = 5
    sensor_position_angles: tuple[float, ...] = (130.0, 155.0, 180.0, 205.0, 230.0)
    impact_angle: float = 180.0
    gyro_noise_sd: float = GYRO_NOISE_SD
    sample_rate: float = GYRO_RATE
    duration: float = 1.0
    impact_time: float = 0.4
    peak_linear_acceleration: float = 200.0
    contact_duration: float = 0.025
    far_decay: float = 0.2
    location: ImpactLocation = ImpactLocation.BACK
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pulse_axis", tuple(float(v) for v in self.pulse_axis))
        object.__setattr__(self, "noise_band", tuple(float(v) for v in self.noise_band))
        object.__setattr__(self, "sensor_position_angles", tuple(float(v) for v in self.sensor_position_angles))
        object.__setattr__(self, "location", ImpactLocation(self.location))
        if self.pulse_width <= 0:
            raise InvalidInputError("pulse_width must be positive")
        if self.sensor_count < 1:
            raise InvalidInputError("sensor_count must be >= 1")
        if len(self.sensor_position_angles) != self.sensor_count:
            raise InvalidInputError("need one position angle per sensor")
        lo, hi = self.noise_band
        if not 0 < lo <= hi < self.sample_rate / 2:
            raise InvalidInputError("noise_band must lie within (0, Nyquist)")
        if np.linalg.norm(self.pulse_axis) == 0:
            raise InvalidInputError("pulse_axis must be non-zero")
        if self.peak_linear_acceleration <= TRIGGER_THRESHOLD:
            raise InvalidInputError("linear acceleration pulse must exceed the 3 g trigger")
        if self.impact_time - self.contact_duration < 0 or self.impact_time + self.pulse_width > self.duration:
            raise InvalidInputError("impact does not fit inside the recording")

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def axis_unit(self) -> NDArray[np.float64]:
        a = np.asarray(self.pulse_axis, dtype=np.float64)
        return a / np.linalg.norm(a)

    def mounts(self) -> list[SensorMount]:
        return [
            SensorMount(f"BT{i + 1}", rotation_z(angle), angle)
            for i, angle in enumerate(self.sensor_position_angles)
        ]


@dataclass(frozen=True)
class GroundTruth:
    """Noise-free head angular velocity and its closed-form peaks."""

    angular_velocity: Vec3Series
    prv: float
    pra: float
    trigger_time: float = field(default=0.0)


def haversine(t: NDArray[np.float64], amplitude: float, width: float) -> NDArray[np.float64]:
    """``amplitude * sin(pi t / width)**2`` on ``[0, width]``, zero elsewhere."""
    inside = (t >= 0) & (t <= width)
    return np.where(inside, amplitude * np.sin(np.pi * t / width) ** 2, 0.0)


def generate_ground_truth(scenario: SyntheticScenario) -> GroundTruth:
    n = int(round(scenario.duration * scenario.sample_rate)) + 1
    t = np.arange(n) * scenario.dt
    # the rotation starts on the grid sample nearest the nominal impact time
    t_imp = round(scenario.impact_time / scenario.dt) * scenario.dt
    mag = haversine(t - t_imp, scenario.pulse_amplitude, scenario.pulse_width)
    omega = Vec3Series(0.0, scenario.dt, mag[:, None] * scenario.axis_unit[None, :])
    a, w = scenario.pulse_amplitude, scenario.pulse_width
    return GroundTruth(omega, prv=a, pra=a * math.pi / w, trigger_time=t_imp)


def noise_frequencies(scenario: SyntheticScenario, rng: np.random.Generator) -> NDArray[np.float64]:
    """One tone frequency drawn uniformly from each equal slice of the noise band."""
    edges = np.linspace(*scenario.noise_band, NOISE_TONES + 1)
    return rng.uniform(edges[:-1], edges[1:])


def _transient_noise(
    scenario: SyntheticScenario,
    t: NDArray[np.float64],
    t0: float,
    scale: float,
    freqs: NDArray[np.float64],
    rng: np.random.Generator,
) -> NDArray[np.float64]:
    """Damped tones about the rotation axis with sensor-specific random phases,
    active only during the contact window."""
    tau = scenario.noise_duration / math.log(1.0 / NOISE_RESIDUAL)
    s = t - t0
    active = (s >= 0) & (s <= scenario.noise_duration)
    env = np.where(active, np.exp(-np.where(active, s, 0.0) / tau), 0.0)
    phases = rng.uniform(0, 2 * np.pi, freqs.size)
    total = np.sin(2 * np.pi * freqs[None, :] * s[:, None] + phases[None, :]).sum(axis=1)
    return np.outer(env * total * scale * scenario.noise_amplitude, scenario.axis_unit)


def _linear_pulse_start(scenario: SyntheticScenario, crossing: float) -> float:
    """Start of the acceleration haversine so that it reaches 3 g at ``crossing``."""
    frac = math.asin(math.sqrt(TRIGGER_THRESHOLD / scenario.peak_linear_acceleration)) / math.pi
    return crossing - frac * scenario.contact_duration


def synthesize_impact(scenario: SyntheticScenario, seed: int | None = None) -> tuple[ImpactRecord, GroundTruth]:
    """Build a sensor-frame recording of ``scenario`` and its ground truth.

    All randomness comes from ``seed`` (default ``scenario.seed``).
    """
    rng = np.random.default_rng(scenario.seed if seed is None else seed)
    truth = generate_ground_truth(scenario)
    t = truth.angular_velocity.times
    t_imp = truth.trigger_time
    mounts = scenario.mounts()

    # linear acceleration in the head frame, directed opposite the impact site
    a_imp = math.radians(scenario.impact_angle)
    lin_dir = -np.array([math.cos(a_imp), math.sin(a_imp), 0.0])
    t_lin = _linear_pulse_start(scenario, t_imp - 0.25 * scenario.dt)
    n_lo = int(round(scenario.duration * LOW_G_RATE)) + 1
    n_hi = int(round(scenario.duration * HIGH_G_RATE)) + 1
    t_lo = np.arange(n_lo) / LOW_G_RATE
    t_hi = np.arange(n_hi) / HIGH_G_RATE
    acc_lo = haversine(t_lo - t_lin, scenario.peak_linear_acceleration, scenario.contact_duration)
    acc_hi = haversine(t_hi - t_lin, scenario.peak_linear_acceleration, scenario.contact_duration)

    # the headband vibrates at shared frequencies; each sensor sees its own phases
    freqs = noise_frequencies(scenario, rng)
    sensors = {}
    for mount in mounts:
        scale = decay_factor(angular_distance(mount.position_angle, scenario.impact_angle), scenario.far_decay)
        omega = truth.angular_velocity.samples.copy()
        if scenario.noise_amplitude != 0:
            omega += _transient_noise(scenario, t, t_imp, scale, freqs, rng)
        if scenario.gyro_noise_sd != 0:
            omega += rng.normal(0.0, scenario.gyro_noise_sd, omega.shape)
        r_t = mount.rotation.T  # head -> sensor
        lo = np.outer(acc_lo, lin_dir) @ r_t.T + rng.normal(0.0, LOW_G_NOISE_SD, (n_lo, 3))
        hi = np.outer(acc_hi, lin_dir) @ r_t.T + rng.normal(0.0, HIGH_G_NOISE_SD, (n_hi, 3))
        sensors[mount.sensor_id] = SensorStreams(
            gyro=Vec3Series(0.0, scenario.dt, omega @ r_t.T),
            accel_lo=Vec3Series(0.0, 1.0 / LOW_G_RATE, np.clip(lo, -LOW_G_FULL_SCALE, LOW_G_FULL_SCALE)),
            accel_hi=Vec3Series(0.0, 1.0 / HIGH_G_RATE, np.clip(hi, -HIGH_G_FULL_SCALE, HIGH_G_FULL_SCALE)),
        )
    record = ImpactRecord(sensors, tuple(mounts), None, scenario.location)
    return record, truth
