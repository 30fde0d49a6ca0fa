"""Sensor-array fusion: frame alignment, accelerometer merging, trigger detection
and averaging of the gyroscope array into one headband angular velocity."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidInputError, InvalidMountError, NoImpactFoundError
from .timeseries import Vec3Series, same_grid

G = 9.81  # keeps 3 g = 29.43 m/s^2 as documented
TRIGGER_THRESHOLD = 3 * G
LOW_G_FULL_SCALE = 16 * G
SATURATION_FACTOR = 0.9


class ImpactLocation(str, Enum):
    FRONT = "front"
    FRONT_SIDE = "front-side"
    SIDE = "side"
    BACK_SIDE = "back-side"
    BACK = "back"
    UNKNOWN = "unknown"


def _validate_rotation(rotation: ArrayLike, tol: float = 1e-9) -> NDArray[np.float64]:
    r = np.array(rotation, dtype=np.float64).reshape(3, 3) if np.size(rotation) == 9 else None
    if r is None or not np.all(np.isfinite(r)):
        raise InvalidMountError("rotation must be a finite 3x3 matrix")
    if not np.allclose(r.T @ r, np.eye(3), rtol=0, atol=tol):
        raise InvalidMountError("rotation is not orthonormal")
    if abs(np.linalg.det(r) - 1.0) > tol:
        raise InvalidMountError("rotation must be proper (det = +1)")
    r.setflags(write=False)
    return r


@dataclass(frozen=True)
class SensorMount:
    """Placement of one sensor: ``rotation`` maps sensor-frame vectors into the
    head frame; ``position_angle`` is the angular position around the head in
    degrees."""

    sensor_id: str
    rotation: NDArray[np.float64] = field(repr=False)
    position_angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rotation", _validate_rotation(self.rotation))
        object.__setattr__(self, "position_angle", float(self.position_angle))


@dataclass(frozen=True)
class SensorStreams:
    gyro: Vec3Series
    accel_lo: Vec3Series | None = None
    accel_hi: Vec3Series | None = None


@dataclass(frozen=True)
class ImpactRecord:
    """All streams belonging to one impact.

    ``sensors`` maps sensor id to its raw streams (sensor frame); ``mounts`` lists
    the mount for every sensor, in array order. ``trigger_time`` may be ``None``
    until detected.
    """

    sensors: dict[str, SensorStreams]
    mounts: tuple[SensorMount, ...]
    trigger_time: float | None = None
    location: ImpactLocation = ImpactLocation.UNKNOWN
    impact_id: str = "impact"

    def __post_init__(self):
        object.__setattr__(self, "mounts", tuple(self.mounts))
        object.__setattr__(self, "location", ImpactLocation(self.location))
        if not self.mounts:
            raise InvalidInputError("an impact record needs at least one sensor")
        ids = [m.sensor_id for m in self.mounts]
        if sorted(ids) != sorted(self.sensors):
            raise InvalidInputError(f"mount ids {ids} do not match streams {sorted(self.sensors)}")

    def __len__(self) -> int:
        return len(self.mounts)


def to_head_frame(gyro: Vec3Series, mount: SensorMount) -> Vec3Series:
    r = mount.rotation
    return Vec3Series(gyro.start_time, gyro.dt, gyro.samples @ r.T)


def merge_accel(
    low_g: Vec3Series, high_g: Vec3Series, saturation: float = SATURATION_FACTOR * LOW_G_FULL_SCALE
) -> Vec3Series:
    """Per sample, keep the low-g reading unless its magnitude reaches
    ``saturation``, in which case the high-g reading replaces it."""
    if not same_grid(low_g, high_g):
        raise InvalidInputError("low-g and high-g streams must share a sample grid")
    saturated = np.linalg.norm(low_g.samples, axis=1) >= saturation
    out = np.where(saturated[:, None], high_g.samples, low_g.samples)
    return Vec3Series(low_g.start_time, low_g.dt, out)


def detect_impact_start(accel: Vec3Series, threshold: float = TRIGGER_THRESHOLD) -> float:
    """Time of the first sample whose resultant acceleration is >= ``threshold``."""
    if threshold <= 0:
        raise InvalidInputError("threshold must be positive")
    hits = np.flatnonzero(np.linalg.norm(accel.samples, axis=1) >= threshold)
    if hits.size == 0:
        raise NoImpactFoundError(f"acceleration never reaches {threshold:g} m/s^2")
    return float(accel.times[hits[0]])


def average_angular_velocity(head_frame_gyros: Sequence[Vec3Series]) -> Vec3Series:
    """Component-wise mean of the array's head-frame angular velocities."""
    if len(head_frame_gyros) == 0:
        raise InvalidInputError("no gyro streams to average")
    first = head_frame_gyros[0]
    for g in head_frame_gyros[1:]:
        if not same_grid(first, g):
            raise InvalidInputError("gyro streams are not on a common grid")
    stacked = np.stack([g.samples for g in head_frame_gyros])
    return Vec3Series(first.start_time, first.dt, stacked.mean(axis=0))

