"""Discretize the nearest visible opponent into one of 37 x 8 x 4 = 1184 states."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

from aimpilot.services.config import CodecConfig

VELOCITY_BUCKETS = 37
ROTATION_SECTORS = 8
DISTANCE_BANDS = 4
STATE_COUNT = VELOCITY_BUCKETS * ROTATION_SECTORS * DISTANCE_BANDS

STATIONARY = 0

DEFAULT_CODEC = CodecConfig()


class StateCodecError(ValueError):
    """Raised when an observation or state component is out of range."""


class RotationSector(IntEnum):
    BL = 0
    FL3 = 1
    FL2 = 2
    FL1 = 3
    FR1 = 4
    FR2 = 5
    FR3 = 6
    BR = 7


class DistanceBand(IntEnum):
    CLOSE = 0
    REGULAR = 1
    MEDIUM = 2
    FAR = 3


_ROTATION_LABELS = ("BL", "F-L3", "F-L2", "F-L1", "F-R1", "F-R2", "F-R3", "BR")
# lower edges of BL..BR; BR closes at +180 inclusive
_ROTATION_EDGES = (-180.0, -90.0, -60.0, -30.0, 0.0, 30.0, 60.0, 90.0)


@dataclass(frozen=True)
class RelativeObservation:
    """Opponent motion and pose in the learner's frame (UU, UU/s, degrees)."""

    vel_forward: float
    vel_lateral: float
    facing_angle: float
    distance: float

    def __post_init__(self) -> None:
        if not (-180.0 < self.facing_angle <= 180.0):
            raise StateCodecError(f"facing_angle {self.facing_angle} outside (-180, 180]")
        if self.distance < 0:
            raise StateCodecError(f"distance {self.distance} is negative")


@dataclass(frozen=True)
class StateKey:
    velocity_bucket: int
    rotation_sector: int
    distance_band: int
    index: int

    def __str__(self) -> str:
        return describe_state(self.index)


def normalize_angle(degrees: float) -> float:
    """Map any finite angle onto (-180, 180]."""
    wrapped = math.fmod(degrees, 360.0)
    if wrapped > 180.0:
        wrapped -= 360.0
    elif wrapped <= -180.0:
        wrapped += 360.0
    return wrapped


def _speed_level(component: float, edges: tuple[float, float]) -> int:
    magnitude = abs(component)
    if magnitude < edges[0]:
        return 1
    if magnitude < edges[1]:
        return 2
    return 3


def encode_velocity(
    vel_forward: float, vel_lateral: float, codec: CodecConfig = DEFAULT_CODEC
) -> int:
    if not (math.isfinite(vel_forward) and math.isfinite(vel_lateral)):
        raise StateCodecError("velocity components must be finite")
    if max(abs(vel_forward), abs(vel_lateral)) < codec.stationary_threshold:
        return STATIONARY

    backward = 1 if vel_forward < 0 else 0
    right = 1 if vel_lateral >= 0 else 0
    fb = backward * 3 + _speed_level(vel_forward, codec.speed_edges) - 1
    lr = (1 - right) * 3 + _speed_level(vel_lateral, codec.speed_edges) - 1
    return 1 + fb * 6 + lr


def velocity_label(bucket: int) -> str:
    if not 0 <= bucket < VELOCITY_BUCKETS:
        raise StateCodecError(f"velocity bucket {bucket} out of range")
    if bucket == STATIONARY:
        return "Stationary"
    fb, lr = divmod(bucket - 1, 6)
    fb_dir = "B" if fb >= 3 else "F"
    lr_dir = "L" if lr >= 3 else "R"
    return f"{fb_dir}{fb % 3 + 1}/{lr_dir}{lr % 3 + 1}"


def encode_rotation(facing_angle: float) -> int:
    if not (-180.0 < facing_angle <= 180.0):
        raise StateCodecError(f"facing_angle {facing_angle} outside (-180, 180]")
    for sector in reversed(RotationSector):
        if facing_angle >= _ROTATION_EDGES[sector]:
            return int(sector)
    return int(RotationSector.BL)


def encode_distance(distance: float, codec: CodecConfig = DEFAULT_CODEC) -> int:
    if distance < 0:
        raise StateCodecError(f"distance {distance} is negative")
    for band, edge in enumerate(codec.distance_edges):
        if distance < edge:
            return band
    return int(DistanceBand.FAR)


def compose_state(velocity_bucket: int, rotation_sector: int, distance_band: int) -> StateKey:
    if not 0 <= velocity_bucket < VELOCITY_BUCKETS:
        raise StateCodecError(f"velocity bucket {velocity_bucket} out of range")
    if not 0 <= rotation_sector < ROTATION_SECTORS:
        raise StateCodecError(f"rotation sector {rotation_sector} out of range")
    if not 0 <= distance_band < DISTANCE_BANDS:
        raise StateCodecError(f"distance band {distance_band} out of range")
    index = (velocity_bucket * ROTATION_SECTORS + rotation_sector) * DISTANCE_BANDS + distance_band
    return StateKey(velocity_bucket, rotation_sector, distance_band, index)


def decompose_state(index: int) -> StateKey:
    if not 0 <= index < STATE_COUNT:
        raise StateCodecError(f"state index {index} out of range")
    rest, distance_band = divmod(index, DISTANCE_BANDS)
    velocity_bucket, rotation_sector = divmod(rest, ROTATION_SECTORS)
    return StateKey(velocity_bucket, rotation_sector, distance_band, index)


def encode(observation: RelativeObservation, codec: CodecConfig = DEFAULT_CODEC) -> StateKey:
    return compose_state(
        encode_velocity(observation.vel_forward, observation.vel_lateral, codec),
        encode_rotation(observation.facing_angle),
        encode_distance(observation.distance, codec),
    )


def describe_state(index: int) -> str:
    key = decompose_state(index)
    return (
        f"{velocity_label(key.velocity_bucket)} | "
        f"{_ROTATION_LABELS[key.rotation_sector]} | "
        f"{DistanceBand(key.distance_band).name.title()}"
    )
