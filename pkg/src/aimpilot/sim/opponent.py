"""Scripted fixed-strategy opponent and the learner's scripted strafe."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from aimpilot.services.config import OpponentConfig
from aimpilot.sim.geometry import Vec3

if TYPE_CHECKING:
    from aimpilot.sim.combat import Arena, Avatar

MAX_SPEED = 440.0
MIN_LEVEL = 1
MAX_LEVEL = 5
_WAYPOINT_TRIES = 8


@dataclass
class OpponentBrain:
    waypoint: Vec3 | None = None
    speed: float = 0.0
    ticks_left: int = 0
    blocked: bool = False


@dataclass(frozen=True)
class OpponentStep:
    velocity: Vec3
    fires: bool


def validate_level(level: int) -> int:
    if not MIN_LEVEL <= level <= MAX_LEVEL:
        raise ValueError(f"opponent level must be in {MIN_LEVEL}..{MAX_LEVEL}, got {level}")
    return level


def fire_probability(level: int, distance: float, cfg: OpponentConfig) -> float:
    base = cfg.base_fire_probability[validate_level(level) - 1]
    if distance <= 0:
        return base
    return base * min(1.0, max(0.2, 500.0 / distance))


def _clamp_speed(vx: float, vy: float) -> Vec3:
    speed = math.hypot(vx, vy)
    if speed > MAX_SPEED:
        scale = MAX_SPEED / speed
        vx, vy = vx * scale, vy * scale
    return (vx, vy, 0.0)


def _pick_waypoint(
    target: Avatar, arena: Arena, rng: np.random.Generator, cfg: OpponentConfig
) -> Vec3 | None:
    lo, hi = cfg.waypoint_range
    for _ in range(_WAYPOINT_TRIES):
        angle = rng.uniform(0.0, 2 * math.pi)
        dist = rng.uniform(lo, hi)
        x, y = arena.clamp_xy(
            target.position[0] + dist * math.cos(angle),
            target.position[1] + dist * math.sin(angle),
        )
        point = (x, y, target.position[2])
        if arena.is_free(point):
            return point
    return None


def _retarget(
    brain: OpponentBrain,
    target: Avatar,
    arena: Arena,
    rng: np.random.Generator,
    cfg: OpponentConfig,
) -> None:
    brain.waypoint = _pick_waypoint(target, arena, rng, cfg)
    if rng.random() < cfg.pause_probability:
        brain.speed = 0.0
    else:
        brain.speed = float(cfg.speed_bands[int(rng.integers(len(cfg.speed_bands)))])
    lo, hi = cfg.segment_ticks
    brain.ticks_left = int(rng.integers(lo, hi + 1))
    brain.blocked = False


def opponent_policy_step(
    brain: OpponentBrain,
    opponent: Avatar,
    target: Avatar,
    arena: Arena,
    level: int,
    rng: np.random.Generator,
    cfg: OpponentConfig,
    *,
    line_of_sight: bool,
    tick_seconds: float,
) -> OpponentStep:
    """Waypoint strafing around the target with speeds drawn from the three speed bands.

    Return fire lands with probability base(level) * clamp(500 / distance, 0.2, 1.0).
    """
    if not opponent.alive:
        return OpponentStep((0.0, 0.0, 0.0), False)

    ox, oy, _ = opponent.position
    reached = False
    if brain.waypoint is not None:
        reached = math.hypot(brain.waypoint[0] - ox, brain.waypoint[1] - oy) <= max(
            brain.speed * tick_seconds, 5.0
        )
    if brain.waypoint is None or brain.ticks_left <= 0 or brain.blocked or reached:
        _retarget(brain, target, arena, rng, cfg)
    brain.ticks_left -= 1

    velocity: Vec3 = (0.0, 0.0, 0.0)
    if brain.waypoint is not None and brain.speed > 0:
        dx = brain.waypoint[0] - ox
        dy = brain.waypoint[1] - oy
        length = math.hypot(dx, dy)
        if length > 0:
            velocity = _clamp_speed(dx / length * brain.speed, dy / length * brain.speed)

    distance = math.dist(opponent.position, target.position)
    fires = line_of_sight and rng.random() < fire_probability(level, distance, cfg)
    return OpponentStep(velocity, fires)


def learner_strafe_velocity(learner: Avatar, opponent: Avatar, sign: int, speed: float) -> Vec3:
    """Circle-strafe: move across the learner->opponent line, to the right when sign > 0."""
    dx = opponent.position[0] - learner.position[0]
    dy = opponent.position[1] - learner.position[1]
    length = math.hypot(dx, dy)
    if length == 0 or speed == 0:
        return (0.0, 0.0, 0.0)
    return _clamp_speed(sign * speed * dy / length, -sign * speed * dx / length)
