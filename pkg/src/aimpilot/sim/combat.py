"""Deterministic headless duel: learner bot vs. a scripted opponent.

One logic tick is 0.25 s of simulated time integrated over four physics sub-steps.
Damage dealt by the learner becomes observable `registration_delay` ticks after firing.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from aimpilot.learning.action_grid import ActionGridError, AimAction, aim_point
from aimpilot.learning.state_codec import RelativeObservation, normalize_angle
from aimpilot.services.config import ArenaConfig, SimulationConfig, WeaponConfig
from aimpilot.sim.event_log import EventLog
from aimpilot.sim.geometry import (
    Box,
    Vec3,
    direction_angles,
    direction_from_angles,
    heading_degrees,
)
from aimpilot.sim.opponent import (
    OpponentBrain,
    learner_strafe_velocity,
    opponent_policy_step,
    validate_level,
)

logger = logging.getLogger(__name__)

LOGIC_TICK_SECONDS = 0.25
PHYSICS_SUBSTEPS = 4
HALF_WIDTH = 25.0
HALF_HEIGHT = 50.0
MAX_HEALTH = 100.0

LEARNER = 0
OPPONENT = 1


class SimulationError(RuntimeError):
    """Raised for invalid commands or world operations."""


class EventKind(StrEnum):
    DMG = "DMG"
    KILL = "KILL"
    DEATH = "DEATH"


@dataclass
class Avatar:
    avatar_id: int
    position: Vec3
    velocity: Vec3 = (0.0, 0.0, 0.0)
    facing: float = 0.0
    health: float = MAX_HEALTH
    generation: int = 0

    @property
    def alive(self) -> bool:
        return self.health > 0

    @property
    def speed(self) -> float:
        return math.hypot(self.velocity[0], self.velocity[1])

    def box(self) -> Box:
        return Box.around(self.position, HALF_WIDTH, HALF_WIDTH, HALF_HEIGHT)


@dataclass(frozen=True)
class Arena:
    bounds: Box
    spawn_points: tuple[Vec3, ...]
    pillars: tuple[Box, ...] = ()

    @classmethod
    def from_config(cls, cfg: ArenaConfig) -> "Arena":
        return cls(
            bounds=Box((0.0, 0.0, 0.0), (cfg.width, cfg.depth, cfg.height)),
            spawn_points=tuple((x, y, HALF_HEIGHT) for x, y in cfg.spawn_points),
            pillars=tuple(
                Box((cx - h, cy - h, 0.0), (cx + h, cy + h, cfg.height))
                for cx, cy, h in cfg.pillars
            ),
        )

    def clamp_xy(self, x: float, y: float) -> tuple[float, float]:
        lo = self.bounds.minimum
        hi = self.bounds.maximum
        return (
            min(max(x, lo[0] + HALF_WIDTH), hi[0] - HALF_WIDTH),
            min(max(y, lo[1] + HALF_WIDTH), hi[1] - HALF_WIDTH),
        )

    def is_free(self, point: Vec3) -> bool:
        """True when an avatar centered at `point` fits inside the bounds and clear of pillars."""
        if self.clamp_xy(point[0], point[1]) != (point[0], point[1]):
            return False
        for pillar in self.pillars:
            if (
                pillar.minimum[0] - HALF_WIDTH < point[0] < pillar.maximum[0] + HALF_WIDTH
                and pillar.minimum[1] - HALF_WIDTH < point[1] < pillar.maximum[1] + HALF_WIDTH
            ):
                return False
        return True

    def line_of_sight(self, origin: Vec3, target: Vec3) -> bool:
        direction = tuple(t - o for o, t in zip(origin, target))
        length = math.sqrt(sum(c * c for c in direction))
        if length == 0:
            return True
        unit = tuple(c / length for c in direction)
        return all(pillar.ray_entry(origin, unit, length) is None for pillar in self.pillars)


@dataclass(frozen=True)
class DamageEvent:
    fired_tick: int
    registered_tick: int
    victim: int
    bullets: int
    damage: float
    victim_generation: int


@dataclass(frozen=True)
class WorldEvent:
    """What the learner-facing channel reports at `tick`."""

    kind: EventKind
    tick: int
    victim: int
    fired_tick: int | None = None
    damage: float | None = None


@dataclass(frozen=True)
class Command:
    shoot: bool
    action_id: int = 0


@dataclass(frozen=True)
class Observation:
    tick: int
    visible: bool
    relative: RelativeObservation | None


@dataclass(frozen=True)
class TickResult:
    observation: Observation
    events: list[WorldEvent]
    bullets_hit: int


@dataclass
class Scoreboard:
    kills: list[int] = field(default_factory=lambda: [0, 0])
    deaths: list[int] = field(default_factory=lambda: [0, 0])
    streak: list[int] = field(default_factory=lambda: [0, 0])
    best_streak: list[int] = field(default_factory=lambda: [0, 0])

    def record_kill(self, shooter: int, victim: int) -> None:
        self.kills[shooter] += 1
        self.streak[shooter] += 1
        self.best_streak[shooter] = max(self.best_streak[shooter], self.streak[shooter])
        self.deaths[victim] += 1
        self.streak[victim] = 0


def hit_test(
    origin: Vec3,
    aim: Vec3,
    spread_sample: tuple[float, float],
    target: Avatar,
    arena: Arena | None = None,
) -> bool:
    """Cast one bullet from `origin` toward `aim` perturbed by (yaw, pitch) degrees.

    The target is its 50 x 100 cross-section in the vertical plane through its center,
    facing the shooter. Hits when the ray crosses that rectangle before leaving the arena
    or striking a pillar.
    """
    direction = tuple(a - o for o, a in zip(origin, aim))
    if not any(direction):
        raise SimulationError("bullet origin and aim point coincide")
    yaw, pitch = direction_angles(direction)
    ray = direction_from_angles(yaw + spread_sample[0], pitch + spread_sample[1])

    t_hit = _cross_section_entry(origin, ray, target)
    if t_hit is None:
        return False
    if arena is not None:
        if t_hit > arena.bounds.ray_exit(origin, ray):
            return False
        for pillar in arena.pillars:
            t_block = pillar.ray_entry(origin, ray, t_hit)
            if t_block is not None and t_block < t_hit:
                return False
    return True


def _cross_section_entry(origin: Vec3, ray: Vec3, target: Avatar) -> float | None:
    tx, ty, tz = target.position
    dx, dy = tx - origin[0], ty - origin[1]
    reach = math.hypot(dx, dy)
    if reach == 0.0:
        # shooter stands inside the target column
        return target.box().ray_entry(origin, ray)
    fx, fy = dx / reach, dy / reach
    closing = ray[0] * fx + ray[1] * fy
    if closing <= 0.0:
        return None
    t = reach / closing
    px, py, pz = (origin[i] + t * ray[i] for i in range(3))
    lateral = (px - tx) * fy - (py - ty) * fx
    if abs(lateral) > HALF_WIDTH or abs(pz - tz) > HALF_HEIGHT:
        return None
    return t


def relative_observation(learner: Avatar, opponent: Avatar) -> RelativeObservation:
    """Opponent velocity and facing in the learner's frame; the learner faces the opponent."""
    dx = opponent.position[0] - learner.position[0]
    dy = opponent.position[1] - learner.position[1]
    bot_heading = heading_degrees(dx, dy) if (dx or dy) else learner.facing
    rad = math.radians(bot_heading)
    fx, fy = math.cos(rad), math.sin(rad)
    vx, vy, _ = opponent.velocity
    return RelativeObservation(
        vel_forward=vx * fx + vy * fy,
        vel_lateral=vx * fy - vy * fx,
        facing_angle=normalize_angle(bot_heading - opponent.facing),
        distance=math.dist(learner.position, opponent.position),
    )


class World:
    def __init__(
        self,
        config: SimulationConfig,
        rng: np.random.Generator,
        level: int = 3,
        event_log: EventLog | None = None,
    ) -> None:
        self.config = config
        self.rng = rng
        self.level = validate_level(level)
        self.arena = Arena.from_config(config.arena)
        self.weapon: WeaponConfig = config.weapon
        self.event_log = event_log
        self.tick_count = 0
        self.scoreboard = Scoreboard()
        self.brain = OpponentBrain()
        self.pending: deque[DamageEvent] = deque()
        self.recoil_ticks = 0
        self.strafe_sign = 1
        self.firing_ticks = 0

        first, second = self.rng.choice(len(self.arena.spawn_points), size=2, replace=False)
        self.avatars = [
            Avatar(LEARNER, self.arena.spawn_points[int(first)]),
            Avatar(OPPONENT, self.arena.spawn_points[int(second)]),
        ]
        self._face_each_other()

    @property
    def learner(self) -> Avatar:
        return self.avatars[LEARNER]

    @property
    def opponent(self) -> Avatar:
        return self.avatars[OPPONENT]

    def opponent_visible(self) -> bool:
        return self.arena.line_of_sight(self.learner.position, self.opponent.position)

    def observe(self) -> Observation:
        if not self.opponent_visible():
            return Observation(self.tick_count, False, None)
        return Observation(
            self.tick_count, True, relative_observation(self.learner, self.opponent)
        )

    def tick(self, command: Command) -> TickResult:
        t = self.tick_count
        action = self._resolve_action(command)
        learner, opponent = self.learner, self.opponent

        aim: Vec3 | None = None
        if action is not None:
            try:
                point = aim_point(opponent.position, learner.position, action, self.config.grid)
                aim = (float(point[0]), float(point[1]), float(point[2]))
            except ActionGridError:
                aim = None
        recoil = min(self.weapon.recoil_cap, self.weapon.recoil_drift * self.recoil_ticks)

        step = opponent_policy_step(
            self.brain,
            opponent,
            learner,
            self.arena,
            self.level,
            self.rng,
            self.config.opponent,
            line_of_sight=self.opponent_visible(),
            tick_seconds=LOGIC_TICK_SECONDS,
        )
        opponent.velocity = step.velocity
        if t % self.config.opponent.learner_strafe_ticks == 0 and t > 0:
            self.strafe_sign = -self.strafe_sign
        learner.velocity = learner_strafe_velocity(
            learner, opponent, self.strafe_sign, self.config.opponent.learner_strafe_speed
        )

        bullets_hit = 0
        schedule = _bullet_schedule(self.weapon.bullets_per_tick, PHYSICS_SUBSTEPS)
        dt = LOGIC_TICK_SECONDS / PHYSICS_SUBSTEPS
        for substep in range(PHYSICS_SUBSTEPS):
            if not self._move(opponent, dt):
                self.brain.blocked = True
            if not self._move(learner, dt):
                self.strafe_sign = -self.strafe_sign
            if action is None:
                continue
            for _ in range(schedule[substep]):
                spread = (
                    float(self.rng.normal(0.0, self.weapon.spread_stddev)),
                    float(self.rng.normal(0.0, self.weapon.spread_stddev)) + recoil,
                )
                if aim is None:
                    continue
                if hit_test(learner.position, aim, spread, opponent, self.arena):
                    bullets_hit += 1

        if action is not None:
            self.recoil_ticks += 1
            self.firing_ticks += 1
            self._log(t, "FIRE", f"aid={action.id} bullets={bullets_hit}")
            if bullets_hit:
                self.pending.append(
                    DamageEvent(
                        fired_tick=t,
                        registered_tick=t + self.weapon.registration_delay,
                        victim=OPPONENT,
                        bullets=bullets_hit,
                        damage=bullets_hit * self.weapon.damage_per_bullet,
                        victim_generation=opponent.generation,
                    )
                )
        else:
            self.recoil_ticks = 0

        self._update_facing()
        events = self._deliver(t)
        opponent_killed = any(event.kind is EventKind.KILL for event in events)
        if step.fires and not opponent_killed:
            events.extend(self._return_fire(t))

        self.tick_count += 1
        return TickResult(self.observe(), events, bullets_hit)

    def respawn(self, avatar_id: int) -> None:
        avatar = self.avatars[avatar_id]
        if avatar.alive:
            raise SimulationError(f"avatar {avatar_id} is alive and cannot respawn")
        other = self.avatars[1 - avatar_id]
        shooter = 1 - avatar_id
        self.scoreboard.record_kill(shooter, avatar_id)

        spawns = self.arena.spawn_points
        # skip the spawn nearest the survivor so the two avatars never coincide
        nearest = min(range(len(spawns)), key=lambda i: math.dist(spawns[i], other.position))
        choices = [i for i in range(len(spawns)) if i != nearest]
        avatar.position = spawns[choices[int(self.rng.integers(len(choices)))]]
        avatar.velocity = (0.0, 0.0, 0.0)
        avatar.health = MAX_HEALTH
        avatar.generation += 1
        if avatar_id == OPPONENT:
            self.brain = OpponentBrain()
        else:
            self.recoil_ticks = 0
        self._face_each_other()
        self._log(self.tick_count, "SPAWN", f"avatar={avatar_id}")
        logger.debug("Avatar %d respawned at %s", avatar_id, avatar.position)

    def _resolve_action(self, command: Command) -> AimAction | None:
        try:
            action = AimAction.from_id(command.action_id)
        except ActionGridError as exc:
            raise SimulationError(f"invalid action id {command.action_id}") from exc
        return action if command.shoot else None

    def _move(self, avatar: Avatar, dt: float) -> bool:
        x, y, z = avatar.position
        vx, vy, _ = avatar.velocity
        if vx == 0 and vy == 0:
            return True
        candidate = (x + vx * dt, y + vy * dt, z)
        if not self.arena.is_free(candidate):
            avatar.velocity = (0.0, 0.0, 0.0)
            return False
        avatar.position = candidate
        return True

    def _update_facing(self) -> None:
        opponent = self.opponent
        if opponent.speed > 0:
            opponent.facing = heading_degrees(opponent.velocity[0], opponent.velocity[1])
        learner = self.learner
        dx = opponent.position[0] - learner.position[0]
        dy = opponent.position[1] - learner.position[1]
        if dx or dy:
            learner.facing = heading_degrees(dx, dy)

    def _face_each_other(self) -> None:
        learner, opponent = self.learner, self.opponent
        dx = opponent.position[0] - learner.position[0]
        dy = opponent.position[1] - learner.position[1]
        if dx or dy:
            learner.facing = heading_degrees(dx, dy)
            opponent.facing = heading_degrees(-dx, -dy)

    def _deliver(self, t: int) -> list[WorldEvent]:
        events: list[WorldEvent] = []
        while self.pending and self.pending[0].registered_tick <= t:
            damage = self.pending.popleft()
            victim = self.avatars[damage.victim]
            if victim.generation != damage.victim_generation or not victim.alive:
                continue
            victim.health = max(0.0, victim.health - damage.damage)
            events.append(
                WorldEvent(EventKind.DMG, t, damage.victim, damage.fired_tick, damage.damage)
            )
            self._log(
                t,
                "DMG",
                f"victim={damage.victim} fired={damage.fired_tick} dmg={damage.damage:g}",
            )
            if not victim.alive:
                events.append(WorldEvent(EventKind.KILL, t, damage.victim))
                self._log(t, "KILL", f"victim={damage.victim}")
                self.pending.clear()
                self.respawn(damage.victim)
        return events

    def _return_fire(self, t: int) -> list[WorldEvent]:
        learner = self.learner
        learner.health = max(0.0, learner.health - self.config.opponent.damage_per_hit)
        self._log(t, "HURT", f"victim={LEARNER} health={learner.health:g}")
        if learner.alive:
            return []
        self._log(t, "DEATH", f"victim={LEARNER}")
        # bullets still in flight die with their shooter
        self.pending.clear()
        self.respawn(LEARNER)
        return [WorldEvent(EventKind.DEATH, t, LEARNER)]

    def _log(self, tick: int, kind: str, payload: str) -> None:
        if self.event_log is not None:
            self.event_log.record(tick, kind, payload)


def _bullet_schedule(bullets: int, substeps: int) -> list[int]:
    schedule = [0] * substeps
    for i in range(bullets):
        schedule[i * substeps // bullets] += 1
    return schedule
