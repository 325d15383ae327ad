from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from aimpilot.botlink.protocol import MessageKind, ProtocolMessage, make_message
from aimpilot.harness.metrics import LifeMetrics
from aimpilot.learning.action_grid import ACTION_COUNT
from aimpilot.learning.action_persistence import PasState
from aimpilot.learning.reward_shaping import Outcome, PeriodStep, ShootingPeriodLog, shape
from aimpilot.learning.rl_core import (
    Bootstrap,
    QTable,
    TraceTable,
    apply_period_updates,
    check_bounds,
    epsilon_for_deaths,
)
from aimpilot.learning.state_codec import RelativeObservation, encode, normalize_angle
from aimpilot.services.config import SimulationConfig

logger = logging.getLogger(__name__)

TICK_SECONDS = 0.25
LEARNER_ID = 0
OPPONENT_ID = 1

ScoreHook = Callable[[str, int], None]


@dataclass(frozen=True)
class PeriodRecord:
    life_index: int
    outcomes: str
    terminal: bool
    reward: float


@dataclass
class _Life:
    index: int
    start_tick: int
    epsilon: float
    hits: int = 0
    misses: int = 0
    reward_sum: float = 0.0
    kills: int = 0
    action_counts: np.ndarray = field(default_factory=lambda: np.zeros(ACTION_COUNT, np.int64))


class ShootingBot:
    """Learner side of the duel.

    Fires whenever the opponent is visible, logs one step per firing tick and replays each
    finished shooting period through SARSA(lambda). Damage reports are credited to the most
    recent firing tick unless ground-truth attribution is switched on.
    """

    def __init__(
        self,
        config: SimulationConfig,
        rng: np.random.Generator,
        q: QTable | None = None,
        on_score: ScoreHook | None = None,
    ) -> None:
        self.config = config
        self.agent = config.agent
        self.rng = rng
        self.q = q if q is not None else QTable()
        self.e = TraceTable()
        self.pas = PasState(self.agent.pas_interval)
        self.on_score = on_score
        self.registration_delay = config.weapon.registration_delay

        self.kills = 0
        self.deaths = 0
        self.lives: list[LifeMetrics] = []
        self.life_actions: list[np.ndarray] = []
        self.periods: list[PeriodRecord] = []
        self.bound_violations = 0

        self._period: ShootingPeriodLog | None = None
        self._release_tick: int | None = None
        self._pending: ShootingPeriodLog | None = None
        self._pending_bootstrap: Bootstrap | None = None
        self._pending_due = 0
        self._life = self._new_life(start_tick=0)

    @property
    def epsilon(self) -> float:
        return epsilon_for_deaths(self.deaths, self.agent)

    @property
    def life_index(self) -> int:
        return self._life.index

    def configure(self, cfg: ProtocolMessage) -> None:
        if cfg.kind is MessageKind.CFG:
            self.registration_delay = int(cfg["delay"])

    def decide(self, obs: ProtocolMessage) -> ProtocolMessage:
        t = obs.tick
        self._settle_pending(t)
        if not obs["vis"]:
            self._release(t)
            return make_message(MessageKind.ACT, t, shoot=0, aid=0)

        if self._period is not None and self._release_tick is not None:
            self._close_period(terminal=False)
        opening = self._period is None
        if opening:
            self._period = ShootingPeriodLog()
            self.pas.reset()

        relative = RelativeObservation(
            vel_forward=float(obs["vf"]),
            vel_lateral=float(obs["vl"]),
            facing_angle=normalize_angle(float(obs["rot"])),
            distance=float(obs["dist"]),
        )
        state = encode(relative, self.config.codec)
        action = self.pas.next_action(self.q.row(state), self._life.epsilon, self.rng)
        if opening and self._pending is not None:
            self._pending_bootstrap = Bootstrap(state, action)
            self._settle_pending(t)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("Tick %d: %s, aim %s", t, state, action.label(self.config.grid))

        self._period.append(PeriodStep(state, action, Outcome.MISS, t))
        self._life.action_counts[action.id] += 1
        return make_message(MessageKind.ACT, t, shoot=1, aid=action.id)

    def on_event(self, evt: ProtocolMessage) -> None:
        kind = evt["kind"]
        victim = int(evt["victim"])
        if kind == "DMG" and victim == OPPONENT_ID:
            self._credit_hit(evt)
        elif kind == "KILL" and victim == OPPONENT_ID:
            self.kills += 1
            self._life.kills += 1
            self._close_period(terminal=True)
            self._score("kill", self._life.index)
        elif kind == "DEATH" and victim == LEARNER_ID:
            self._close_period(terminal=True)
            self.deaths += 1
            ended = self._life.index
            self._end_life(evt.tick)
            self._score("death", ended)

    def finish(self) -> None:
        """Apply anything still queued at the end of a run as terminal."""
        self._close_period(terminal=True)

    def _credit_hit(self, evt: ProtocolMessage) -> None:
        if self.agent.ground_truth_attribution and evt.get("fired") is not None:
            fired = int(evt["fired"])
            # a closed period stays searchable until its own reports are due
            for period in (self._period, self._pending):
                if period is None:
                    continue
                for index in range(len(period) - 1, -1, -1):
                    if period[index].tick == fired:
                        period.mark_hit(index)
                        return
            logger.warning(
                "Damage report at tick %d matches no shot fired at tick %d", evt.tick, fired
            )
            return
        period = self._period
        if period is None or not len(period):
            logger.debug("Damage report at tick %d with no open period", evt.tick)
            return
        period.mark_hit(len(period) - 1)

    def _release(self, t: int) -> None:
        if self._period is None:
            return
        if self._release_tick is None:
            self._release_tick = t
        if t >= self._release_tick + self.registration_delay:
            self._close_period(terminal=False)

    def _close_period(self, *, terminal: bool) -> None:
        period = self._period
        self._period = None
        self._release_tick = None
        # an older period is always applied before a newer one
        self._flush_pending()
        if period is None or not len(period):
            return
        if terminal:
            self._apply(period, bootstrap=None)
        else:
            self._pending = period
            self._pending_due = period[-1].tick + self.registration_delay + 1

    def _settle_pending(self, t: int) -> None:
        """Apply the held period once its successor is known and its reports are in."""
        if self._pending_bootstrap is not None and t >= self._pending_due:
            self._flush_pending()

    def _flush_pending(self) -> None:
        if self._pending is None:
            return
        period, bootstrap = self._pending, self._pending_bootstrap
        self._pending = None
        self._pending_bootstrap = None
        self._apply(period, bootstrap=bootstrap)

    def _apply(self, period: ShootingPeriodLog, *, bootstrap: Bootstrap | None) -> None:
        rewards = shape(period, self.agent)
        outcomes = period.outcomes()
        hits = sum(1 for o in outcomes if o is Outcome.HIT)
        self._life.hits += hits
        self._life.misses += len(outcomes) - hits
        self._life.reward_sum += sum(rewards)
        terminal = bootstrap is None
        self.periods.append(
            PeriodRecord(self._life.index, "".join(outcomes), terminal, sum(rewards))
        )
        apply_period_updates(
            self.q,
            self.e,
            period.steps,
            rewards,
            self.agent,
            terminal=terminal,
            bootstrap=bootstrap,
        )
        if not check_bounds(self.q, self.agent):
            self.bound_violations += 1

    def _end_life(self, death_tick: int) -> None:
        life = self._life
        self.lives.append(
            LifeMetrics(
                life_index=life.index,
                hits=life.hits,
                misses=life.misses,
                reward_sum=life.reward_sum,
                time_alive=(death_tick + 1 - life.start_tick) * TICK_SECONDS,
                kills_during_life=life.kills,
                epsilon_in_effect=life.epsilon,
            )
        )
        self.life_actions.append(life.action_counts)
        self._life = self._new_life(start_tick=death_tick + 1)

    def _new_life(self, start_tick: int) -> _Life:
        index = len(self.lives) + 1
        return _Life(index=index, start_tick=start_tick, epsilon=self.epsilon)

    def _score(self, kind: str, life_index: int) -> None:
        if self.on_score is not None:
            self.on_score(kind, life_index)
