"""Tabular SARSA(lambda) with replacing traces and end-of-period batch updates."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from aimpilot.learning.action_grid import ACTION_COUNT, AimAction
from aimpilot.learning.reward_shaping import PeriodStep
from aimpilot.learning.state_codec import STATE_COUNT, StateKey
from aimpilot.services.config import AgentConfig

logger = logging.getLogger(__name__)

DEFAULT_AGENT = AgentConfig()


class PeriodLengthError(ValueError):
    """Raised when a reward vector does not line up with its period."""


class QValueBoundError(RuntimeError):
    """Raised when action values leave the range implied by the reward bounds."""


@dataclass
class QTable:
    values: np.ndarray = field(
        default_factory=lambda: np.zeros((STATE_COUNT, ACTION_COUNT), dtype=np.float64)
    )

    def __post_init__(self) -> None:
        if self.values.shape != (STATE_COUNT, ACTION_COUNT):
            raise ValueError(f"Q-table must be {STATE_COUNT}x{ACTION_COUNT}")
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)

    def row(self, state: StateKey | int) -> np.ndarray:
        index = state.index if isinstance(state, StateKey) else state
        return self.values[index]

    def bounds(self) -> tuple[float, float]:
        return float(self.values.min()), float(self.values.max())

    def assert_bounded(self, low: float, high: float) -> None:
        if not np.isfinite(self.values).all():
            raise QValueBoundError("Q-table holds non-finite values")
        q_min, q_max = self.bounds()
        if q_min < low or q_max > high:
            raise QValueBoundError(
                f"Q-values span [{q_min:.3f}, {q_max:.3f}] outside [{low}, {high}]"
            )


@dataclass
class TraceTable:
    traces: np.ndarray = field(
        default_factory=lambda: np.zeros((STATE_COUNT, ACTION_COUNT), dtype=np.float64)
    )

    def reset(self) -> None:
        self.traces.fill(0.0)


@dataclass(frozen=True)
class Bootstrap:
    """State-action the policy picked at the start of the following period."""

    state: StateKey
    action: AimAction


def epsilon_for_deaths(death_count: int, cfg: AgentConfig = DEFAULT_AGENT) -> float:
    steps = death_count // cfg.deaths_per_step
    # round away float noise such as 0.2 - 0.03 * 5 = 0.04999...
    return max(cfg.epsilon_floor, round(cfg.epsilon_initial - cfg.epsilon_step * steps, 12))


def select_action(q_row: np.ndarray, epsilon: float, rng: np.random.Generator) -> AimAction:
    if rng.random() < epsilon:
        return AimAction.from_id(int(rng.integers(ACTION_COUNT)))
    best = np.flatnonzero(q_row == q_row.max())
    if best.size == 1:
        return AimAction.from_id(int(best[0]))
    return AimAction.from_id(int(best[rng.integers(best.size)]))


def sarsa_step_update(
    q: QTable,
    e: TraceTable,
    s: StateKey,
    a: AimAction,
    r: float,
    s_next: StateKey | None,
    a_next: AimAction | None,
    terminal: bool,
    cfg: AgentConfig,
) -> None:
    values = q.values
    if terminal or s_next is None or a_next is None:
        target = r
    else:
        target = r + cfg.gamma * values[s_next.index, a_next.id]
    delta = target - values[s.index, a.id]

    e.traces[s.index, a.id] = 1.0
    values += cfg.alpha * delta * e.traces
    e.traces *= cfg.gamma * cfg.lambda_


def apply_period_updates(
    q: QTable,
    e: TraceTable,
    period: Sequence[PeriodStep],
    rewards: Sequence[float],
    cfg: AgentConfig,
    *,
    terminal: bool,
    bootstrap: Bootstrap | None = None,
) -> None:
    """Replay a finished shooting period through SARSA(lambda) in tick order.

    The final step is terminal when the period ended in a death; otherwise it bootstraps
    on the first state-action of the following period.
    """
    if len(rewards) != len(period):
        raise PeriodLengthError(f"{len(rewards)} rewards for a period of {len(period)} steps")
    e.reset()
    if not period:
        return

    last = len(period) - 1
    for i, (step, reward) in enumerate(zip(period, rewards)):
        if i < last:
            nxt = period[i + 1]
            sarsa_step_update(
                q, e, step.state, step.action, reward, nxt.state, nxt.action, False, cfg
            )
        elif terminal or bootstrap is None:
            sarsa_step_update(q, e, step.state, step.action, reward, None, None, True, cfg)
        else:
            sarsa_step_update(
                q, e, step.state, step.action, reward, bootstrap.state, bootstrap.action, False, cfg
            )


def value_bounds(cfg: AgentConfig) -> tuple[float, float]:
    """Geometric-series range for returns with rewards in [miss_penalty, 2 * hit_reward]."""
    if cfg.gamma >= 1.0:
        return -math.inf, math.inf
    scale = 1.0 / (1.0 - cfg.gamma)
    return cfg.miss_penalty * scale, 2 * cfg.hit_reward * scale


def check_bounds(q: QTable, cfg: AgentConfig) -> bool:
    low, high = value_bounds(cfg)
    try:
        q.assert_bounded(low, high)
    except QValueBoundError as exc:
        if cfg.strict_bounds:
            raise
        logger.warning("%s", exc)
        return False
    return True
