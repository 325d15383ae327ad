"""Per-step rewards for a finished shooting period, plain or cluster-weighted."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from itertools import groupby
from typing import TYPE_CHECKING, Iterable, Sequence

from aimpilot.services.config import AgentConfig

if TYPE_CHECKING:
    from aimpilot.learning.action_grid import AimAction
    from aimpilot.learning.state_codec import StateKey


class RewardShapingError(ValueError):
    """Raised when a period cannot be shaped."""


class Outcome(StrEnum):
    HIT = "H"
    MISS = "M"


@dataclass(frozen=True)
class PeriodStep:
    state: StateKey
    action: AimAction
    outcome: Outcome
    tick: int

    @property
    def hit(self) -> bool:
        return self.outcome is Outcome.HIT


@dataclass
class ShootingPeriodLog:
    """Firing ticks from trigger press to release, in tick order."""

    steps: list[PeriodStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, index: int) -> PeriodStep:
        return self.steps[index]

    def append(self, step: PeriodStep) -> None:
        if self.steps and step.tick <= self.steps[-1].tick:
            raise RewardShapingError(
                f"tick {step.tick} does not follow tick {self.steps[-1].tick}"
            )
        self.steps.append(step)

    def mark_hit(self, index: int) -> None:
        step = self.steps[index]
        if not step.hit:
            self.steps[index] = PeriodStep(step.state, step.action, Outcome.HIT, step.tick)

    def outcomes(self) -> list[Outcome]:
        return [step.outcome for step in self.steps]


def _outcomes(period: ShootingPeriodLog | Sequence[Outcome]) -> list[Outcome]:
    if isinstance(period, ShootingPeriodLog):
        outcomes = period.outcomes()
    else:
        outcomes = [Outcome(value) for value in period]
    if not outcomes:
        raise RewardShapingError("cannot shape an empty period")
    return outcomes


def plain_rewards(
    period: ShootingPeriodLog | Sequence[Outcome], cfg: AgentConfig
) -> list[float]:
    return [
        cfg.hit_reward if outcome is Outcome.HIT else cfg.miss_penalty
        for outcome in _outcomes(period)
    ]


def _run_rewards(length: int, full: float) -> Iterable[float]:
    if length == 1:
        return [full / 2]
    return [full] + [full * 2] * (length - 2) + [full]


def pcwr_rewards(
    period: ShootingPeriodLog | Sequence[Outcome], cfg: AgentConfig
) -> list[float]:
    """Cluster-weighted rewards.

    Maximal runs of hits are delimited by misses and by the period edges. A lone hit earns
    half the hit reward, the two ends of a longer run earn the full reward and every hit
    inside a run earns double.
    """
    rewards: list[float] = []
    for outcome, run in groupby(_outcomes(period)):
        length = sum(1 for _ in run)
        if outcome is Outcome.HIT:
            rewards.extend(_run_rewards(length, cfg.hit_reward))
        else:
            rewards.extend([cfg.miss_penalty] * length)
    return rewards


def shape(period: ShootingPeriodLog | Sequence[Outcome], cfg: AgentConfig) -> list[float]:
    if cfg.pcwr_enabled:
        return pcwr_rewards(period, cfg)
    return plain_rewards(period, cfg)
