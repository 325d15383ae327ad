from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from aimpilot.learning.action_grid import ACTION_COUNT, HEIGHT_STEPS, LATERAL_STEPS


class MetricsError(ValueError):
    """Raised when a metric is requested over an empty window."""


@dataclass(frozen=True)
class LifeMetrics:
    life_index: int
    hits: int
    misses: int
    reward_sum: float
    time_alive: float
    kills_during_life: int
    epsilon_in_effect: float

    @property
    def accuracy(self) -> float | None:
        shots = self.hits + self.misses
        return self.hits / shots if shots else None

    def to_row(self) -> dict[str, Any]:
        accuracy = self.accuracy
        return {
            "life_index": self.life_index,
            "hits": self.hits,
            "misses": self.misses,
            "reward_sum": f"{self.reward_sum:.6f}",
            "accuracy": "" if accuracy is None else f"{accuracy:.6f}",
            "time_alive": f"{self.time_alive:.2f}",
            "kills_during_life": self.kills_during_life,
            "epsilon_in_effect": f"{self.epsilon_in_effect:.4f}",
        }

    @staticmethod
    def from_row(row: dict[str, str]) -> "LifeMetrics":
        return LifeMetrics(
            life_index=int(row["life_index"]),
            hits=int(row["hits"]),
            misses=int(row["misses"]),
            reward_sum=float(row["reward_sum"]),
            time_alive=float(row["time_alive"]),
            kills_during_life=int(row["kills_during_life"]),
            epsilon_in_effect=float(row["epsilon_in_effect"]),
        )


LIFE_COLUMNS = list(LifeMetrics(0, 0, 0, 0.0, 0.0, 0, 0.0).to_row())


def bucket_accuracy(
    per_life_accuracy: Sequence[float | None], bucket: int = 10
) -> list[float | None]:
    """Mean accuracy of each consecutive `bucket`-life window.

    Lives without shots are skipped; a window with no shots at all yields None. The final
    partial window is averaged over the lives it holds.
    """
    if not per_life_accuracy:
        raise MetricsError("cannot bucket an empty accuracy series")
    if bucket < 1:
        raise MetricsError("bucket size must be positive")
    points: list[float | None] = []
    for start in range(0, len(per_life_accuracy), bucket):
        window = [a for a in per_life_accuracy[start : start + bucket] if a is not None]
        points.append(sum(window) / len(window) if window else None)
    return points


def phase_mean(series: Sequence[float | None], fraction: float, *, last: bool) -> float | None:
    """Mean of the defined values in the first (or last) `fraction` of a series."""
    if not series:
        raise MetricsError("empty series")
    count = max(1, round(len(series) * fraction))
    window = series[-count:] if last else series[:count]
    values = [v for v in window if v is not None]
    return sum(values) / len(values) if values else None


def action_heatmap(counts: np.ndarray | Iterable[int]) -> np.ndarray:
    """Selection percentages as a heights x lateral grid (row = z index, column = x index)."""
    totals = np.asarray(counts, dtype=np.float64)
    if totals.ndim == 2:
        totals = totals.sum(axis=0)
    if totals.shape != (ACTION_COUNT,):
        raise MetricsError(f"expected {ACTION_COUNT} action counts, got shape {totals.shape}")
    total = totals.sum()
    if total <= 0:
        raise MetricsError("no actions selected in window")
    return (totals / total * 100.0).reshape(HEIGHT_STEPS, LATERAL_STEPS)


def selection_entropy(counts: np.ndarray | Iterable[int]) -> float:
    """Shannon entropy in bits of an action-selection histogram."""
    totals = np.asarray(counts, dtype=np.float64)
    if totals.ndim == 2:
        totals = totals.sum(axis=0)
    total = totals.sum()
    if total <= 0:
        raise MetricsError("no actions selected in window")
    p = totals[totals > 0] / total
    return float(-(p * np.log2(p)).sum())


def kd_ratio(kills: int, deaths: int) -> float:
    """Kills per death; `math.inf` when the bot never died."""
    if deaths < 0 or kills < 0:
        raise MetricsError("kills and deaths must be non-negative")
    if deaths == 0:
        return math.inf
    return kills / deaths


def kd_spread(ratios: Iterable[float]) -> tuple[float, float, float] | None:
    """(mean, min, max) of final ratios, leaving out runs without deaths."""
    finite = [r for r in ratios if math.isfinite(r)]
    if not finite:
        return None
    return sum(finite) / len(finite), min(finite), max(finite)


def pcwr_identity(outcomes: str, hit_reward: float = 250.0, miss_penalty: float = -1.0) -> float:
    """Closed-form cluster-weighted total for an outcome string of H/M characters."""
    endpoints = interior = isolated = 0
    for run in outcomes.split("M"):
        if len(run) == 1:
            isolated += 1
        elif len(run) >= 2:
            endpoints += 2
            interior += len(run) - 2
    misses = outcomes.count("M")
    return (
        hit_reward * endpoints
        + 2 * hit_reward * interior
        + hit_reward / 2 * isolated
        + miss_penalty * misses
    )
