"""CSV artifacts for one run directory.

Layout::

    DIR/<config>/<seed>/lives.csv      one row per life
    DIR/<config>/<seed>/actions.csv    per-life selection counts (a0..a43)
    DIR/<config>/<seed>/periods.csv    one row per shooting period
    DIR/<config>/<seed>/buckets.csv    10-life accuracy buckets
    DIR/<config>/<seed>/heatmap_<life>.csv
    DIR/<config>/<seed>/summary.csv
    DIR/<config>/summary.csv           one row per seed
    DIR/comparison.csv                 one row per config
    DIR/pas_sweep.csv                  one row per persistence interval

Everything in the summaries is recomputed from lives.csv and actions.csv, so `report` and a
fresh run produce the same bytes.
"""

from __future__ import annotations

import csv
import logging
import math
import re
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from aimpilot.harness.metrics import (
    LIFE_COLUMNS,
    LifeMetrics,
    MetricsError,
    action_heatmap,
    bucket_accuracy,
    kd_ratio,
    kd_spread,
    phase_mean,
    selection_entropy,
)
from aimpilot.learning.action_grid import (
    ACTION_COUNT,
    DEFAULT_GRID,
    HEIGHT_STEPS,
    LATERAL_STEPS,
)
from aimpilot.services.config import GridConfig

logger = logging.getLogger(__name__)

ACTION_COLUMNS = ["life_index", *(f"a{i}" for i in range(ACTION_COUNT))]
PERIOD_COLUMNS = ["life_index", "period_index", "outcomes", "terminal", "reward"]
PHASE_FRACTION = 0.2
ENTROPY_FRACTION = 0.1

_CONFIG_RE = re.compile(r"^pcwr-(on|off)_pas-([0-9]+)$")


class OutputError(RuntimeError):
    """Raised when a run directory is missing files or holds unreadable rows."""


def _fmt(value: float | None, digits: int = 6) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf"
    return f"{value:.{digits}f}"


def _write_rows(path: Path, columns: Sequence[str], rows: Iterable[dict[str, Any]]) -> Path:
    with path.open("w", newline="", encoding="ascii") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return path


def _read_rows(path: Path) -> list[dict[str, str]]:
    try:
        with path.open(newline="", encoding="ascii") as handle:
            return list(csv.DictReader(handle))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc


def config_name(pcwr: bool, pas_interval: int) -> str:
    return f"pcwr-{'on' if pcwr else 'off'}_pas-{pas_interval}"


def parse_config_name(name: str) -> tuple[bool, int] | None:
    match = _CONFIG_RE.match(name)
    if match is None:
        return None
    return match.group(1) == "on", int(match.group(2))


def technique_label(pcwr: bool, pas_interval: int) -> str:
    pas = "Yes" if pas_interval > 1 else "No"
    label = f"PCWR:{'Yes' if pcwr else 'No'} PAS:{pas}"
    if pas_interval > 1:
        label += f"({pas_interval})"
    return label


# Per-seed raw data


def write_lives(directory: Path, lives: Sequence[LifeMetrics]) -> Path:
    return _write_rows(directory / "lives.csv", LIFE_COLUMNS, (life.to_row() for life in lives))


def read_lives(directory: Path) -> list[LifeMetrics]:
    rows = _read_rows(directory / "lives.csv")
    try:
        return [LifeMetrics.from_row(row) for row in rows]
    except (KeyError, ValueError) as exc:
        raise OutputError(f"bad row in {directory / 'lives.csv'}: {exc}") from exc


def write_actions(directory: Path, life_actions: Sequence[np.ndarray]) -> Path:
    rows = (
        {"life_index": index, **{f"a{i}": int(n) for i, n in enumerate(counts)}}
        for index, counts in enumerate(life_actions, start=1)
    )
    return _write_rows(directory / "actions.csv", ACTION_COLUMNS, rows)


def read_actions(directory: Path) -> np.ndarray:
    rows = _read_rows(directory / "actions.csv")
    if not rows:
        return np.zeros((0, ACTION_COUNT), dtype=np.int64)
    return np.array(
        [[int(row[f"a{i}"]) for i in range(ACTION_COUNT)] for row in rows], dtype=np.int64
    )


def write_periods(directory: Path, periods: Sequence[Any]) -> Path:
    rows = []
    counters: dict[int, int] = {}
    for record in periods:
        counters[record.life_index] = counters.get(record.life_index, 0) + 1
        rows.append(
            {
                "life_index": record.life_index,
                "period_index": counters[record.life_index],
                "outcomes": record.outcomes,
                "terminal": int(record.terminal),
                "reward": _fmt(record.reward),
            }
        )
    return _write_rows(directory / "periods.csv", PERIOD_COLUMNS, rows)


def write_buckets(directory: Path, lives: Sequence[LifeMetrics], bucket: int = 10) -> Path:
    points = bucket_accuracy([life.accuracy for life in lives], bucket)
    rows = (
        {"bucket": i, "first_life": i * bucket + 1, "accuracy": _fmt(point)}
        for i, point in enumerate(points)
    )
    return _write_rows(directory / "buckets.csv", ["bucket", "first_life", "accuracy"], rows)


def write_heatmap(
    directory: Path, life_index: int, counts: np.ndarray, grid: GridConfig = DEFAULT_GRID
) -> Path | None:
    """Selection percentages for a window of lives, rows by height index."""
    try:
        shares = action_heatmap(counts)
    except MetricsError:
        logger.debug("No selections before life %d; heat map skipped", life_index)
        return None
    columns = ["z_index", "height", *(f"x{i}" for i in range(LATERAL_STEPS))]
    rows = (
        {
            "z_index": z,
            "height": f"z={grid.heights[z]:.0f}",
            **{f"x{x}": _fmt(float(shares[z, x])) for x in range(LATERAL_STEPS)},
        }
        for z in range(HEIGHT_STEPS)
    )
    return _write_rows(directory / f"heatmap_{life_index}.csv", columns, rows)


# Summaries


@dataclass(frozen=True)
class SeedSummary:
    config: str
    seed: int
    lives: int
    avg_hits: float
    avg_misses: float
    avg_reward: float
    accuracy: float | None
    max_kill_streak: int
    kills: int
    deaths: int
    final_kd: float
    hours_alive: float
    early_accuracy: float | None
    late_accuracy: float | None
    early_entropy: float | None
    late_entropy: float | None

    def to_row(self) -> dict[str, Any]:
        row = asdict(self)
        for key, value in row.items():
            if isinstance(value, float) or value is None:
                row[key] = _fmt(value)
        return row


SUMMARY_COLUMNS = list(SeedSummary.__dataclass_fields__)


def _window_entropy(actions: np.ndarray, fraction: float, *, last: bool) -> float | None:
    if not len(actions):
        return None
    count = max(1, round(len(actions) * fraction))
    window = actions[-count:] if last else actions[:count]
    try:
        return selection_entropy(window)
    except MetricsError:
        return None


def summarize_seed(
    config: str, seed: int, lives: Sequence[LifeMetrics], actions: np.ndarray
) -> SeedSummary:
    if not lives:
        raise OutputError(f"{config}/{seed} has no completed lives")
    n = len(lives)
    hits = sum(life.hits for life in lives)
    misses = sum(life.misses for life in lives)
    kills = sum(life.kills_during_life for life in lives)
    deaths = n
    buckets = bucket_accuracy([life.accuracy for life in lives])
    return SeedSummary(
        config=config,
        seed=seed,
        lives=n,
        avg_hits=hits / n,
        avg_misses=misses / n,
        avg_reward=sum(life.reward_sum for life in lives) / n,
        accuracy=hits / (hits + misses) if hits + misses else None,
        max_kill_streak=max(life.kills_during_life for life in lives),
        kills=kills,
        deaths=deaths,
        final_kd=kd_ratio(kills, deaths),
        hours_alive=sum(life.time_alive for life in lives) / 3600.0,
        early_accuracy=phase_mean(buckets, PHASE_FRACTION, last=False),
        late_accuracy=phase_mean(buckets, PHASE_FRACTION, last=True),
        early_entropy=_window_entropy(actions, ENTROPY_FRACTION, last=False),
        late_entropy=_window_entropy(actions, ENTROPY_FRACTION, last=True),
    )


def write_seed_summary(directory: Path, summary: SeedSummary) -> Path:
    return _write_rows(directory / "summary.csv", SUMMARY_COLUMNS, [summary.to_row()])


@dataclass(frozen=True)
class ConfigAggregate:
    config: str
    technique: str
    pcwr: bool
    pas_interval: int
    seeds: int
    avg_hits: float
    avg_misses: float
    avg_reward: float
    accuracy: float | None
    best_kill_streak: int
    hours_alive: float
    kd_mean: float | None
    kd_min: float | None
    kd_max: float | None
    early_accuracy: float | None
    late_accuracy: float | None

    def to_row(self) -> dict[str, Any]:
        return {
            "technique": self.technique,
            "config": self.config,
            "seeds": self.seeds,
            "avg_hits": _fmt(self.avg_hits),
            "avg_misses": _fmt(self.avg_misses),
            "avg_reward": _fmt(self.avg_reward),
            "accuracy": _fmt(self.accuracy),
            "best_kill_streak": self.best_kill_streak,
            "hours_alive": _fmt(self.hours_alive),
            "kd_mean": _fmt(self.kd_mean),
            "kd_min": _fmt(self.kd_min),
            "kd_max": _fmt(self.kd_max),
            "early_accuracy": _fmt(self.early_accuracy),
            "late_accuracy": _fmt(self.late_accuracy),
        }


COMPARISON_COLUMNS = [
    "technique",
    "config",
    "seeds",
    "avg_hits",
    "avg_misses",
    "avg_reward",
    "accuracy",
    "best_kill_streak",
    "hours_alive",
    "kd_mean",
    "kd_min",
    "kd_max",
    "early_accuracy",
    "late_accuracy",
]
SWEEP_COLUMNS = ["pas_interval", "accuracy", "late_accuracy", "avg_hits", "kd_mean"]


def _mean(values: Iterable[float | None]) -> float | None:
    defined = [v for v in values if v is not None]
    return sum(defined) / len(defined) if defined else None


def aggregate_config(name: str, summaries: Sequence[SeedSummary]) -> ConfigAggregate:
    parsed = parse_config_name(name)
    if parsed is None:
        raise OutputError(f"not a run configuration directory: {name}")
    if not summaries:
        raise OutputError(f"{name} has no finished seeds")
    pcwr, pas_interval = parsed
    spread = kd_spread(s.final_kd for s in summaries)
    kd_mean, kd_min, kd_max = spread if spread is not None else (None, None, None)
    return ConfigAggregate(
        config=name,
        technique=technique_label(pcwr, pas_interval),
        pcwr=pcwr,
        pas_interval=pas_interval,
        seeds=len(summaries),
        avg_hits=_mean(s.avg_hits for s in summaries) or 0.0,
        avg_misses=_mean(s.avg_misses for s in summaries) or 0.0,
        avg_reward=_mean(s.avg_reward for s in summaries) or 0.0,
        accuracy=_mean(s.accuracy for s in summaries),
        best_kill_streak=max(s.max_kill_streak for s in summaries),
        hours_alive=_mean(s.hours_alive for s in summaries) or 0.0,
        kd_mean=kd_mean,
        kd_min=kd_min,
        kd_max=kd_max,
        early_accuracy=_mean(s.early_accuracy for s in summaries),
        late_accuracy=_mean(s.late_accuracy for s in summaries),
    )


def _seed_dirs(config_dir: Path) -> list[tuple[int, Path]]:
    found = []
    for child in config_dir.iterdir():
        if child.is_dir() and child.name.isdigit() and (child / "lives.csv").exists():
            found.append((int(child.name), child))
    return sorted(found)


def summarize_directory(root: Path) -> tuple[list[SeedSummary], list[ConfigAggregate]]:
    """Rebuild every summary file under `root` from the raw per-seed CSVs."""
    if not root.is_dir():
        raise OutputError(f"{root} is not a directory")
    seed_summaries: list[SeedSummary] = []
    aggregates: list[ConfigAggregate] = []
    for config_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        if parse_config_name(config_dir.name) is None:
            continue
        partial = sorted(p.name for p in config_dir.glob("*.partial"))
        if partial:
            logger.warning("Skipping unfinished seeds in %s: %s", config_dir, ", ".join(partial))
        summaries = []
        for seed, seed_dir in _seed_dirs(config_dir):
            summary = summarize_seed(
                config_dir.name, seed, read_lives(seed_dir), read_actions(seed_dir)
            )
            write_seed_summary(seed_dir, summary)
            summaries.append(summary)
        if not summaries:
            continue
        _write_rows(config_dir / "summary.csv", SUMMARY_COLUMNS, (s.to_row() for s in summaries))
        seed_summaries.extend(summaries)
        aggregates.append(aggregate_config(config_dir.name, summaries))

    if not aggregates:
        raise OutputError(f"no finished runs under {root}")
    _write_rows(root / "comparison.csv", COMPARISON_COLUMNS, (a.to_row() for a in aggregates))
    if len({a.pas_interval for a in aggregates}) > 2:
        write_pas_sweep(root, aggregates)
    return seed_summaries, aggregates


def write_pas_sweep(root: Path, aggregates: Sequence[ConfigAggregate]) -> Path:
    by_interval: dict[int, list[ConfigAggregate]] = {}
    for aggregate in aggregates:
        by_interval.setdefault(aggregate.pas_interval, []).append(aggregate)
    rows = []
    for interval in sorted(by_interval):
        group = by_interval[interval]
        rows.append(
            {
                "pas_interval": interval,
                "accuracy": _fmt(_mean(a.accuracy for a in group)),
                "late_accuracy": _fmt(_mean(a.late_accuracy for a in group)),
                "avg_hits": _fmt(_mean(a.avg_hits for a in group)),
                "kd_mean": _fmt(_mean(a.kd_mean for a in group)),
            }
        )
    return _write_rows(root / "pas_sweep.csv", SWEEP_COLUMNS, rows)
