from pathlib import Path
from typing import TypedDict

from aimpilot.harness.outputs import ConfigAggregate, SeedSummary
from aimpilot.harness.runner import JobResult, RunConfig


class ExperimentState(TypedDict, total=False):
    # Inputs
    output_dir: Path
    runs: list[RunConfig]
    workers: int | None
    log_level: str

    # Processed data
    results: list[JobResult]
    failures: list[str]
    summaries: list[SeedSummary]
    aggregates: list[ConfigAggregate]
