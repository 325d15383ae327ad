from aimpilot.harness.learner import ShootingBot
from aimpilot.harness.metrics import (
    LifeMetrics,
    action_heatmap,
    bucket_accuracy,
    kd_ratio,
    selection_entropy,
)
from aimpilot.harness.outputs import ConfigAggregate, SeedSummary, summarize_directory
from aimpilot.harness.runner import HarnessError, JobResult, RunConfig, run_jobs, run_seed

__all__ = [
    "ConfigAggregate",
    "HarnessError",
    "JobResult",
    "LifeMetrics",
    "RunConfig",
    "SeedSummary",
    "ShootingBot",
    "action_heatmap",
    "bucket_accuracy",
    "kd_ratio",
    "run_jobs",
    "run_seed",
    "selection_entropy",
    "summarize_directory",
]
