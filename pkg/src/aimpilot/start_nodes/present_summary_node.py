import math

from rich.console import Console
from rich.table import Table

from aimpilot.state import ExperimentState

console = Console()


def present_summary_node(state: ExperimentState) -> ExperimentState:
    """Print the comparison table the way the summary CSV lays it out."""
    table = Table(title=f"Results in {state['output_dir']}", show_header=True)
    table.add_column("Technique", style="cyan")
    table.add_column("Seeds", justify="right")
    table.add_column("Hits/life", justify="right")
    table.add_column("Misses/life", justify="right")
    table.add_column("Reward/life", justify="right")
    table.add_column("Accuracy", justify="right")
    table.add_column("Early -> late", justify="right")
    table.add_column("Best streak", justify="right")
    table.add_column("Hours alive", justify="right")
    table.add_column("K:D avg (min-max)", justify="right")

    for agg in state["aggregates"]:
        table.add_row(
            agg.technique,
            str(agg.seeds),
            f"{agg.avg_hits:.2f}",
            f"{agg.avg_misses:.2f}",
            f"{agg.avg_reward:.1f}",
            _percent(agg.accuracy),
            f"{_percent(agg.early_accuracy)} -> {_percent(agg.late_accuracy)}",
            str(agg.best_kill_streak),
            f"{agg.hours_alive:.2f}",
            _kd(agg.kd_mean, agg.kd_min, agg.kd_max),
        )

    console.print(table)
    failures = state.get("failures") or []
    if failures:
        console.print(f"[yellow]{len(failures)} job(s) failed; partial directories kept.[/yellow]")
    return state


def _percent(value: float | None) -> str:
    return "-" if value is None else f"{value * 100:.2f}%"


def _kd(mean: float | None, low: float | None, high: float | None) -> str:
    if mean is None or low is None or high is None or not math.isfinite(mean):
        return "-"
    return f"{mean:.2f} ({low:.2f}-{high:.2f})"
