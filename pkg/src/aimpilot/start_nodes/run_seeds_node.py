from rich.console import Console

from aimpilot.harness.runner import run_jobs
from aimpilot.state import ExperimentState

console = Console()


def run_seeds_node(state: ExperimentState) -> ExperimentState:
    runs = state["runs"]
    jobs = sum(len(run.seeds) for run in runs)
    with console.status(f"Running {jobs} job(s) across {len(runs)} configuration(s)..."):
        results = run_jobs(
            runs, workers=state.get("workers"), log_level=state.get("log_level", "INFO")
        )

    failures = [f"{r.config}/{r.seed}: {r.error}" for r in results if not r.ok]
    for failure in failures:
        console.print(f"[red]Job failed {failure}[/red]")
    state["results"] = results
    state["failures"] = failures
    return state
