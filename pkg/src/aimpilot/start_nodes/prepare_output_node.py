import os

from aimpilot.harness.runner import HarnessError
from aimpilot.learning.snapshot import load_snapshot
from aimpilot.state import ExperimentState


def prepare_output_node(state: ExperimentState) -> ExperimentState:
    """Create the output root and fail fast on anything a worker would trip over later."""
    output_dir = state["output_dir"]
    if not state.get("runs"):
        raise HarnessError("no run configurations given")
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise HarnessError(f"cannot create output directory {output_dir}: {exc}") from exc
    if not os.access(output_dir, os.W_OK):
        raise HarnessError(f"output directory {output_dir} is not writable")

    for resume_from in {run.resume_from for run in state["runs"] if run.resume_from}:
        load_snapshot(resume_from)

    state["results"] = []
    state["failures"] = []
    return state
