from aimpilot.harness.outputs import summarize_directory
from aimpilot.state import ExperimentState


def summarize_node(state: ExperimentState) -> ExperimentState:
    summaries, aggregates = summarize_directory(state["output_dir"])
    state["summaries"] = summaries
    state["aggregates"] = aggregates
    return state
