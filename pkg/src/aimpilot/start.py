from langgraph.graph import END, StateGraph

from aimpilot.start_nodes import (
    prepare_output_node,
    present_summary_node,
    run_seeds_node,
    summarize_node,
)
from aimpilot.state import ExperimentState


def create_experiment_pipeline():
    workflow = StateGraph(ExperimentState)
    workflow.add_node("prepare_output", prepare_output_node)
    workflow.add_node("run_seeds", run_seeds_node)
    workflow.add_node("summarize", summarize_node)
    workflow.add_node("present_summary", present_summary_node)

    workflow.set_entry_point("prepare_output")
    workflow.add_edge("prepare_output", "run_seeds")
    workflow.add_edge("run_seeds", "summarize")
    workflow.add_edge("summarize", "present_summary")
    workflow.add_edge("present_summary", END)

    return workflow.compile()


def create_report_pipeline():
    """Regenerate summaries from raw CSVs already on disk."""
    workflow = StateGraph(ExperimentState)
    workflow.add_node("summarize", summarize_node)
    workflow.add_node("present_summary", present_summary_node)

    workflow.set_entry_point("summarize")
    workflow.add_edge("summarize", "present_summary")
    workflow.add_edge("present_summary", END)

    return workflow.compile()
