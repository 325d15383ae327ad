from .prepare_output_node import prepare_output_node
from .present_summary_node import present_summary_node
from .run_seeds_node import run_seeds_node
from .summarize_node import summarize_node

__all__ = [
    "prepare_output_node",
    "run_seeds_node",
    "summarize_node",
    "present_summary_node",
]
