from aimpilot.learning.action_grid import ACTION_COUNT, AimAction, AimOffset
from aimpilot.learning.action_persistence import PasState
from aimpilot.learning.reward_shaping import Outcome, PeriodStep, ShootingPeriodLog, shape
from aimpilot.learning.rl_core import QTable, TraceTable
from aimpilot.learning.state_codec import STATE_COUNT, RelativeObservation, StateKey

__all__ = [
    "ACTION_COUNT",
    "STATE_COUNT",
    "AimAction",
    "AimOffset",
    "Outcome",
    "PasState",
    "PeriodStep",
    "QTable",
    "RelativeObservation",
    "ShootingPeriodLog",
    "StateKey",
    "TraceTable",
    "shape",
]
