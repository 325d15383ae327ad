from aimpilot.sim.combat import (
    Arena,
    Avatar,
    Command,
    DamageEvent,
    EventKind,
    Observation,
    SimulationError,
    World,
    WorldEvent,
    hit_test,
)
from aimpilot.sim.event_log import EventLog

__all__ = [
    "Arena",
    "Avatar",
    "Command",
    "DamageEvent",
    "EventKind",
    "EventLog",
    "Observation",
    "SimulationError",
    "World",
    "WorldEvent",
    "hit_test",
]
