"""The 44 assault-rifle aim offsets: 11 lateral skews at 4 heights."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from aimpilot.services.config import GridConfig

LATERAL_STEPS = 11
HEIGHT_STEPS = 4
ACTION_COUNT = LATERAL_STEPS * HEIGHT_STEPS
DEAD_CENTER = 5

DEFAULT_GRID = GridConfig()


class ActionGridError(ValueError):
    """Raised for invalid action ids or degenerate aiming geometry."""


@dataclass(frozen=True)
class AimAction:
    x_index: int
    z_index: int

    def __post_init__(self) -> None:
        if not 0 <= self.x_index < LATERAL_STEPS:
            raise ActionGridError(f"x_index {self.x_index} out of range")
        if not 0 <= self.z_index < HEIGHT_STEPS:
            raise ActionGridError(f"z_index {self.z_index} out of range")

    @property
    def id(self) -> int:
        return self.z_index * LATERAL_STEPS + self.x_index

    @classmethod
    def from_id(cls, action_id: int) -> "AimAction":
        if not 0 <= action_id < ACTION_COUNT:
            raise ActionGridError(f"action id {action_id} out of range")
        z_index, x_index = divmod(action_id, LATERAL_STEPS)
        return cls(x_index, z_index)

    def label(self, grid: GridConfig = DEFAULT_GRID) -> str:
        offset = action_offset(self, grid)
        return f"x={offset.dx:+.0f} z={offset.dz:.0f}"


@dataclass(frozen=True)
class AimOffset:
    dx: float
    dz: float


@lru_cache(maxsize=8)
def lateral_values(grid: GridConfig = DEFAULT_GRID) -> tuple[float, ...]:
    step = 2 * grid.lateral_span / (LATERAL_STEPS - 1)
    return tuple(-grid.lateral_span + step * i for i in range(LATERAL_STEPS))


def action_offset(action: AimAction | int, grid: GridConfig = DEFAULT_GRID) -> AimOffset:
    if isinstance(action, int):
        action = AimAction.from_id(action)
    return AimOffset(lateral_values(grid)[action.x_index], grid.heights[action.z_index])


def aim_point(
    opponent_center: np.ndarray,
    bot_position: np.ndarray,
    action: AimAction | int,
    grid: GridConfig = DEFAULT_GRID,
) -> np.ndarray:
    """Offset the opponent's center in the bot's view.

    Lateral skew runs along the horizontal axis perpendicular to the bot->opponent line,
    positive to the right as seen by the bot. Vertical skew is measured up from the center.
    """
    offset = action_offset(action, grid)
    dx = float(opponent_center[0] - bot_position[0])
    dy = float(opponent_center[1] - bot_position[1])
    horizontal = math.hypot(dx, dy)
    if horizontal == 0.0:
        raise ActionGridError("bot and opponent positions coincide horizontally")

    right = np.array([dy / horizontal, -dx / horizontal, 0.0])
    return np.asarray(opponent_center, dtype=float) + right * offset.dx + np.array(
        [0.0, 0.0, offset.dz]
    )
