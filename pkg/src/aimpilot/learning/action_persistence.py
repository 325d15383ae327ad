from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from aimpilot.learning.action_grid import AimAction
from aimpilot.learning.rl_core import select_action


@dataclass
class PasState:
    """Holds one selected action for `interval` logic ticks.

    The state is still observed every tick; only the selection is persisted.
    """

    interval: int
    current_action: AimAction | None = None
    ticks_remaining: int = 0
    fresh_selections: int = 0

    def __post_init__(self) -> None:
        if self.interval < 1:
            raise ValueError("interval must be at least one tick")

    def next_action(self, q_row: np.ndarray, epsilon: float, rng: np.random.Generator) -> AimAction:
        if self.ticks_remaining > 0 and self.current_action is not None:
            self.ticks_remaining -= 1
            return self.current_action
        self.current_action = select_action(q_row, epsilon, rng)
        self.ticks_remaining = self.interval - 1
        self.fresh_selections += 1
        return self.current_action

    def reset(self) -> None:
        self.current_action = None
        self.ticks_remaining = 0
