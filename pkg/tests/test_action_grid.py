"""Tests for the 44-action aim grid."""

import math

import numpy as np
import pytest

from aimpilot.learning.action_grid import (
    ACTION_COUNT,
    DEAD_CENTER,
    ActionGridError,
    AimAction,
    action_offset,
    aim_point,
)


class TestAimAction:
    def test_id_layout(self):
        assert AimAction(0, 0).id == 0
        assert AimAction(10, 0).id == 10
        assert AimAction(0, 1).id == 11
        assert AimAction(10, 3).id == 43

    def test_id_round_trip(self):
        assert [AimAction.from_id(i).id for i in range(ACTION_COUNT)] == list(range(ACTION_COUNT))

    @pytest.mark.parametrize("action_id", [-1, 44, 100])
    def test_invalid_id_rejected(self, action_id):
        with pytest.raises(ActionGridError):
            AimAction.from_id(action_id)

    def test_invalid_components_rejected(self):
        with pytest.raises(ActionGridError):
            AimAction(11, 0)
        with pytest.raises(ActionGridError):
            AimAction(0, 4)

    def test_label(self):
        assert AimAction(6, 1).label() == "x=+40 z=20"
        assert AimAction(0, 0).label() == "x=-200 z=0"


class TestActionOffset:
    def test_far_left_bottom(self):
        offset = action_offset(AimAction(0, 0))
        assert (offset.dx, offset.dz) == (-200.0, 0.0)

    def test_dead_center(self):
        offset = action_offset(AimAction(DEAD_CENTER, 0))
        assert (offset.dx, offset.dz) == (0.0, 0.0)

    def test_far_right_top(self):
        offset = action_offset(AimAction(10, 3))
        assert (offset.dx, offset.dz) == (200.0, 55.0)

    def test_accepts_raw_id(self):
        assert action_offset(43) == action_offset(AimAction(10, 3))

    def test_offsets_distinct_and_symmetric(self):
        offsets = [action_offset(a) for a in map(AimAction.from_id, range(ACTION_COUNT))]
        assert len({(o.dx, o.dz) for o in offsets}) == ACTION_COUNT
        lateral = sorted({o.dx for o in offsets})
        assert lateral == pytest.approx([-200 + 40 * i for i in range(11)])
        assert sorted(-x for x in lateral) == pytest.approx(lateral)


class TestAimPoint:
    def test_dead_center_is_opponent_center(self):
        center = np.array([500.0, 800.0, 50.0])
        point = aim_point(center, np.array([100.0, 100.0, 50.0]), AimAction(DEAD_CENTER, 0))
        assert point == pytest.approx(center)

    def test_opponent_north_skews_east(self):
        """Looking north, the bot's right is east."""
        point = aim_point(np.array([0.0, 500.0, 50.0]), np.zeros(3), AimAction(6, 0))
        assert point == pytest.approx([40.0, 500.0, 50.0])

    def test_opponent_east_skews_south(self):
        point = aim_point(np.array([500.0, 0.0, 50.0]), np.zeros(3), AimAction(6, 0))
        assert point == pytest.approx([500.0, -40.0, 50.0])

    def test_offset_magnitude_holds_for_all_actions(self):
        rng = np.random.default_rng(7)
        for action in map(AimAction.from_id, range(ACTION_COUNT)):
            bot = rng.uniform(0, 2000, size=3)
            center = rng.uniform(0, 2000, size=3)
            offset = action_offset(action)
            point = aim_point(center, bot, action)
            assert np.linalg.norm(point - center) == pytest.approx(math.hypot(offset.dx, offset.dz))

    def test_coincident_positions_rejected(self):
        with pytest.raises(ActionGridError):
            aim_point(np.array([1.0, 2.0, 50.0]), np.array([1.0, 2.0, 0.0]), AimAction(5, 0))
