"""Tests for SARSA(lambda), the exploration schedule and batch period updates."""

import logging

import numpy as np
import pytest

from aimpilot.learning.action_grid import ACTION_COUNT, AimAction
from aimpilot.learning.reward_shaping import Outcome, PeriodStep
from aimpilot.learning.rl_core import (
    Bootstrap,
    PeriodLengthError,
    QTable,
    QValueBoundError,
    TraceTable,
    apply_period_updates,
    check_bounds,
    epsilon_for_deaths,
    sarsa_step_update,
    select_action,
    value_bounds,
)
from aimpilot.learning.state_codec import STATE_COUNT, decompose_state
from aimpilot.services.config import AgentConfig

CFG = AgentConfig()


def _step(state: int, action: int, tick: int, outcome: Outcome = Outcome.MISS) -> PeriodStep:
    return PeriodStep(decompose_state(state), AimAction.from_id(action), outcome, tick)


class TestEpsilonSchedule:
    @pytest.mark.parametrize(
        "deaths, expected",
        [(0, 0.20), (99, 0.20), (100, 0.17), (250, 0.14), (499, 0.08), (500, 0.05), (10000, 0.05)],
    )
    def test_schedule_values(self, deaths, expected):
        assert epsilon_for_deaths(deaths) == expected

    def test_non_increasing(self):
        values = [epsilon_for_deaths(d) for d in range(0, 2000, 10)]
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestSelectAction:
    def test_greedy_unique_max(self, rng):
        row = np.zeros(ACTION_COUNT)
        row[17] = 3.0
        assert select_action(row, 0.0, rng).id == 17

    def test_full_exploration_is_uniform(self):
        """Chi-square against uniform over 10^5 draws."""
        rng = np.random.default_rng(99)
        row = np.arange(ACTION_COUNT, dtype=float)
        counts = np.bincount(
            [select_action(row, 1.0, rng).id for _ in range(100_000)], minlength=ACTION_COUNT
        )
        expected = 100_000 / ACTION_COUNT
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        # 43 degrees of freedom
        assert chi2 < 100.0

    def test_ties_broken_uniformly(self):
        rng = np.random.default_rng(5)
        row = np.zeros(ACTION_COUNT)
        counts = np.bincount(
            [select_action(row, 0.0, rng).id for _ in range(44_000)], minlength=ACTION_COUNT
        )
        assert counts.min() > 800
        assert counts.max() < 1200

    def test_partial_tie_only_picks_tied(self):
        rng = np.random.default_rng(3)
        row = np.zeros(ACTION_COUNT)
        row[[2, 9]] = 1.0
        picks = {select_action(row, 0.0, rng).id for _ in range(200)}
        assert picks == {2, 9}

    def test_same_seed_same_choices(self):
        row = np.zeros(ACTION_COUNT)
        a = [select_action(row, 0.3, np.random.default_rng(8)).id for _ in range(5)]
        b = [select_action(row, 0.3, np.random.default_rng(8)).id for _ in range(5)]
        assert a == b


class TestSarsaStepUpdate:
    def test_first_hit_reward(self):
        q, e = QTable(), TraceTable()
        s, a = decompose_state(10), AimAction.from_id(3)
        s1, a1 = decompose_state(11), AimAction.from_id(4)
        sarsa_step_update(q, e, s, a, 250.0, s1, a1, False, CFG)
        assert q.values[10, 3] == 175.0
        assert np.count_nonzero(q.values) == 1

    def test_second_step_propagates_through_trace(self):
        """0.7 * (-1) * (0.5 * 0.9) lands on the earlier pair."""
        q, e = QTable(), TraceTable()
        s, a = decompose_state(10), AimAction.from_id(3)
        s1, a1 = decompose_state(11), AimAction.from_id(4)
        sarsa_step_update(q, e, s, a, 250.0, s1, a1, False, CFG)
        sarsa_step_update(q, e, s1, a1, -1.0, None, None, True, CFG)
        assert q.values[10, 3] == pytest.approx(174.685, abs=1e-12)
        assert q.values[11, 4] == pytest.approx(-0.7, abs=1e-12)

    def test_zero_reward_terminal_changes_nothing(self):
        q, e = QTable(), TraceTable()
        s, a = decompose_state(0), AimAction.from_id(0)
        sarsa_step_update(q, e, s, a, 0.0, None, None, True, CFG)
        assert not q.values.any()

    def test_traces_replace_and_decay(self):
        q, e = QTable(), TraceTable()
        s, a = decompose_state(5), AimAction.from_id(1)
        for _ in range(3):
            sarsa_step_update(q, e, s, a, 1.0, s, a, False, CFG)
            assert e.traces.max() <= 1.0
        assert e.traces[5, 1] == pytest.approx(0.45)


def _reference(q0, steps, rewards, bootstrap, terminal, cfg):
    """Eager per-step SARSA(lambda) on plain dicts."""
    q = dict(q0)
    e: dict[tuple[int, int], float] = {}
    for i, ((s, a), r) in enumerate(zip(steps, rewards)):
        if i + 1 < len(steps):
            nxt = steps[i + 1]
        elif not terminal and bootstrap is not None:
            nxt = bootstrap
        else:
            nxt = None
        target = r + (cfg.gamma * q.get(nxt, 0.0) if nxt is not None else 0.0)
        delta = target - q.get((s, a), 0.0)
        e[(s, a)] = 1.0
        for key, trace in e.items():
            q[key] = q.get(key, 0.0) + cfg.alpha * delta * trace
        for key in e:
            e[key] *= cfg.gamma * cfg.lambda_
    return q


class TestApplyPeriodUpdates:
    def test_empty_period_is_noop(self):
        q, e = QTable(), TraceTable()
        apply_period_updates(q, e, [], [], CFG, terminal=True)
        assert not q.values.any()

    def test_length_mismatch_rejected(self):
        with pytest.raises(PeriodLengthError):
            apply_period_updates(
                QTable(), TraceTable(), [_step(0, 0, 0)], [1.0, 2.0], CFG, terminal=True
            )

    def test_single_terminal_hit(self):
        q, e = QTable(), TraceTable()
        apply_period_updates(q, e, [_step(7, 2, 0, Outcome.HIT)], [250.0], CFG, terminal=True)
        assert q.values[7, 2] == 175.0

    def test_resets_traces_first(self):
        q, e = QTable(), TraceTable()
        e.traces[100, 10] = 1.0
        apply_period_updates(q, e, [_step(7, 2, 0)], [-1.0], CFG, terminal=True)
        assert q.values[100, 10] == 0.0

    def test_three_step_hand_computation(self):
        q, e = QTable(), TraceTable()
        steps = [_step(1, 0, 0), _step(2, 0, 1, Outcome.HIT), _step(3, 0, 2)]
        apply_period_updates(q, e, steps, [-1.0, 250.0, -1.0], CFG, terminal=True)
        # step 1: Q1 = -0.7
        # step 2: Q2 = 175, Q1 += 0.7 * 250 * 0.45 = 78.75
        # step 3: delta = -1, Q3 = -0.7, Q2 -= 0.315, Q1 -= 0.7 * 0.2025
        assert q.values[1, 0] == pytest.approx(-0.7 + 78.75 - 0.14175)
        assert q.values[2, 0] == pytest.approx(175.0 - 0.315)
        assert q.values[3, 0] == pytest.approx(-0.7)

    def test_bootstrap_uses_next_period_pair(self):
        q, e = QTable(), TraceTable()
        q.values[50, 5] = 100.0
        bootstrap = Bootstrap(decompose_state(50), AimAction.from_id(5))
        apply_period_updates(
            q, e, [_step(1, 1, 0)], [0.0], CFG, terminal=False, bootstrap=bootstrap
        )
        assert q.values[1, 1] == pytest.approx(0.7 * 0.5 * 100.0)

    def test_matches_eager_reference_on_random_episodes(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            length = int(rng.integers(1, 21))
            pairs = [(int(rng.integers(10)), int(rng.integers(4))) for _ in range(length)]
            rewards = [float(rng.choice([-1.0, 125.0, 250.0, 500.0])) for _ in range(length)]
            terminal = bool(rng.random() < 0.5)
            boot_pair = (int(rng.integers(10)), int(rng.integers(4)))

            q = QTable()
            q.values[:10, :4] = rng.uniform(-2, 50, size=(10, 4))
            q0 = {(s, a): float(q.values[s, a]) for s in range(10) for a in range(4)}

            steps = [_step(s, a, t) for t, (s, a) in enumerate(pairs)]
            bootstrap = Bootstrap(decompose_state(boot_pair[0]), AimAction.from_id(boot_pair[1]))
            apply_period_updates(
                q, TraceTable(), steps, rewards, CFG, terminal=terminal, bootstrap=bootstrap
            )
            expected = _reference(q0, pairs, rewards, boot_pair, terminal, CFG)
            for (s, a), value in expected.items():
                assert q.values[s, a] == pytest.approx(value, abs=1e-9)
            assert not q.values[10:].any()


class TestBounds:
    def test_default_value_range(self):
        assert value_bounds(CFG) == (-2.0, 1000.0)

    def test_violation_warns_by_default(self, caplog):
        q = QTable()
        q.values[0, 0] = 5000.0
        with caplog.at_level(logging.WARNING):
            assert check_bounds(q, CFG) is False
        assert "outside" in caplog.text

    def test_violation_raises_when_strict(self):
        q = QTable()
        q.values[0, 0] = -10.0
        with pytest.raises(QValueBoundError):
            check_bounds(q, AgentConfig(strict_bounds=True))

    def test_non_finite_detected(self):
        q = QTable()
        q.values[3, 3] = np.nan
        with pytest.raises(QValueBoundError):
            q.assert_bounded(-2.0, 1000.0)

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            QTable(np.zeros((10, 10)))

    def test_table_dimensions(self):
        assert QTable().values.shape == (STATE_COUNT, ACTION_COUNT)
