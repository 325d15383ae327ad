import math

import numpy as np
import pytest

from aimpilot.harness.metrics import (
    LifeMetrics,
    MetricsError,
    action_heatmap,
    bucket_accuracy,
    kd_ratio,
    kd_spread,
    pcwr_identity,
    phase_mean,
    selection_entropy,
)
from aimpilot.learning.reward_shaping import pcwr_rewards
from aimpilot.services.config import AgentConfig


def life(index: int, hits: int, misses: int) -> LifeMetrics:
    return LifeMetrics(index, hits, misses, 0.0, 10.0, 0, 0.2)


class TestLifeMetrics:
    def test_accuracy(self):
        assert life(1, 3, 1).accuracy == pytest.approx(0.75)

    def test_no_shots_is_empty(self):
        metrics = life(1, 0, 0)
        assert metrics.accuracy is None
        assert metrics.to_row()["accuracy"] == ""

    def test_row_round_trip(self):
        metrics = LifeMetrics(7, 12, 30, 2987.0, 41.25, 2, 0.17)
        assert LifeMetrics.from_row({k: str(v) for k, v in metrics.to_row().items()}) == metrics


class TestBucketAccuracy:
    def test_fifteen_hundred_lives(self):
        assert len(bucket_accuracy([0.3] * 1500)) == 150

    def test_constant_series(self):
        assert bucket_accuracy([0.4] * 35) == pytest.approx([0.4] * 4)

    def test_hand_example(self):
        series = [life(1, 1, 3).accuracy, life(2, 3, 1).accuracy]
        assert bucket_accuracy(series, bucket=2) == pytest.approx([0.5])

    def test_partial_final_bucket(self):
        series = [0.0] * 10 + [0.2, 0.4]
        assert bucket_accuracy(series) == pytest.approx([0.0, 0.3])

    def test_shotless_lives_skipped(self):
        assert bucket_accuracy([None, 0.5, None, 0.3], bucket=2) == pytest.approx([0.5, 0.3])
        assert bucket_accuracy([None, None], bucket=2) == [None]

    def test_empty_rejected(self):
        with pytest.raises(MetricsError):
            bucket_accuracy([])


class TestPhaseMean:
    def test_first_and_last_fifth(self):
        series = [0.1] * 20 + [0.5] * 60 + [0.9] * 20
        assert phase_mean(series, 0.2, last=False) == pytest.approx(0.1)
        assert phase_mean(series, 0.2, last=True) == pytest.approx(0.9)

    def test_short_series_uses_one_point(self):
        assert phase_mean([0.3, 0.7], 0.2, last=True) == pytest.approx(0.7)


class TestHeatmap:
    def test_uniform_selection(self):
        rng = np.random.default_rng(0)
        counts = np.bincount(rng.integers(0, 44, size=440_000), minlength=44)
        grid = action_heatmap(counts)
        assert grid.shape == (4, 11)
        assert grid.sum() == pytest.approx(100.0, abs=1e-9)
        assert np.allclose(grid, 100 / 44, atol=0.1)

    def test_layout_row_is_height(self):
        counts = np.zeros(44)
        counts[11 * 2 + 7] = 5
        grid = action_heatmap(counts)
        assert grid[2, 7] == pytest.approx(100.0)

    def test_per_life_rows_are_summed(self):
        rows = np.zeros((3, 44))
        rows[:, 0] = 1
        rows[2, 43] = 3
        grid = action_heatmap(rows)
        assert grid[0, 0] == pytest.approx(50.0)
        assert grid[3, 10] == pytest.approx(50.0)

    def test_empty_window_rejected(self):
        with pytest.raises(MetricsError):
            action_heatmap(np.zeros(44))

    def test_wrong_shape_rejected(self):
        with pytest.raises(MetricsError):
            action_heatmap(np.ones(10))


class TestEntropy:
    def test_uniform_is_maximal(self):
        assert selection_entropy(np.ones(44)) == pytest.approx(math.log2(44))

    def test_concentrated_is_lower(self):
        counts = np.ones(44)
        counts[5] = 500
        assert selection_entropy(counts) < math.log2(44)

    def test_single_action(self):
        counts = np.zeros(44)
        counts[3] = 9
        assert selection_entropy(counts) == pytest.approx(0.0)


class TestKillDeath:
    def test_ratio(self):
        assert kd_ratio(5, 4) == pytest.approx(1.25)

    def test_no_kills(self):
        assert kd_ratio(0, 7) == 0.0

    def test_no_deaths(self):
        assert kd_ratio(3, 0) == math.inf

    def test_negative_rejected(self):
        with pytest.raises(MetricsError):
            kd_ratio(-1, 2)

    def test_spread_skips_infinite(self):
        assert kd_spread([1.0, 2.0, math.inf, 3.0]) == pytest.approx((2.0, 1.0, 3.0))
        assert kd_spread([math.inf]) is None


class TestPcwrIdentity:
    def test_worked_example(self):
        # endpoints 250 * 2, interior 500, isolated 125, three misses
        assert pcwr_identity("MHHHMHM") == pytest.approx(1122.0)
        shaped = pcwr_rewards("MHHHMHM", AgentConfig(pcwr_enabled=True))
        assert shaped == pytest.approx([-1.0, 250.0, 500.0, 250.0, -1.0, 125.0, -1.0])
        assert pcwr_identity("MHHHMHM") == pytest.approx(sum(shaped))

    def test_all_misses(self):
        assert pcwr_identity("MMMM") == pytest.approx(-4.0)
