import logging

import numpy as np
import pytest

from aimpilot.botlink.protocol import MessageKind, make_message
from aimpilot.harness.learner import ShootingBot
from aimpilot.learning.action_grid import AimAction
from aimpilot.learning.state_codec import RelativeObservation, encode
from aimpilot.services.config import AgentConfig, SimulationConfig, WeaponConfig


def visible(tick: int, dist: float = 600.0):
    return make_message(MessageKind.OBS, tick, vis=1, vf=0, vl=0, rot=0, dist=dist)


def hidden(tick: int):
    return make_message(MessageKind.OBS, tick, vis=0, vf=0, vl=0, rot=0, dist=0)


def damage(tick: int, fired: int):
    return make_message(MessageKind.EVT, tick, kind="DMG", victim=1, fired=fired, dmg=32)


def kill(tick: int):
    return make_message(MessageKind.EVT, tick, kind="KILL", victim=1)


def death(tick: int):
    return make_message(MessageKind.EVT, tick, kind="DEATH", victim=0)


def make_bot(delay: int = 1, **agent) -> ShootingBot:
    config = SimulationConfig(
        agent=AgentConfig(pas_interval=1, **agent),
        weapon=WeaponConfig(registration_delay=delay),
    )
    return ShootingBot(config, np.random.default_rng(0))


class TestDecide:
    def test_hidden_opponent_holds_fire(self):
        act = make_bot().decide(hidden(0))
        assert act.kind is MessageKind.ACT
        assert act.payload == {"shoot": 0, "aid": 0}

    def test_visible_opponent_fires(self):
        bot = make_bot()
        act = bot.decide(visible(4))
        assert act.tick == 4
        assert act["shoot"] == 1
        assert 0 <= act["aid"] < 44
        assert bot.life_actions == []
        assert bot._life.action_counts.sum() == 1

    def test_configure_reads_delay(self):
        bot = make_bot()
        bot.configure(make_message(MessageKind.CFG, 0, delay=3, level=3, tick=0.25))
        assert bot.registration_delay == 3


class TestPeriods:
    def test_period_closes_after_grace(self):
        bot = make_bot()
        bot.decide(visible(0))
        bot.decide(visible(1))
        bot.on_event(damage(2, fired=1))
        bot.decide(hidden(2))
        assert bot.periods == []
        bot.decide(hidden(3))
        assert bot.periods == []
        # applied once the next period opens and the old reports are due
        bot.decide(visible(4))
        assert len(bot.periods) == 1
        record = bot.periods[0]
        assert record.outcomes == "MH"
        assert not record.terminal
        assert record.reward == pytest.approx(249.0)

    def test_damage_goes_to_latest_step(self):
        bot = make_bot()
        for tick in range(3):
            bot.decide(visible(tick))
        bot.on_event(damage(3, fired=0))
        bot.on_event(kill(3))
        assert bot.periods[0].outcomes == "MMH"
        assert bot.periods[0].terminal

    def test_ground_truth_attribution(self):
        bot = make_bot(ground_truth_attribution=True)
        for tick in range(3):
            bot.decide(visible(tick))
        bot.on_event(damage(3, fired=0))
        bot.on_event(kill(3))
        assert bot.periods[0].outcomes == "HMM"

    def test_ground_truth_reaches_period_closed_inside_grace(self):
        bot = make_bot(delay=2, ground_truth_attribution=True)
        bot.decide(visible(0))
        bot.decide(hidden(1))
        bot.decide(visible(2))
        # the shot from tick 0 registers only now, after the period was closed
        bot.on_event(damage(2, fired=0))
        assert bot.periods == []
        bot.decide(visible(3))
        assert [r.outcomes for r in bot.periods] == ["H"]
        assert not bot.periods[0].terminal
        bot.finish()
        assert [r.outcomes for r in bot.periods] == ["H", "MM"]
        assert bot._life.hits == 1

    def test_unmatched_ground_truth_report_warns(self, caplog):
        bot = make_bot(ground_truth_attribution=True)
        bot.decide(visible(0))
        with caplog.at_level(logging.WARNING, logger="aimpilot.harness.learner"):
            bot.on_event(damage(1, fired=7))
        assert "matches no shot fired at tick 7" in caplog.text
        bot.finish()
        assert bot.periods[0].outcomes == "M"

    def test_debug_log_names_state_and_aim(self, caplog):
        bot = make_bot()
        with caplog.at_level(logging.DEBUG, logger="aimpilot.harness.learner"):
            act = bot.decide(visible(0))
        state = encode(RelativeObservation(0.0, 0.0, 0.0, 600.0))
        aim = AimAction.from_id(act["aid"]).label()
        assert f"Tick 0: {state}, aim {aim}" in caplog.text
        assert "| Regular" in caplog.text

    def test_damage_without_period_ignored(self):
        bot = make_bot()
        bot.on_event(damage(0, fired=0))
        bot.finish()
        assert bot.periods == []

    def test_terminal_hit_updates_q(self):
        bot = make_bot()
        act = bot.decide(visible(0, dist=750.0))
        bot.on_event(damage(1, fired=0))
        bot.on_event(kill(1))
        state = encode(
            RelativeObservation(vel_forward=0.0, vel_lateral=0.0, facing_angle=0.0, distance=750.0)
        )
        # alpha * hit_reward with an empty trace history
        assert bot.q.row(state)[act["aid"]] == pytest.approx(0.7 * 250.0)
        assert bot.kills == 1
        assert bot.lives == []

    def test_pending_period_bootstraps_on_next(self):
        bot = make_bot()
        bot.decide(visible(0))
        bot.decide(hidden(1))
        bot.decide(hidden(2))
        assert bot.q.values.min() == 0.0
        bot.decide(visible(3))
        # the miss is applied once the next period's first choice is known
        assert bot.q.values.min() == pytest.approx(-0.7)

    def test_finish_applies_open_period(self):
        bot = make_bot()
        bot.decide(visible(0))
        bot.finish()
        assert len(bot.periods) == 1
        assert bot.periods[0].terminal
        assert bot.q.values.min() == pytest.approx(-0.7)


class TestLives:
    def test_death_records_life(self):
        bot = make_bot()
        bot.decide(visible(0))
        bot.decide(visible(1))
        bot.on_event(death(7))
        assert bot.deaths == 1
        assert bot.life_index == 2
        (first,) = bot.lives
        assert first.life_index == 1
        assert (first.hits, first.misses) == (0, 2)
        assert first.time_alive == pytest.approx(2.0)
        assert first.epsilon_in_effect == pytest.approx(0.20)
        assert bot.life_actions[0].sum() == 2

    def test_next_life_starts_after_death_tick(self):
        bot = make_bot()
        bot.on_event(death(7))
        bot.on_event(death(11))
        assert bot.lives[1].time_alive == pytest.approx(1.0)

    def test_epsilon_fixed_per_life(self):
        bot = make_bot()
        for tick in range(101):
            bot.on_event(death(tick))
        assert bot.lives[99].epsilon_in_effect == pytest.approx(0.20)
        assert bot.lives[100].epsilon_in_effect == pytest.approx(0.17)

    def test_kill_counted_in_life(self):
        bot = make_bot()
        bot.decide(visible(0))
        bot.on_event(kill(1))
        bot.on_event(death(5))
        assert bot.lives[0].kills_during_life == 1


class TestScoreHook:
    def test_reports_kills_and_deaths(self):
        calls = []
        bot = make_bot()
        bot.on_score = lambda kind, life: calls.append((kind, life))
        bot.on_event(kill(1))
        bot.on_event(death(2))
        bot.on_event(kill(3))
        assert calls == [("kill", 1), ("death", 1), ("kill", 2)]

    def test_learner_damage_and_opponent_death_ignored(self):
        calls = []
        bot = make_bot()
        bot.on_score = lambda kind, life: calls.append(kind)
        bot.on_event(make_message(MessageKind.EVT, 1, kind="DMG", victim=0))
        bot.on_event(make_message(MessageKind.EVT, 1, kind="DEATH", victim=1))
        assert calls == []
        assert bot.deaths == 0
