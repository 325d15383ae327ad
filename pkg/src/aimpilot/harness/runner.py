from __future__ import annotations

import logging
import os
import shutil
from concurrent.futures import ProcessPoolExecutor, as_completed
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from aimpilot.botlink.protocol import MessageKind, make_message
from aimpilot.botlink.session import WorldSession
from aimpilot.botlink.transport import (
    InProcessTransport,
    SocketTransport,
    Transport,
    WorldServer,
    parse_address,
)
from aimpilot.harness.learner import ShootingBot
from aimpilot.harness.outputs import (
    SeedSummary,
    config_name,
    read_actions,
    read_lives,
    summarize_seed,
    technique_label,
    write_actions,
    write_buckets,
    write_heatmap,
    write_lives,
    write_periods,
    write_seed_summary,
)
from aimpilot.learning.snapshot import load_snapshot, write_snapshot
from aimpilot.services.config import SimulationConfig
from aimpilot.services.log import configure_logging
from aimpilot.sim.combat import World
from aimpilot.sim.event_log import EventLog

logger = logging.getLogger(__name__)

MAX_TICKS_PER_LIFE = 100_000


class HarnessError(RuntimeError):
    """Raised when a run cannot start or a job fails mid-run."""


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    pcwr: bool = False
    pas_interval: int = Field(default=3, ge=1, le=10)
    lives_target: int = Field(default=200, ge=1)
    seeds: tuple[int, ...] = (1, 2, 3)
    opponent_level: int = Field(default=3, ge=1, le=5)
    output_dir: Path = Path("runs")
    snapshot_every: int = Field(default=25, ge=0)
    heatmap_every: int | None = Field(default=None, ge=1)
    listen: str | None = None
    event_log: bool = False
    resume_from: Path | None = None
    hit_reward: float | None = Field(default=None, gt=0)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)

    @field_validator("seeds")
    @classmethod
    def _validate_seeds(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if not value:
            raise ValueError("at least one seed is required")
        if len(set(value)) != len(value):
            raise ValueError("seeds must be distinct")
        if any(seed < 0 for seed in value):
            raise ValueError("seeds must be non-negative")
        return value

    @property
    def name(self) -> str:
        return config_name(self.pcwr, self.pas_interval)

    @property
    def label(self) -> str:
        return technique_label(self.pcwr, self.pas_interval)

    @property
    def heatmap_window(self) -> int:
        return self.heatmap_every or max(1, self.lives_target // 10)

    def effective_simulation(self) -> SimulationConfig:
        """Simulation config with the run-level switches folded into the agent section."""
        update: dict[str, object] = {
            "pcwr_enabled": self.pcwr,
            "pas_interval": self.pas_interval,
        }
        if self.hit_reward is not None:
            update["hit_reward"] = self.hit_reward
        agent = self.simulation.agent.model_copy(update=update)
        return self.simulation.model_copy(update={"agent": agent})

    def seed_dir(self, seed: int) -> Path:
        return self.output_dir / self.name / str(seed)


@dataclass(frozen=True)
class JobResult:
    config: str
    seed: int
    summary: SeedSummary | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


class _SnapshotCadence:
    """Writes `qtab_<life>.bin` every `every` kills-or-deaths."""

    def __init__(self, bot: ShootingBot, directory: Path, every: int) -> None:
        self.bot = bot
        self.directory = directory
        self.every = every
        self.events = 0

    def __call__(self, kind: str, life_index: int) -> None:
        if not self.every:
            return
        self.events += 1
        if self.events % self.every == 0:
            write_snapshot(self.bot.q, self.directory / f"qtab_{life_index}.bin")


def play(bot: ShootingBot, transport: Transport, lives_target: int) -> tuple[int, int]:
    """Drive one learner through `lives_target` deaths; return the server's kill/death tally."""
    greeting = transport.open()
    for message in greeting[:-1]:
        bot.configure(message)
    obs = greeting[-1]
    life_start = obs.tick
    deaths = bot.deaths
    while bot.deaths < lives_target:
        replies = transport.exchange(bot.decide(obs))
        for message in replies[:-1]:
            if message.kind is MessageKind.EVT:
                bot.on_event(message)
        obs = replies[-1]
        if bot.deaths != deaths:
            deaths = bot.deaths
            life_start = obs.tick
        elif obs.tick - life_start > MAX_TICKS_PER_LIFE:
            raise HarnessError(
                f"life {bot.life_index} exceeded {MAX_TICKS_PER_LIFE} ticks without a death"
            )
    bot.finish()
    end = transport.close(
        make_message(MessageKind.END, obs.tick, kills=bot.kills, deaths=bot.deaths)
    )
    return int(end["kills"]), int(end["deaths"])


@contextmanager
def _transport(config: RunConfig, world: World, job_index: int) -> Iterator[Transport]:
    if config.listen is None:
        yield InProcessTransport(WorldSession(world))
        return
    host, port = parse_address(config.listen)
    if port:
        port += job_index
    server = WorldServer((host, port), lambda: world)
    server.start_background()
    try:
        yield SocketTransport(server.address)
    finally:
        server.shutdown()
        server.server_close()


def _reset_dir(path: Path) -> None:
    if path.exists():
        shutil.rmtree(path)


def run_seed(config: RunConfig, seed: int, job_index: int = 0) -> SeedSummary:
    """Play one (config, seed) job and publish its directory once everything is written."""
    simulation = config.effective_simulation()
    final_dir = config.seed_dir(seed)
    partial_dir = final_dir.with_name(f"{seed}.partial")
    _reset_dir(partial_dir)
    partial_dir.mkdir(parents=True)

    world_seq, learner_seq = np.random.SeedSequence(seed).spawn(2)
    q = load_snapshot(config.resume_from) if config.resume_from else None
    bot = ShootingBot(simulation, np.random.default_rng(learner_seq), q)
    bot.on_score = _SnapshotCadence(bot, partial_dir, config.snapshot_every)

    event_log = EventLog.open(partial_dir / "events.log") if config.event_log else None
    world = World(simulation, np.random.default_rng(world_seq), config.opponent_level, event_log)
    logger.info("Starting %s seed %d (%d lives)", config.name, seed, config.lives_target)
    try:
        with _transport(config, world, job_index) as transport:
            kills, deaths = play(bot, transport, config.lives_target)
    finally:
        if event_log is not None:
            event_log.close()
    if (kills, deaths) != (bot.kills, bot.deaths):
        raise HarnessError(
            f"tally mismatch: learner {bot.kills}/{bot.deaths}, world {kills}/{deaths}"
        )

    write_lives(partial_dir, bot.lives)
    write_actions(partial_dir, bot.life_actions)
    write_periods(partial_dir, bot.periods)
    write_buckets(partial_dir, bot.lives)
    window = config.heatmap_window
    for end in range(window, len(bot.life_actions) + 1, window):
        write_heatmap(
            partial_dir,
            end,
            np.stack(bot.life_actions[end - window : end]),
            simulation.grid,
        )
    write_snapshot(bot.q, partial_dir / f"qtab_{len(bot.lives)}.bin")

    summary = summarize_seed(config.name, seed, read_lives(partial_dir), read_actions(partial_dir))
    write_seed_summary(partial_dir, summary)

    _reset_dir(final_dir)
    os.replace(partial_dir, final_dir)
    logger.info(
        "Finished %s seed %d: %d kills, %d deaths, %d bound warnings",
        config.name,
        seed,
        bot.kills,
        bot.deaths,
        bot.bound_violations,
    )
    return summary


def _run_job(config: RunConfig, seed: int, job_index: int) -> JobResult:
    try:
        summary = run_seed(config, seed, job_index)
    except Exception as exc:  # noqa: BLE001
        logger.error("Job %s seed %d failed: %s", config.name, seed, exc)
        return JobResult(config.name, seed, error=f"{type(exc).__name__}: {exc}")
    return JobResult(config.name, seed, summary=summary)


def run_jobs(
    configs: list[RunConfig], *, workers: int | None = None, log_level: str = "INFO"
) -> list[JobResult]:
    """Fan (config, seed) jobs out to a process pool; results come back in job order."""
    jobs = [(config, seed) for config in configs for seed in config.seeds]
    if not jobs:
        raise HarnessError("nothing to run")
    pool_size = min(workers or os.cpu_count() or 1, len(jobs))
    if pool_size == 1:
        return [_run_job(config, seed, index) for index, (config, seed) in enumerate(jobs)]

    results: dict[int, JobResult] = {}
    with ProcessPoolExecutor(
        max_workers=pool_size, initializer=configure_logging, initargs=(log_level,)
    ) as pool:
        futures = {
            pool.submit(_run_job, config, seed, index): index
            for index, (config, seed) in enumerate(jobs)
        }
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return [results[index] for index in range(len(jobs))]
