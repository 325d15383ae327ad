from __future__ import annotations

from pathlib import Path

import typer
from rich.console import Console

app = typer.Typer(help="Learned aiming for a simulated deathmatch bot.")

console = Console()

PCWR_CHOICES = {"on": True, "off": False}


def _fail(exc: Exception) -> None:
    console.print(f"[red]{exc}[/red]")
    raise typer.Exit(code=1)


def _parse_seeds(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise typer.BadParameter(f"seeds must be comma-separated integers, got {raw!r}") from exc


def _parse_pcwr(raw: str) -> bool:
    try:
        return PCWR_CHOICES[raw.lower()]
    except KeyError as exc:
        raise typer.BadParameter("--pcwr must be 'on' or 'off'") from exc


def _output_dir(out: Path | None) -> Path:
    from aimpilot.settings import get_settings

    return out if out is not None else get_settings().output_root


def _run_pipeline(runs: list, out: Path, workers: int | None) -> None:
    from aimpilot.harness.outputs import OutputError
    from aimpilot.harness.runner import HarnessError
    from aimpilot.learning.snapshot import SnapshotFormatError
    from aimpilot.settings import get_settings
    from aimpilot.start import create_experiment_pipeline
    from aimpilot.state import ExperimentState

    settings = get_settings()
    pipeline = create_experiment_pipeline()
    initial_state = ExperimentState(
        output_dir=out,
        runs=runs,
        workers=workers if workers is not None else settings.workers,
        log_level=settings.log_level,
    )
    try:
        final_state = pipeline.invoke(initial_state)
    except (HarnessError, OutputError, SnapshotFormatError) as exc:
        _fail(exc)
    if final_state.get("failures"):
        raise typer.Exit(code=1)


def _build_runs(variants: list[dict]) -> list:
    from pydantic import ValidationError

    from aimpilot.harness.runner import RunConfig
    from aimpilot.services.config import ConfigError, load_config

    try:
        simulation = load_config()
        return [RunConfig(simulation=simulation, **item) for item in variants]
    except ConfigError as exc:
        _fail(exc)
    except ValidationError as exc:
        _fail(ValueError(_first_error(exc)))
    return []


def _first_error(exc) -> str:
    error = exc.errors()[0]
    location = ".".join(str(part) for part in error["loc"])
    return f"invalid {location}: {error['msg']}"


@app.callback()
def main(
    log_level: str = typer.Option(None, "--log-level", help="Override AIMPILOT_LOG_LEVEL."),
):
    from aimpilot.services.log import configure_logging
    from aimpilot.settings import get_settings

    configure_logging(log_level or get_settings().log_level)


@app.command()
def init(
    force: bool = typer.Option(False, "--force", help="Overwrite an existing config file."),
):
    """Write the default simulation config to .aimpilot/config.json for editing."""
    from aimpilot.services.config import (
        ConfigError,
        SimulationConfig,
        config_exists,
        config_path,
        write_config,
    )

    if config_exists() and not force:
        if not typer.confirm(f"{config_path()} exists. Overwrite with defaults?", default=False):
            return
    try:
        path = write_config(SimulationConfig())
    except ConfigError as exc:
        _fail(exc)
    console.print(f"[green]Wrote defaults to {path}[/green]")


@app.command()
def run(
    pcwr: str = typer.Option("off", "--pcwr", help="Cluster-weighted rewards: on or off."),
    pas: int = typer.Option(3, "--pas", help="Persistence interval in ticks (1 disables)."),
    lives: int = typer.Option(200, "--lives", help="Deaths to play per seed."),
    seeds: str = typer.Option("1,2,3", "--seeds", help="Comma-separated seeds."),
    level: int = typer.Option(3, "--level", help="Opponent skill level 1..5."),
    out: Path = typer.Option(None, "--out", help="Output root (default AIMPILOT_OUTPUT_ROOT)."),
    listen: str = typer.Option(None, "--listen", help="Run over TCP bound to HOST:PORT."),
    snapshot_every: int = typer.Option(25, "--snapshot-every", help="Snapshot cadence."),
    heatmap_every: int = typer.Option(None, "--heatmap-every", help="Lives per heat-map window."),
    resume_from: Path = typer.Option(None, "--resume-from", help="Start from a Q snapshot."),
    hit_reward: float = typer.Option(None, "--hit-reward", help="Override the hit reward."),
    event_log: bool = typer.Option(False, "--event-log", help="Write events.log per seed."),
    workers: int = typer.Option(None, "--workers", help="Worker processes."),
):
    """Run one configuration across seeds."""
    out_dir = _output_dir(out)
    runs = _build_runs(
        [
            dict(
                pcwr=_parse_pcwr(pcwr),
                pas_interval=pas,
                lives_target=lives,
                seeds=_parse_seeds(seeds),
                opponent_level=level,
                output_dir=out_dir,
                snapshot_every=snapshot_every,
                heatmap_every=heatmap_every,
                listen=listen,
                resume_from=resume_from,
                hit_reward=hit_reward,
                event_log=event_log,
            )
        ]
    )
    _run_pipeline(runs, out_dir, workers)


@app.command()
def study(
    lives: int = typer.Option(200, "--lives", help="Deaths to play per seed."),
    seeds: str = typer.Option("1,2,3", "--seeds", help="Comma-separated seeds."),
    level: int = typer.Option(3, "--level", help="Opponent skill level 1..5."),
    pas: int = typer.Option(3, "--pas", help="Persistence interval for the PAS variants."),
    out: Path = typer.Option(None, "--out", help="Output root (default AIMPILOT_OUTPUT_ROOT)."),
    snapshot_every: int = typer.Option(25, "--snapshot-every", help="Snapshot cadence."),
    workers: int = typer.Option(None, "--workers", help="Worker processes."),
):
    """Run all four PCWR x PAS variations and write comparison.csv."""
    if pas < 2:
        _fail(ValueError("--pas must be at least 2 so the PAS variants differ from the baseline"))
    out_dir = _output_dir(out)
    parsed_seeds = _parse_seeds(seeds)
    variants = [
        dict(
            pcwr=pcwr_on,
            pas_interval=interval,
            lives_target=lives,
            seeds=parsed_seeds,
            opponent_level=level,
            output_dir=out_dir,
            snapshot_every=snapshot_every,
        )
        for pcwr_on in (True, False)
        for interval in (pas, 1)
    ]
    _run_pipeline(_build_runs(variants), out_dir, workers)


@app.command("pas-sweep")
def pas_sweep(
    start: int = typer.Option(1, "--from", help="First persistence interval."),
    stop: int = typer.Option(10, "--to", help="Last persistence interval."),
    pcwr: str = typer.Option("off", "--pcwr", help="Cluster-weighted rewards: on or off."),
    lives: int = typer.Option(200, "--lives", help="Deaths to play per seed."),
    seeds: str = typer.Option("1,2,3", "--seeds", help="Comma-separated seeds."),
    level: int = typer.Option(3, "--level", help="Opponent skill level 1..5."),
    out: Path = typer.Option(None, "--out", help="Output root (default AIMPILOT_OUTPUT_ROOT)."),
    workers: int = typer.Option(None, "--workers", help="Worker processes."),
):
    """Run one configuration per persistence interval and write pas_sweep.csv."""
    if start > stop:
        _fail(ValueError("--from must not exceed --to"))
    out_dir = _output_dir(out)
    pcwr_on = _parse_pcwr(pcwr)
    parsed_seeds = _parse_seeds(seeds)
    variants = [
        dict(
            pcwr=pcwr_on,
            pas_interval=interval,
            lives_target=lives,
            seeds=parsed_seeds,
            opponent_level=level,
            output_dir=out_dir,
            snapshot_every=0,
        )
        for interval in range(start, stop + 1)
    ]
    runs = _build_runs(variants)
    _run_pipeline(runs, out_dir, workers)

    from aimpilot.harness.outputs import OutputError, summarize_directory, write_pas_sweep

    try:
        _, aggregates = summarize_directory(out_dir)
        path = write_pas_sweep(out_dir, aggregates)
    except OutputError as exc:
        _fail(exc)
    console.print(f"[green]Wrote {path}[/green]")


@app.command()
def report(directory: Path = typer.Argument(..., help="Output root of earlier runs.")):
    """Regenerate summary tables from the raw per-life CSVs."""
    from aimpilot.harness.outputs import OutputError
    from aimpilot.start import create_report_pipeline
    from aimpilot.state import ExperimentState

    try:
        create_report_pipeline().invoke(ExperimentState(output_dir=directory))
    except OutputError as exc:
        _fail(exc)


@app.command()
def serve(
    listen: str = typer.Option(None, "--listen", help="HOST:PORT (default AIMPILOT_LISTEN)."),
    seed: int = typer.Option(1, "--seed", help="World seed."),
    level: int = typer.Option(3, "--level", help="Opponent skill level 1..5."),
):
    """Host the simulator for an external learner over the line protocol."""
    import numpy as np

    from aimpilot.botlink.transport import WorldServer, parse_address
    from aimpilot.services.config import ConfigError, load_config
    from aimpilot.settings import get_settings
    from aimpilot.sim.combat import SimulationError, World

    try:
        address = parse_address(listen or get_settings().listen)
        simulation = load_config()
        world_seq, _ = np.random.SeedSequence(seed).spawn(2)
        World(simulation, np.random.default_rng(world_seq), level)
    except (ConfigError, SimulationError, ValueError) as exc:
        _fail(exc)

    def world_factory() -> World:
        return World(simulation, np.random.default_rng(world_seq), level)

    try:
        server = WorldServer(address, world_factory)
    except OSError as exc:
        _fail(exc)
    host, port = server.address
    console.print(f"[bold blue]Serving level {level} worlds on {host}:{port}[/bold blue]")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        console.print("Stopped.")
    finally:
        server.server_close()


@app.command("export-qtab")
def export_qtab(
    snapshot: Path = typer.Argument(..., help="qtab_<life>.bin file."),
    out: Path = typer.Argument(..., help="Destination CSV."),
):
    """Write a snapshot as state_index,action_id,q_value rows."""
    from aimpilot.learning.snapshot import SnapshotFormatError, export_csv, load_snapshot

    try:
        path = export_csv(load_snapshot(snapshot), out)
    except (SnapshotFormatError, OSError) as exc:
        _fail(exc)
    console.print(f"[green]Wrote {path}[/green]")
