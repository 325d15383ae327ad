from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

CONFIG_DIR_NAME = ".aimpilot"
CONFIG_FILE_NAME = "config.json"


class ConfigError(RuntimeError):
    """Raised when config cannot be loaded or parsed."""


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CodecConfig(_Section):
    """Discretization edges for the opponent observation."""

    stationary_threshold: float = Field(default=10.0, gt=0)
    speed_edges: tuple[float, float] = (150.0, 300.0)
    distance_edges: tuple[float, float, float] = (500.0, 1000.0, 1500.0)

    @field_validator("speed_edges", "distance_edges")
    @classmethod
    def _validate_increasing(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(edge <= 0 for edge in value):
            raise ValueError("edges must be positive")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("edges must be strictly increasing")
        return value


class GridConfig(_Section):
    """Aim offset grid: evenly spaced lateral skews and a fixed set of heights."""

    lateral_span: float = Field(default=200.0, gt=0)
    lateral_steps: int = 11
    heights: tuple[float, float, float, float] = (0.0, 20.0, 40.0, 55.0)

    @field_validator("lateral_steps")
    @classmethod
    def _validate_steps(cls, value: int) -> int:
        if value != 11:
            raise ValueError("lateral_steps is fixed at 11 (44 actions)")
        return value

    @field_validator("heights")
    @classmethod
    def _validate_heights(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("heights must be strictly increasing")
        return value


class AgentConfig(_Section):
    """SARSA(lambda) learner parameters."""

    alpha: float = Field(default=0.7, ge=0, le=1)
    gamma: float = Field(default=0.5, ge=0, le=1)
    lambda_: float = Field(default=0.9, ge=0, le=1, alias="lambda")
    epsilon_initial: float = Field(default=0.20, ge=0, le=1)
    epsilon_step: float = Field(default=0.03, ge=0, le=1)
    epsilon_floor: float = Field(default=0.05, ge=0, le=1)
    deaths_per_step: int = Field(default=100, ge=1)
    hit_reward: float = Field(default=250.0, gt=0)
    miss_penalty: float = Field(default=-1.0, le=0)
    pas_interval: int = Field(default=3, ge=1, le=10)
    pcwr_enabled: bool = False
    strict_bounds: bool = False
    ground_truth_attribution: bool = False

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    @model_validator(mode="after")
    def _validate_epsilon(self) -> "AgentConfig":
        if self.epsilon_floor > self.epsilon_initial:
            raise ValueError("epsilon_floor must not exceed epsilon_initial")
        return self


class WeaponConfig(_Section):
    """Assault rifle primary fire."""

    bullets_per_tick: int = Field(default=4, ge=1)
    spread_stddev: float = Field(default=1.5, ge=0)
    recoil_drift: float = Field(default=0.3, ge=0)
    recoil_cap: float = Field(default=3.0, ge=0)
    damage_per_bullet: float = Field(default=8.0, ge=0)
    registration_delay: int = Field(default=1, ge=0)


class ArenaConfig(_Section):
    width: float = Field(default=2000.0, gt=0)
    depth: float = Field(default=2000.0, gt=0)
    height: float = Field(default=600.0, gt=0)
    spawn_points: tuple[tuple[float, float], ...] = (
        (250.0, 250.0),
        (1750.0, 250.0),
        (250.0, 1750.0),
        (1750.0, 1750.0),
    )
    # (center_x, center_y, half_size) of square pillars
    pillars: tuple[tuple[float, float, float], ...] = (
        (600.0, 1400.0, 100.0),
        (1400.0, 600.0, 100.0),
    )

    @model_validator(mode="after")
    def _validate_spawns(self) -> "ArenaConfig":
        if len(self.spawn_points) < 2:
            raise ValueError("at least two spawn points are required")
        for x, y in self.spawn_points:
            if not (0 <= x <= self.width and 0 <= y <= self.depth):
                raise ValueError(f"spawn point ({x}, {y}) lies outside the arena")
        return self


class OpponentConfig(_Section):
    """Fixed-strategy opponent, levels 1..5."""

    base_fire_probability: tuple[float, float, float, float, float] = (
        0.05,
        0.10,
        0.15,
        0.20,
        0.25,
    )
    damage_per_hit: float = Field(default=20.0, gt=0)
    speed_bands: tuple[float, float, float] = (100.0, 220.0, 400.0)
    pause_probability: float = Field(default=0.1, ge=0, le=1)
    segment_ticks: tuple[int, int] = (4, 12)
    waypoint_range: tuple[float, float] = (200.0, 1700.0)
    learner_strafe_speed: float = Field(default=150.0, ge=0)
    learner_strafe_ticks: int = Field(default=8, ge=1)

    @field_validator("base_fire_probability")
    @classmethod
    def _validate_fire(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(not 0.0 <= p <= 1.0 for p in value):
            raise ValueError("fire probabilities must lie in [0, 1]")
        return value

    @field_validator("speed_bands")
    @classmethod
    def _validate_speeds(cls, value: tuple[float, float, float]) -> tuple[float, float, float]:
        if any(speed <= 0 or speed > 440.0 for speed in value):
            raise ValueError("speed bands must lie in (0, 440] UU/s")
        return value


class SimulationConfig(_Section):
    codec: CodecConfig = CodecConfig()
    grid: GridConfig = GridConfig()
    agent: AgentConfig = AgentConfig()
    weapon: WeaponConfig = WeaponConfig()
    arena: ArenaConfig = ArenaConfig()
    opponent: OpponentConfig = OpponentConfig()


def config_path(base_dir: Path | None = None) -> Path:
    base = base_dir or Path.cwd()
    return base / CONFIG_DIR_NAME / CONFIG_FILE_NAME


def config_exists(base_dir: Path | None = None) -> bool:
    return config_path(base_dir).exists()


def ensure_config_dir(base_dir: Path | None = None) -> Path:
    path = config_path(base_dir)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def load_config(base_dir: Path | None = None) -> SimulationConfig:
    path = config_path(base_dir)
    if not path.exists():
        return SimulationConfig()

    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("Config file is not valid JSON") from exc

    if not isinstance(data, dict):
        raise ConfigError("Config file must contain a JSON object")
    return parse_config(data)


def parse_config(data: dict[str, Any]) -> SimulationConfig:
    try:
        return SimulationConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"Invalid config at `{location}`: {first['msg']}") from exc


def write_config(config: SimulationConfig, base_dir: Path | None = None) -> Path:
    path = ensure_config_dir(base_dir)
    payload = config.model_dump(mode="json", by_alias=True)
    path.write_text(json.dumps(payload, indent=2))
    return path


def update_config(update: dict[str, Any], base_dir: Path | None = None) -> SimulationConfig:
    current = load_config(base_dir).model_dump(mode="json", by_alias=True)
    config = parse_config(_merge_dicts(current, update))
    write_config(config, base_dir)
    return config


def _merge_dicts(base: dict[str, Any], update: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge_dicts(merged[key], value)
        else:
            merged[key] = value
    return merged
