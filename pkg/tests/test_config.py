import json

import pytest

from aimpilot.services.config import (
    ConfigError,
    SimulationConfig,
    config_path,
    load_config,
    parse_config,
    update_config,
    write_config,
)
from aimpilot.settings import Settings


class TestLoadConfig:
    def test_missing_file_gives_defaults(self, tmp_path):
        assert load_config(tmp_path) == SimulationConfig()

    def test_round_trip(self, tmp_path):
        path = write_config(SimulationConfig(), tmp_path)
        assert path == tmp_path / ".aimpilot" / "config.json"
        assert json.loads(path.read_text())["agent"]["lambda"] == 0.9
        assert load_config(tmp_path) == SimulationConfig()

    def test_invalid_json(self, tmp_path):
        path = config_path(tmp_path)
        path.parent.mkdir()
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(tmp_path)

    def test_non_object(self, tmp_path):
        path = config_path(tmp_path)
        path.parent.mkdir()
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(tmp_path)


class TestParseConfig:
    def test_partial_override(self):
        config = parse_config({"agent": {"alpha": 0.5}, "weapon": {"registration_delay": 2}})
        assert config.agent.alpha == 0.5
        assert config.agent.gamma == 0.5
        assert config.weapon.registration_delay == 2

    @pytest.mark.parametrize(
        ("data", "location"),
        [
            ({"agent": {"alpha": 1.5}}, "agent.alpha"),
            ({"agent": {"bogus": 1}}, "agent.bogus"),
            ({"codec": {"distance_edges": [500, 400, 1500]}}, "codec.distance_edges"),
            ({"grid": {"lateral_steps": 9}}, "grid.lateral_steps"),
            ({"opponent": {"speed_bands": [100, 220, 500]}}, "opponent.speed_bands"),
            ({"opponent": {"base_fire_probability": [0, 0, 2, 0, 0]}}, "opponent"),
            ({"arena": {"spawn_points": [[10, 10]]}}, "arena"),
        ],
    )
    def test_invalid_values_name_the_field(self, data, location):
        with pytest.raises(ConfigError, match=f"Invalid config at `{location}"):
            parse_config(data)

    def test_epsilon_floor_above_start(self):
        with pytest.raises(ConfigError):
            parse_config({"agent": {"epsilon_initial": 0.1, "epsilon_floor": 0.2}})


class TestUpdateConfig:
    def test_merges_nested_sections(self, tmp_path):
        write_config(parse_config({"agent": {"alpha": 0.4}}), tmp_path)
        config = update_config({"agent": {"gamma": 0.3}}, tmp_path)
        assert (config.agent.alpha, config.agent.gamma) == (0.4, 0.3)
        assert load_config(tmp_path) == config

    def test_invalid_update_leaves_file(self, tmp_path):
        path = write_config(SimulationConfig(), tmp_path)
        before = path.read_text()
        with pytest.raises(ConfigError):
            update_config({"weapon": {"bullets_per_tick": 0}}, tmp_path)
        assert path.read_text() == before


class TestSettings:
    def test_environment_override(self, monkeypatch, tmp_path):
        monkeypatch.setenv("AIMPILOT_OUTPUT_ROOT", str(tmp_path))
        monkeypatch.setenv("AIMPILOT_WORKERS", "2")
        settings = Settings()
        assert settings.output_root == tmp_path
        assert settings.workers == 2
        assert settings.listen == "127.0.0.1:7741"
