from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="AIMPILOT_", env_file=".env", extra="ignore")

    output_root: Path = Path("runs")
    listen: str = "127.0.0.1:7741"
    log_level: str = "INFO"
    workers: int | None = None


@lru_cache
def get_settings() -> Settings:
    load_dotenv()
    return Settings()
