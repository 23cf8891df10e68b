"""
Runtime configuration.

Loads defaults from the environment (prefix DUALHAZE_) and an optional .env file
using pydantic-settings. The default seed used by the CLI comes from DUALHAZE_SEED.
"""

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide defaults shared by the library and the CLI."""

    PROJECT_NAME: str = "dualhaze"
    VERSION: str = "1.0.0"

    SEED: int = 0
    LOG_LEVEL: str = "WARNING"
    LOG_FILE: str | None = None

    EPS_FLOOR: float = 1.0 / 255.0
    T_MIN: float = 0.1
    CPSNR_CAP_DB: float = 99.0

    MAX_WORKERS: int = 4
    PNG_BITS: int = 8

    @field_validator("EPS_FLOOR")
    @classmethod
    def _floor_range(cls, v: float) -> float:
        if not 0.0 < v < 0.1:
            raise ValueError(f"EPS_FLOOR must lie in (0, 0.1), got {v}")
        return v

    @field_validator("T_MIN")
    @classmethod
    def _t_min_range(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"T_MIN must lie in (0, 1), got {v}")
        return v

    @field_validator("MAX_WORKERS")
    @classmethod
    def _workers_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("MAX_WORKERS must be >= 1")
        return v

    @field_validator("PNG_BITS")
    @classmethod
    def _png_bits(cls, v: int) -> int:
        if v not in (8, 16):
            raise ValueError("PNG_BITS must be 8 or 16")
        return v

    model_config = SettingsConfigDict(
        env_prefix="DUALHAZE_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()
