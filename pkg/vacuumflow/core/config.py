"""
Core configuration module using Pydantic Settings.
Loads process-level settings from the environment (prefix ``VEL_``) and ``.env``.
"""
import logging

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="VEL_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    # Project Information
    PROJECT_NAME: str = "vacuumflow"
    VERSION: str = "1.0.0"

    # Sweep parallelism (0 = one worker per CPU)
    NUM_THREADS: int = Field(0, ge=0)

    # Logging
    LOG_LEVEL: str = "INFO"

    # Artifacts
    DEFAULT_OUTPUT_DIR: str = "results"

    # Exactness-class identity residuals above this fail verify-identities
    IDENTITY_TOLERANCE: float = Field(1e-10, gt=0)

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def normalise_log_level(cls, v: str) -> str:
        """Accept level names in any case, reject unknown ones."""
        if v is None or v == "":
            return "INFO"
        name = str(v).strip().upper()
        if not isinstance(logging.getLevelName(name), int):
            raise ValueError(f"unknown log level {v!r}")
        return name


# Global settings instance
settings = Settings()
