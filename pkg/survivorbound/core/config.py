"""Application settings loaded from environment / .env via pydantic-settings."""

from __future__ import annotations

from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict

from survivorbound.models.enums import OutputFormat


class Settings(BaseSettings):
    """Central configuration for survivorbound.

    Only the default output format is environment-driven; statistical
    defaults live on ``RunConfig`` so a stray variable cannot change results.
    """

    model_config = SettingsConfigDict(
        env_prefix="SURVIVORBOUND_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # ── Rendering ───────────────────────────────────────────────────────
    output_format: OutputFormat = OutputFormat.MARKDOWN


@lru_cache
def get_settings() -> Settings:
    """Return a cached singleton of application settings."""
    return Settings()
