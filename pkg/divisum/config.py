import json
from typing import List, Optional  # noqa: UP035

from pydantic_settings import BaseSettings, SettingsConfigDict


def _parse_weights(value: Optional[str] | None) -> List[int]:
    """Parse WEIGHTS from environment.

    Accepts JSON list like '[12, 24]' or comma-separated string like '12,16,24'.
    Returns a list of weights.
    """
    if not value:
        return []
    value = value.strip()
    # Try JSON first
    if value.startswith("["):
        try:
            parsed = json.loads(value)
            if isinstance(parsed, list):
                return [int(x) for x in parsed]
        except Exception:
            pass
    # Fallback comma-separated
    return [int(x.strip()) for x in value.split(",") if x.strip()]


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="DIVISUM_",
        env_file=".env",
        env_ignore_empty=True,
        extra="ignore",
    )

    PROJECT_NAME: str = "divisum"
    VERSION: str = "0.1.0"

    PRECISION_BITS: int = 256
    BASE_N: int = 20000
    LEVELS: int = 6
    EXTRAP_TERMS: int = 4
    REL_TOL: float = 1e-6
    JOBS: int = 1

    OUTPUT_FORMAT: str = "json"
    CACHE_DIR: str = "./.divisum-cache"
    LOG_LEVEL: str = "WARNING"

    # Weights warmed by `cache warm` when none are given
    WEIGHTS: Optional[str] = "12,16,18,20,22,24,26"

    @property
    def weights(self) -> List[int]:
        return _parse_weights(self.WEIGHTS)


settings = Settings()
