"""
Configuration Management for the Social Image Tournament Lab

Centralized runtime configuration using Pydantic V2 settings, plus the
numeric defaults shared by the solvers, the oracle and the simulator.

Runtime knobs (logging, worker count) may come from the environment or a
.env file. They never change numeric output: parameter documents and
experiment configs are only read from explicit paths given on the command line.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    """
    Application runtime configuration.

    Automatically loads from:
    1. Environment variables prefixed with TOURNEY_
    2. .env file in project root
    """

    # =========================================================================
    # Logging Configuration
    # =========================================================================
    log_level: str = "INFO"
    log_format: str = "text"  # "text" or "json"

    # =========================================================================
    # Execution Configuration
    # =========================================================================
    workers: int = 1  # process pool size for verify / simulate

    model_config = SettingsConfigDict(
        env_prefix="TOURNEY_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


# Global config instance
config = Config()


# =============================================================================
# Numeric defaults
# =============================================================================

DEFAULT_GRID_STEP = 1e-3
DEFAULT_TOL = 1e-9
DEFAULT_PERTURBATION = 1e-3
DEFAULT_MAX_ITER = 1000
DEDUP_TOL = 1e-12
ORACLE_DEDUP_TOL = 1e-7
MATCH_TOL = 1e-6

PROBABILITY_DECIMALS = 6

# Draw counts for the resampling win-probability estimator
WINPROB_CLI_DRAWS = 1_000_000
WINPROB_SIM_DRAWS = 100_000


def validate_config() -> bool:
    """
    Validate runtime configuration.

    Returns:
        bool: True if valid, raises ValueError otherwise
    """
    if config.log_format not in ("text", "json"):
        raise ValueError(
            f"TOURNEY_LOG_FORMAT must be 'text' or 'json', got {config.log_format!r}"
        )
    if config.workers < 1:
        raise ValueError(f"TOURNEY_WORKERS must be >= 1, got {config.workers}")
    return True
