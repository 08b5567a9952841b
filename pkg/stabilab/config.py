"""
Configuration settings for the laboratory
"""
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="STABILAB_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # App settings
    app_name: str = "stabilab"
    app_version: str = "1.0.0"
    log_level: str = "INFO"

    # Solvers
    riccati_tol: float = 1e-10
    riccati_max_iter: int = 1_000_000
    unit_root_tol: float = 1e-12
    identification_max_condition: float = 1e12

    # Runs
    default_seed: int = 0
    output_dir: str = "out"
    summary_digits: int = 4
    min_rule_observations: int = 8

    # Canonical forward-looking model
    stackelberg_delta: float = 0.99
    stackelberg_kappa: float = 1.0
    stackelberg_b: float = -1.0
    stackelberg_rho: float = 0.8
    stackelberg_horizon: int = 200
    stackelberg_loss_tol: float = 1e-8
    stackelberg_max_horizon: int = 25_600


@lru_cache()
def get_settings() -> Settings:
    return Settings()
