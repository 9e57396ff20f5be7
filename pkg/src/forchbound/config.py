# forchbound/config.py
from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="FORCHBOUND_", env_file=".env", env_file_encoding="utf-8"
    )

    # Logging
    log_level: str = "INFO"

    # Grid budget
    max_cells: int = 2_000_000

    # Root solver for s(x, xi)
    root_tol: float = 1e-14
    root_max_iter: int = 200

    # Infinite products in the Moser chain
    product_truncation: float = 1e-14
    product_max_terms: int = 100_000

    # Quadrature
    divergence_floor: float = 1e-300

    # Inequality harness
    pass_tolerance: float = 1e-6
    safety_factor: float = 2.0

    # Paths
    output_dir: Path = Path("out")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
