from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Application
    APP_NAME: str = "Residual-Permuted Sums"
    VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Randomisation
    DEFAULT_SEED: int = 0

    # Work pool
    THREADS: int = 1

    # Numerics
    LMI_TOL: float = 1e-9
    EVAL_CHUNK: int = 4096

    # Grids
    GRID_RESOLUTION: int = 200
    GRID_HALFWIDTH_SD: float = 4.0

    # Output
    OUTPUT_DIR: Path = Path("out")

    model_config = SettingsConfigDict(
        env_file=".env", env_prefix="RPS_", case_sensitive=True, extra="ignore"
    )


settings = Settings()
