"""
Application settings and engine defaults
"""
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Environment-driven settings (only the default output directory)"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore"
    )

    output_dir: Path = Field(default=Path("ccm_output"), validation_alias="CCM_OUTPUT_DIR")


class EngineDefaults(BaseModel):
    """Fixed tunables for the sampler engine and post-processing"""

    model_config = ConfigDict(frozen=True)

    # Sampler
    default_burnin: int = 100_000
    default_interval: int = 1000
    default_sample_size: int = 1000
    # Ensemble stage of a two-stage run; it starts from the diagnostic run's final state
    ensemble_burnin: int = 1
    progress_interval: int = 1_000_000
    recompute_interval: int = 1_000_000
    max_init_attempts: int = 200

    # Graph core: rejection sampling of non-edges below this density
    rejection_density_threshold: float = 0.9

    # Enumeration oracle
    max_enumeration_nodes: int = 7

    # Diagnostics
    kde_grid_points: int = 512

    # Posterior workflows
    fpc_floor: float = 1e-6


settings = Settings()
engine_defaults = EngineDefaults()
