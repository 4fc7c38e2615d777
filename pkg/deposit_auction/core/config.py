"""Application configuration using Pydantic Settings."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="DEPOSIT_AUCTION_",
        case_sensitive=False,
        extra="ignore",
    )

    # Application Settings
    app_name: str = Field(default="Deposit Auction Toolkit", description="Application name")
    debug: bool = Field(default=False, description="Debug mode")
    log_level: str = Field(default="WARNING", description="Logging level")
    log_json: bool = Field(default=False, description="Emit log records as JSON")

    # Worker Settings
    max_workers: int = Field(default=4, ge=1, description="Maximum number of worker threads")

    # Solver Settings
    ode_step: float = Field(default=1e-4, gt=0, description="Fixed RK4 step for deposit ODEs")
    dbar: float = Field(default=4.0, ge=1.0, description="Maximum deposit a bidder can make")

    # Verification Settings
    eps: float = Field(default=1e-3, gt=0, description="Deviation gain tolerance in payoff units")
    type_grid: int = Field(default=50, ge=2, description="Bidder types scanned per check")
    dev_grid: int = Field(default=200, ge=16, description="Deviation grid size per type")
    deposit_grid: int = Field(default=20, ge=2, description="Observed deposits checked for bidder 2")

    # Output Settings
    curve_points: int = Field(default=1001, ge=2, description="Grid points in emitted curves")
    float_digits: int = Field(default=9, ge=1, description="Significant digits in outputs")

    # Monte Carlo Settings
    mc_block_size: int = Field(default=65536, ge=1, description="Draws per seeded block")


# Global settings instance
settings = Settings()
