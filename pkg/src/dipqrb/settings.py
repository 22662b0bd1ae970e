"""Application settings.

Centralized configuration loaded from environment variables
(prefix ``DIPQRB_``) and an optional ``.env`` file.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Toolkit settings loaded from environment."""

    model_config = SettingsConfigDict(
        env_prefix="DIPQRB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Application
    app_name: str = "DIPQRB"
    version: str = "0.1.0"
    log_level: str = "INFO"

    # NPA relaxation
    npa_level: int = 1
    npa_extras: list[str] = ["AC", "AE", "CE", "AB"]
    npa_elastic_penalty: float = 1e4  # Price of behavior-constraint slacks

    # SDP solver
    sdp_gap_tol: float = 1e-8
    sdp_feas_tol: float = 1e-8
    sdp_max_iter: int = 200
    sdp_step_fraction: float = 0.98

    # Beacon server
    host: str = "127.0.0.1"
    port: int = 7455
    ack_every: int = 1024  # Client ACK cadence (rounds)
    connect_attempts: int = 5
    connect_base_delay: float = 0.2

    # Certification
    scan_workers: int = 1
    no_signalling_tol: float = 1e-6

    # Extraction
    security_exponent: int = 32


settings = Settings()
