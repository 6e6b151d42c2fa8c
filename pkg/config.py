"""
Configuration Management for the Photon-Triggered QPT Engine

This module handles loading and validating configuration from environment variables.
Values set here are defaults only; every CLI flag and library argument overrides them.
"""

import os
from typing import List
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator


class ConfigError(Exception):
    """Custom exception for configuration errors."""
    pass


# Load environment variables from .env file
load_dotenv()


class BaseConfig(BaseModel):
    """Engine-wide numerical and output settings."""

    # Model defaults
    omega_c: float = Field(
        default=1.0,
        description="Ancillary-mode frequency; only shifts energies through C_n"
    )

    # Numerical tolerances
    classification_tol: float = Field(
        default=1e-10,
        description="Relative tolerance used to label a point Critical"
    )

    divergence_guard: float = Field(
        default=1e-12,
        description="Smallest lower excitation energy accepted before Bogoliubov data diverge"
    )

    contour_level: float = Field(
        default=1e-6,
        description="Order-parameter level marking the normal/superradiant boundary"
    )

    # Output
    float_digits: int = Field(
        default=12,
        description="Significant digits for floats in CSV tables"
    )

    output_dir: str = Field(
        default="outputs",
        description="Default directory for sweep and figure datasets"
    )

    # Execution
    max_workers: int = Field(
        default=1,
        description="Thread pool size for sweeps (1 runs serially)"
    )

    ed_frame: str = Field(
        default="dressed",
        description="Frame used for exact diagonalization: dressed or bare"
    )

    fig5_n_values: List[int] = Field(
        default=[4, 10, 40, 100],
        description="Spin counts used by the finite-N figure presets"
    )

    log_level: str = Field(
        default="WARNING",
        description="Logging level for the CLI"
    )

    @field_validator("omega_c")
    @classmethod
    def validate_omega_c(cls, v: float) -> float:
        """Ancilla frequency must be non-negative."""
        if v < 0:
            raise ValueError(f"omega_c must be >= 0, got {v}")
        return v

    @field_validator("classification_tol", "divergence_guard", "contour_level")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Tolerances must be strictly positive."""
        if v <= 0:
            raise ValueError(f"Tolerance must be > 0, got {v}")
        return v

    @field_validator("float_digits", "max_workers")
    @classmethod
    def validate_positive_int(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"Value must be >= 1, got {v}")
        return v

    @field_validator("ed_frame")
    @classmethod
    def validate_frame(cls, v: str) -> str:
        """Validate exact-diagonalization frame."""
        valid_frames = ["dressed", "bare"]
        if v not in valid_frames:
            raise ValueError(f"Invalid ED frame: {v}. Must be one of {valid_frames}")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR"]
        level = v.upper()
        if level not in valid_levels:
            raise ValueError(f"Invalid log level: {v}. Must be one of {valid_levels}")
        return level


def _parse_int_list(raw: str) -> List[int]:
    return [int(item) for item in raw.split(",") if item.strip()]


def get_config() -> BaseConfig:
    """
    Build the configuration from environment variables.

    Returns:
        Validated BaseConfig instance

    Raises:
        ConfigError: If an environment variable holds an invalid value
    """
    try:
        return BaseConfig(
            omega_c=float(os.getenv("PHOTON_QPT_OMEGA_C", "1.0")),
            classification_tol=float(os.getenv("PHOTON_QPT_CLASSIFICATION_TOL", "1e-10")),
            divergence_guard=float(os.getenv("PHOTON_QPT_DIVERGENCE_GUARD", "1e-12")),
            contour_level=float(os.getenv("PHOTON_QPT_CONTOUR_LEVEL", "1e-6")),
            float_digits=int(os.getenv("PHOTON_QPT_FLOAT_DIGITS", "12")),
            output_dir=os.getenv("PHOTON_QPT_OUTPUT_DIR", "outputs"),
            max_workers=int(os.getenv("PHOTON_QPT_MAX_WORKERS", "1")),
            ed_frame=os.getenv("PHOTON_QPT_ED_FRAME", "dressed"),
            fig5_n_values=_parse_int_list(os.getenv("PHOTON_QPT_FIG5_N_VALUES", "4,10,40,100")),
            log_level=os.getenv("PHOTON_QPT_LOG_LEVEL", "WARNING"),
        )
    except (ValueError, ValidationError) as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


# Export configuration instance
config = get_config()
