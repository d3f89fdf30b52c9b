"""
Core configuration for machin-forge.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings

from machin_forge.models import OutputFormat
from machin_forge.numerics import PrecisionContext


class MachinConfig(BaseSettings):
    """
    Configuration for machin-forge.

    Supports loading from environment variables (``MACHIN_*``) and .env files.
    """

    # ==========================================================================
    # Precision
    # ==========================================================================

    precision_digits: int = Field(default=50, ge=1)
    guard_digits: int = Field(default=10, ge=0)
    max_floor_escalations: int = Field(default=4, ge=0, le=12)

    # ==========================================================================
    # Solver
    # ==========================================================================

    max_fixed_point_iterations: int = Field(default=64, ge=1)
    u2_materialize_cap: int = Field(default=24, ge=2)

    # ==========================================================================
    # Persistence
    # ==========================================================================

    sidecar_threshold_digits: int = Field(default=10**6, ge=1)
    out_path: Optional[Path] = Field(default=None)

    # ==========================================================================
    # Output & Display
    # ==========================================================================

    output_format: OutputFormat = Field(default=OutputFormat.TEXT)
    verbose: bool = Field(default=False)
    debug: bool = Field(default=False)

    class Config:
        env_prefix = "MACHIN_"
        env_file = ".env"
        extra = "ignore"

    @field_validator("out_path", mode="before")
    @classmethod
    def validate_path(cls, v):
        if isinstance(v, str):
            return Path(v) if v.strip() else None
        return v

    @field_validator("output_format", mode="before")
    @classmethod
    def validate_format(cls, v):
        if isinstance(v, str):
            try:
                return OutputFormat(v.strip().lower())
            except ValueError:
                available = ", ".join(f.value for f in OutputFormat)
                raise ValueError(f"Unknown output format '{v}'. Available: {available}")
        return v

    def precision_context(self) -> PrecisionContext:
        """The default context for library calls."""
        return PrecisionContext(digits=self.precision_digits, guard=self.guard_digits)


# =============================================================================
# Precision Presets
# =============================================================================

PRECISION_PRESETS: Dict[str, Dict[str, Any]] = {
    # Fast interactive checks
    "quick": {
        "precision_digits": 30,
        "guard_digits": 8,
        "max_floor_escalations": 2,
    },
    "standard": {
        "precision_digits": 50,
        "guard_digits": 10,
        "max_floor_escalations": 4,
    },
    # Headroom for the large-k tables and long digit runs
    "deep": {
        "precision_digits": 100,
        "guard_digits": 16,
        "max_floor_escalations": 6,
        "max_fixed_point_iterations": 128,
    },
}


def get_preset(name: str) -> Dict[str, Any]:
    """Get a precision preset configuration."""
    if name not in PRECISION_PRESETS:
        available = ", ".join(PRECISION_PRESETS.keys())
        raise ValueError(f"Unknown preset '{name}'. Available: {available}")
    return PRECISION_PRESETS[name].copy()


def load_config_file(path: Path) -> Dict[str, Any]:
    """Read a YAML mapping of config field names."""
    data = yaml.safe_load(Path(path).read_text()) or {}
    if not isinstance(data, dict):
        raise ValueError(f"Config file {path} must hold a mapping, got {type(data).__name__}")
    unknown = set(data) - set(MachinConfig.model_fields)
    if unknown:
        raise ValueError(f"Unknown config keys in {path}: {', '.join(sorted(unknown))}")
    return data


def build_config(
    preset: Optional[str] = None,
    cli_args: Optional[Dict[str, Any]] = None,
    config_file: Optional[Path] = None,
) -> MachinConfig:
    """
    Build configuration from multiple sources.

    Priority (highest to lowest):
    1. CLI arguments
    2. YAML config file
    3. Preset values
    4. Environment variables
    5. Defaults
    """
    config_dict: Dict[str, Any] = {}

    # Apply preset
    if preset:
        config_dict.update(get_preset(preset))

    if config_file:
        config_dict.update(load_config_file(config_file))

    # Override with CLI args
    if cli_args:
        config_dict.update({k: v for k, v in cli_args.items() if v is not None})

    return MachinConfig(**config_dict)
