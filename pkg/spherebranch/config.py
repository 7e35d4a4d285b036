"""
Configuration management for spherebranch.
"""

import logging
import os
from pathlib import Path
from typing import Optional

import yaml
from dotenv import load_dotenv

from .core.errors import SchemaError
from .log import LEVELS

# Load environment variables
load_dotenv()

# Base paths
BASE_DIR = Path(__file__).parent.parent
CONFIG_DIR = BASE_DIR / "config"
RUNS_DIR = BASE_DIR / "runs"

logger = logging.getLogger("Config")


def load_config(config_path: Optional[Path] = None) -> dict:
    """
    Load configuration from YAML file.

    Priority:
    1. Provided config_path
    2. $SPHEREBRANCH_CONFIG
    3. config/config.yaml
    4. config/config.yaml.example (fallback)
    """
    if config_path is None:
        env_path = os.getenv("SPHEREBRANCH_CONFIG")
        config_path = Path(env_path) if env_path else CONFIG_DIR / "config.yaml"

        if not config_path.exists():
            config_path = CONFIG_DIR / "config.yaml.example"

    if not config_path.exists():
        logger.info("No config file found at %s, using defaults", config_path)
        return apply_env_overrides(get_default_config())

    logger.info("Found config at: %s", config_path)
    with open(config_path, "r", encoding="utf-8") as f:
        loaded = yaml.safe_load(f) or {}

    # Missing sections and keys fall back to defaults
    config = get_default_config()
    for section, values in loaded.items():
        if isinstance(values, dict) and isinstance(config.get(section), dict):
            config[section].update(values)
        else:
            config[section] = values

    # Resolve relative paths to absolute
    if "paths" in config:
        for key, value in config["paths"].items():
            p = Path(value)
            if not p.is_absolute():
                config["paths"][key] = str(BASE_DIR / value)

    # Override with environment variables
    config = apply_env_overrides(config)

    return config


def apply_env_overrides(config: dict) -> dict:
    """Apply environment variable overrides to config."""

    if os.getenv("SPHEREBRANCH_LOG"):
        config.setdefault("logging", {})
        level = os.getenv("SPHEREBRANCH_LOG").strip().lower()
        if level not in LEVELS:
            logger.warning("Unknown SPHEREBRANCH_LOG=%r, falling back to info", level)
            level = "info"
        config["logging"]["level"] = level

    if os.getenv("SPHEREBRANCH_THREADS"):
        config.setdefault("runtime", {})
        try:
            config["runtime"]["threads"] = int(os.getenv("SPHEREBRANCH_THREADS"))
        except ValueError as e:
            raise SchemaError(
                f"SPHEREBRANCH_THREADS must be an integer, got {os.getenv('SPHEREBRANCH_THREADS')!r}",
                "runtime.threads",
            ) from e

    if os.getenv("SPHEREBRANCH_OUT"):
        config.setdefault("paths", {})
        config["paths"]["output"] = os.getenv("SPHEREBRANCH_OUT")

    return config


def get_default_config() -> dict:
    """Return the built-in defaults (every tolerance the library uses)."""
    return {
        "tolerances": {
            "unit_norm": 1e-10,
            "singular_rel": 1e-12,
            "rank_rel": 1e-8,
            "condition_ceiling": 1e12,
            "kernel_residual": 1e-8,
            "injectivity": 1e-10,
            "h3_angle": 1e-6,
            "cluster_radius": 1e-6,
        },
        "spectral": {
            "scan_low": -64.0,
            "scan_high": 64.0,
            "scan_count": 257,
            "resolvent_samples": 64,
        },
        "degree": {
            "global_sign": 1,
            "epsilon_divisor": 10.0,
            "max_halvings": 40,
        },
        "continuation": {
            "initial_step": 1e-2,
            "min_step": 1e-8,
            "max_step": 0.1,
            "shrink": 0.5,
            "grow": 1.3,
            "grow_after": 4,
            "newton_max_iter": 12,
            "newton_tol": 1e-12,
            "accept_tol": 1e-9,
            "bound": 10.0,
            "max_steps": 5000,
            "trivial_s_tol": 1e-7,
            "eigensphere_tol": 1e-6,
            "loop_tol": 1e-6,
            "grid_density": 8,
            "ladder_start": 1e-2,
            "ladder_levels": 6,
        },
        "eigenpairs": {
            "grid_s": 121,
            "grid_lambda": 181,
            "zero_tol": 1e-12,
            "line_fraction": 0.95,
            "refine_factor": 4,
            "refinements": 2,
        },
        "runtime": {
            "threads": 1,
            "seed": 0,
        },
        "logging": {
            "level": "error",
        },
        "paths": {
            "output": str(RUNS_DIR),
        },
    }


# Singleton config instance
_config: Optional[dict] = None


def get_config() -> dict:
    """Get or load configuration (singleton pattern)."""
    global _config
    if _config is None:
        _config = load_config()
    return _config


def reset_config() -> None:
    """Forget the loaded configuration; the next get_config() reloads it."""
    global _config
    _config = None


def get_settings():
    """Validated view of the configuration."""
    from .models import ToolSettings

    return ToolSettings.model_validate(get_config())
