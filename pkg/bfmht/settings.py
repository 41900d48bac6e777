# -*- coding: utf-8 -*-
"""
Runtime configuration using Pydantic Settings.

Values come from (lowest to highest priority) the field defaults below, a
``.env`` file, ``BFMHT_*`` environment variables and an optional YAML file
named by ``BFMHT_EXTRA_CONFIG``.
"""

from __future__ import annotations

import logging
import os
import sys
from pathlib import Path
from typing import Optional

import yaml
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


def _available_parallelism() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


class Settings(BaseSettings):
    """
    Base configuration.
    """

    model_config = SettingsConfigDict(
        env_prefix="BFMHT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    ENV: str = "dev"
    DEBUG: bool = False
    TESTING: bool = False

    PROJECT_ROOT: Path = Path(__file__).parent.parent.absolute()

    # Logging
    LOG_LEVEL: int = logging.INFO

    # Parallel regions (within-level compressions, sweeps, Fiedler siblings)
    THREADS: int = _available_parallelism()

    # Reproducibility
    SEED: int = 0

    # Factorization
    EPS: float = 1e-3
    FREQ_LEAF_SIZE: int = 64
    SPACE_LEAF_SIZE: int = 256

    # Eigen-solvers
    DENSE_EIGEN_THRESHOLD: int = 256
    LANCZOS_TOL: float = 1e-10
    LANCZOS_MAX_ITER: Optional[int] = None

    # Heat-kernel graphs
    HEAT_KERNEL_THRESHOLD: float = 1e-4

    # Extra config file
    EXTRA_CONFIG: Optional[str] = None

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        if self.EXTRA_CONFIG:
            self._load_extra_config()

    def _load_extra_config(self):
        """Load additional configuration from YAML file."""
        if self.EXTRA_CONFIG and os.path.exists(self.EXTRA_CONFIG):
            with open(self.EXTRA_CONFIG) as f:
                extra_conf = yaml.safe_load(f) or {}
            for key, value in extra_conf.items():
                if key in type(self).model_fields:
                    setattr(self, key, value)
                    logger.debug(f"Setting {key} to {value}")
                else:
                    logger.warning(f"Key '{key}' not a valid setting")


class DevSettings(Settings):
    """
    Development configuration.
    """

    ENV: str = "dev"


class TestSettings(Settings):
    """
    Test configuration: single-threaded and with the block-error assertion on.
    """

    ENV: str = "test"
    DEBUG: bool = True
    TESTING: bool = True
    THREADS: int = 1
    LOG_LEVEL: int = logging.DEBUG

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        print(" * Environment: test", file=sys.stderr)


def get_settings() -> Settings:
    """
    Get settings based on environment variables.
    """
    env = os.environ.get("BFMHT_ENV", "dev").lower()
    if env == "test" or os.environ.get("BFMHT_TESTING", "").lower() in ("true", "1"):
        return TestSettings()
    return DevSettings()
