"""
Configuration management for the stochastic contraction toolkit
Author: Jay Guwalani
"""

import os
import logging
from pathlib import Path
from typing import Dict, Any, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).parent / "presets"


class Config:
    """Environment-driven runtime configuration"""

    def __init__(self, env_file: Optional[str] = None):
        load_dotenv(env_file, override=False)
        self.app_config = self._load_app_config()
        self.sim_config = self._load_sim_config()
        self._validate_config()

    def _load_app_config(self) -> Dict[str, Any]:
        """Load application configuration"""
        return {
            "log_level": os.getenv("LOG_LEVEL", "INFO"),
            "log_dir": os.getenv("LOG_DIR", "logs"),
            "log_to_file": os.getenv("STOCON_LOG_TO_FILE", "False").lower() == "true",
        }

    def _load_sim_config(self) -> Dict[str, Any]:
        """Load simulation engine configuration.

        ``batch_size`` and ``noise_chunk`` fix the reduction order of every
        ensemble, so changing them changes the last bits of the statistics.
        ``threads`` only changes wall-clock time.
        """
        return {
            "threads": int(os.getenv("STOCON_THREADS", str(os.cpu_count() or 1))),
            "batch_size": int(os.getenv("STOCON_BATCH_SIZE", "1024")),
            "noise_chunk": int(os.getenv("STOCON_NOISE_CHUNK", "1000")),
        }

    def _validate_config(self):
        """Validate configuration completeness and correctness"""
        for key in ("threads", "batch_size", "noise_chunk"):
            if self.sim_config[key] < 1:
                raise ValueError(f"{key} must be a positive integer, got {self.sim_config[key]}")
        logger.debug("Configuration validation passed")

    @property
    def threads(self) -> int:
        return self.sim_config["threads"]

    @property
    def batch_size(self) -> int:
        return self.sim_config["batch_size"]

    @property
    def noise_chunk(self) -> int:
        return self.sim_config["noise_chunk"]

    def preset_path(self, name: str) -> Path:
        """Resolve a shipped preset name (e.g. ``paper-fig1``) to its YAML file"""
        return PRESET_DIR / f"{name}.yaml"
