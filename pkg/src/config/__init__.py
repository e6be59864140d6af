"""Configuration package for the stochastic contraction toolkit"""

from .config import Config, PRESET_DIR
from .experiment import ExperimentConfig, load_experiment, default_experiment
from .logging_config import setup_logger, get_logger, PerformanceLogger

__all__ = [
    "Config",
    "PRESET_DIR",
    "ExperimentConfig",
    "load_experiment",
    "default_experiment",
    "setup_logger",
    "get_logger",
    "PerformanceLogger",
]
