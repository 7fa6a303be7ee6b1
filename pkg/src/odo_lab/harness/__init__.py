"""Experiment harness and ``odo-lab`` command line."""

from .config import ConfigError, ExperimentConfig, load_config, parse_text
from .experiments import (
    MetricsRow,
    run_exploit,
    run_gen,
    run_ksweep,
    run_race,
    run_solve,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "MetricsRow",
    "load_config",
    "parse_text",
    "run_exploit",
    "run_gen",
    "run_ksweep",
    "run_race",
    "run_solve",
]
