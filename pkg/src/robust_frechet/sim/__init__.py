"""Simulation harness: experiment configs, Monte-Carlo sweeps and the CLI."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .runner import HEADER, Task, cell_seed, read_results, sweep, tasks, trial_seed

__all__ = [
    "HEADER",
    "ConfigError",
    "ExperimentConfig",
    "Task",
    "cell_seed",
    "load_config",
    "parse_config",
    "read_results",
    "sweep",
    "tasks",
    "trial_seed",
]
