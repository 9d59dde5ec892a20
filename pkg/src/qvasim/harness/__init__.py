from .config import ConfigError, ExperimentConfig, config_hash, load_config, seed_for
from .runner import ExperimentRecord, HybridRecord, run_experiment
from .summary import emit_plot_data, summarise

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentRecord",
    "HybridRecord",
    "config_hash",
    "emit_plot_data",
    "load_config",
    "run_experiment",
    "seed_for",
    "summarise",
]
