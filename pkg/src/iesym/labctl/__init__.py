"""Experiment orchestration: configs, sweeps, statistics and finite-size analysis."""

from iesym.labctl.analysis import CrossingReport, crossing_analysis, ensemble_stats, load_dataset, size_curves
from iesym.labctl.config import ConfigError, SweepConfig, dump_config, parse_config, validate
from iesym.labctl.sweep import CSV_COLUMNS, SCHEMA_VERSION, realization_seed, run_sweep, units
from iesym.scaling import CollapseFit, OutOfRange, Welford, data_collapse

__all__ = [
    "CSV_COLUMNS",
    "SCHEMA_VERSION",
    "CollapseFit",
    "ConfigError",
    "CrossingReport",
    "OutOfRange",
    "SweepConfig",
    "Welford",
    "crossing_analysis",
    "data_collapse",
    "dump_config",
    "ensemble_stats",
    "load_dataset",
    "parse_config",
    "realization_seed",
    "run_sweep",
    "size_curves",
    "units",
    "validate",
]
