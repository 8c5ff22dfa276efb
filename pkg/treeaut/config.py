"""Configuration loading and dataclasses for treeaut."""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass
class EnumerationConfig:
    """Size caps for the exhaustive oracles."""
    rooted_cap: int = 16
    unrooted_cap: int = 14
    brute_force_rooted_cap: int = 10
    brute_force_unrooted_cap: int = 9
    exact_orbit_cap: int = 12


@dataclass
class SeriesConfig:
    """Default truncation orders for the generating-function solvers."""
    polya_order: int = 60
    labeled_order: int = 40
    labeled_j_max: int = 20
    class_order: int = 80
    rho_order: int = 120
    partition_cap: int = 60
    weighted_t_bound: float = 4.0
    tolerance: float = 1e-6


@dataclass
class SamplerConfig:
    """Sampler budgets and table sizes."""
    rejection_budget: int = 100000
    unrooted_budget_factor: int = 50
    polya_table_size: int = 2000


@dataclass
class ExperimentDefaults:
    """Defaults for the Monte-Carlo driver."""
    workers: int = 1
    chunk_size: int = 250
    audit_fraction: float = 0.01
    significance: float = 0.01


@dataclass
class LoggingConfig:
    """Logging settings."""
    log_target: str = "stderr"
    log_level: str = "INFO"


@dataclass
class Config:
    """Complete configuration."""
    enumeration: EnumerationConfig = field(default_factory=EnumerationConfig)
    series: SeriesConfig = field(default_factory=SeriesConfig)
    samplers: SamplerConfig = field(default_factory=SamplerConfig)
    experiments: ExperimentDefaults = field(default_factory=ExperimentDefaults)
    logging: LoggingConfig = field(default_factory=LoggingConfig)


# Environment variables overriding default truncation orders.
ENV_OVERRIDES = {
    "TREEAUT_POLYA_ORDER": "polya_order",
    "TREEAUT_LABELED_ORDER": "labeled_order",
    "TREEAUT_LABELED_JMAX": "labeled_j_max",
    "TREEAUT_CLASS_ORDER": "class_order",
    "TREEAUT_RHO_ORDER": "rho_order",
}


def _parse_enumeration(data: dict) -> EnumerationConfig:
    """Parse enumeration caps from YAML data."""
    return EnumerationConfig(
        rooted_cap=data.get("rooted_cap", 16),
        unrooted_cap=data.get("unrooted_cap", 14),
        brute_force_rooted_cap=data.get("brute_force_rooted_cap", 10),
        brute_force_unrooted_cap=data.get("brute_force_unrooted_cap", 9),
        exact_orbit_cap=data.get("exact_orbit_cap", 12),
    )


def _parse_series(data: dict) -> SeriesConfig:
    """Parse series truncation settings from YAML data."""
    return SeriesConfig(
        polya_order=data.get("polya_order", 60),
        labeled_order=data.get("labeled_order", 40),
        labeled_j_max=data.get("labeled_j_max", 20),
        class_order=data.get("class_order", 80),
        rho_order=data.get("rho_order", 120),
        partition_cap=data.get("partition_cap", 60),
        weighted_t_bound=data.get("weighted_t_bound", 4.0),
        tolerance=data.get("tolerance", 1e-6),
    )


def _parse_samplers(data: dict) -> SamplerConfig:
    """Parse sampler settings from YAML data."""
    return SamplerConfig(
        rejection_budget=data.get("rejection_budget", 100000),
        unrooted_budget_factor=data.get("unrooted_budget_factor", 50),
        polya_table_size=data.get("polya_table_size", 2000),
    )


def _parse_experiments(data: dict) -> ExperimentDefaults:
    """Parse Monte-Carlo defaults from YAML data."""
    return ExperimentDefaults(
        workers=data.get("workers", 1),
        chunk_size=data.get("chunk_size", 250),
        audit_fraction=data.get("audit_fraction", 0.01),
        significance=data.get("significance", 0.01),
    )


def _parse_logging(data: dict) -> LoggingConfig:
    """Parse logging settings from YAML data."""
    return LoggingConfig(
        log_target=data.get("log_target", "stderr"),
        log_level=data.get("log_level", "INFO"),
    )


def apply_env_overrides(config: Config, environ: Optional[dict] = None) -> Config:
    """
    Override default truncation orders from the environment.

    Args:
        config: Config to update in place.
        environ: Mapping to read from (defaults to os.environ).

    Returns:
        The same Config object.

    Raises:
        ConfigError: If a variable is set to something other than a positive integer.
    """
    environ = os.environ if environ is None else environ
    for var, attr in ENV_OVERRIDES.items():
        raw = environ.get(var)
        if raw is None:
            continue
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"{var} must be an integer, got {raw!r}")
        if value < 1:
            raise ConfigError(f"{var} must be positive, got {value}")
        setattr(config.series, attr, value)
        logger.info(f"{var} overrides series.{attr} = {value}")
    return config


def default_config() -> Config:
    """Built-in defaults with environment overrides applied."""
    return apply_env_overrides(Config())


def load_config(config_path: str = "config.yaml") -> Config:
    """
    Load configuration from a YAML file.

    Args:
        config_path: Path to the YAML config file.

    Returns:
        Config object with every section filled in.

    Raises:
        FileNotFoundError: If config file doesn't exist.
        yaml.YAMLError: If config file is invalid YAML.
    """
    path = Path(config_path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}

    config = Config(
        enumeration=_parse_enumeration(data.get("enumeration") or {}),
        series=_parse_series(data.get("series") or {}),
        samplers=_parse_samplers(data.get("samplers") or {}),
        experiments=_parse_experiments(data.get("experiments") or {}),
        logging=_parse_logging(data.get("logging") or {}),
    )
    logger.info(f"Loaded config from {config_path}")
    return apply_env_overrides(config)
