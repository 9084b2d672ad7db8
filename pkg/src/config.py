"""Configuration loader for Leafbound.

Loads configuration from YAML file with environment variable substitution.
Every setting has a default, so the CLI runs without any file at all.
"""

import os
import re
import logging
from dataclasses import dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Default config file locations (in order of priority)
CONFIG_PATHS = [
    "leafbound.local.yaml",  # Local overrides (not in git)
    "leafbound.yaml",        # Default config
]

OUTPUT_FORMATS = ("text", "json")


@dataclass
class AnalysisConfig:
    """Knobs for the randomized parts of the pipeline.

    Attributes:
        seed: Default seed when --seed is not given
        coordinate_attempts: Coordinate changes tried before giving up
        coefficient_bound: Entries of random coordinate changes lie in [-b, b]
        polar_attempts: Reseeds allowed for the two general polars
        line_attempts: Reseeds allowed for the tangency line
        tangency_lines: Lines checked per foliation in the corpus suite
        leaf_random_combinations: Random nullspace combinations tried per degree
        random_coefficient_bound: Range of those random coefficients over Q
    """
    seed: int = 0
    coordinate_attempts: int = 20
    coefficient_bound: int = 3
    polar_attempts: int = 20
    line_attempts: int = 20
    tangency_lines: int = 5
    leaf_random_combinations: int = 50
    random_coefficient_bound: int = 1000


@dataclass
class OracleConfig:
    """Macaulay oracle configuration."""
    default_bound: int = 8


@dataclass
class CorpusConfig:
    """Built-in corpus configuration."""
    expected_file: str = "data/corpus_expected.yaml"
    # Worker processes for `corpus run` (1 = sequential)
    workers: int = 1
    random_prime: int = 32003
    random_degrees: List[int] = field(default_factory=lambda: [3, 4, 5, 6])


@dataclass
class OutputConfig:
    """Report rendering."""
    format: str = "text"


@dataclass
class LoggingConfig:
    """Logging configuration."""
    level: str = "INFO"
    file: str = ""
    max_size_mb: int = 10
    backup_count: int = 5


@dataclass
class Config:
    """Root of the settings tree; one attribute per YAML section."""
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    corpus: CorpusConfig = field(default_factory=CorpusConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    # Internal: base path for resolving relative paths
    _base_path: Path = field(default_factory=Path.cwd)

    def resolve_path(self, path: str) -> Path:
        """Resolve a path relative to the config file location."""
        p = Path(path)
        if p.is_absolute():
            return p
        return self._base_path / p


_ENV_REFERENCE = re.compile(r"\$\{([^}]+)\}")


def _expand_env(text: str) -> str:
    def lookup(match):
        name = match.group(1)
        if name not in os.environ:
            logger.warning(f"Environment variable {name} not set")
        return os.environ.get(name, "")

    return _ENV_REFERENCE.sub(lookup, text)


def _substitute_env_vars(value: Any) -> Any:
    """Expand ${VAR} references in every string of a parsed YAML tree."""
    if isinstance(value, str):
        return _expand_env(value)
    if isinstance(value, dict):
        return {key: _substitute_env_vars(item) for key, item in value.items()}
    if isinstance(value, list):
        return [_substitute_env_vars(item) for item in value]
    return value


def _coerce(section: str, name: str, expected: Any, value: Any) -> Any:
    """Convert substituted strings back to the int a field expects."""
    if expected is int and isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            raise ValueError(f"{section}.{name} must be an integer, got {value!r}")
    return value


def _dict_to_dataclass(cls, data: Optional[Dict[str, Any]]):
    """Build a config section (recursively) from its YAML mapping.

    Private fields are never read from the file; unknown keys are logged
    and dropped.
    """
    data = data or {}
    if not isinstance(data, dict):
        raise ValueError(f"{cls.__name__} expects a mapping, got {type(data).__name__}")

    known = {f.name: f.type for f in fields(cls) if not f.name.startswith("_")}
    kwargs = {}
    for name, value in data.items():
        if name not in known:
            continue
        expected = known[name]
        if is_dataclass(expected):
            kwargs[name] = _dict_to_dataclass(expected, value)
        else:
            kwargs[name] = _coerce(cls.__name__, name, expected, value)

    unknown = sorted(set(data) - set(known))
    if unknown:
        logger.warning(f"Ignoring unknown {cls.__name__} keys: {', '.join(unknown)}")
    return cls(**kwargs)


def _apply_env_overrides(config_data: Dict[str, Any]) -> None:
    """Apply LEAFBOUND_* environment overrides in place."""
    overrides = [
        ("LEAFBOUND_SEED", "analysis", "seed", int),
        ("LEAFBOUND_WORKERS", "corpus", "workers", int),
        ("LEAFBOUND_LOG_LEVEL", "logging", "level", str),
    ]
    for env_name, section, key, convert in overrides:
        raw = os.environ.get(env_name, "")
        if not raw:
            continue
        try:
            value = convert(raw)
        except ValueError:
            logger.warning(f"Ignoring {env_name}={raw!r}: not a valid {convert.__name__}")
            continue
        config_data.setdefault(section, {})
        if config_data[section] is None:
            config_data[section] = {}
        config_data[section][key] = value
        logger.info(f"{env_name} overrides {section}.{key}")


def load_config(config_path: Optional[str] = None, base_path: Optional[Path] = None) -> Config:
    """Load configuration from YAML file.

    Args:
        config_path: Path to config file. If None, searches default locations.
        base_path: Base path for resolving relative paths. Defaults to cwd.

    Returns:
        Config object with all settings loaded. Defaults when no file is found
        and none was requested.

    Raises:
        FileNotFoundError: If an explicitly requested config file is missing
        yaml.YAMLError: If config file is invalid YAML
        ValueError: If settings are invalid
    """
    base = Path(base_path or Path.cwd())

    # Load .env file if present
    env_path = base / ".env"
    if env_path.exists():
        load_dotenv(env_path)
        logger.debug(f"Loaded environment from {env_path}")

    if config_path:
        config_file = Path(config_path)
        if not config_file.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")
    else:
        config_file = None
        for path in CONFIG_PATHS:
            candidate = base / path
            if candidate.exists():
                config_file = candidate
                break

    if config_file is None:
        logger.debug(f"No config file found (searched: {', '.join(CONFIG_PATHS)}), using defaults")
        raw_config = {}
    else:
        logger.info(f"Loading config from {config_file}")
        with open(config_file, 'r') as f:
            raw_config = yaml.safe_load(f)

    if raw_config is None:
        raw_config = {}

    config_data = _substitute_env_vars(raw_config)
    _apply_env_overrides(config_data)

    config = _dict_to_dataclass(Config, config_data)
    config._base_path = config_file.parent if config_file else base

    _validate_config(config)

    return config


def _validate_config(config: Config) -> None:
    """Validate configuration settings.

    Args:
        config: Config object to validate

    Raises:
        ValueError: If settings are invalid beyond repair
    """
    errors = []
    analysis = config.analysis

    if analysis.seed < 0:
        errors.append("analysis.seed must be non-negative")

    for name in ("coordinate_attempts", "polar_attempts", "line_attempts", "tangency_lines"):
        if getattr(analysis, name) < 1:
            logger.warning(f"analysis.{name} must be at least 1, using 1")
            setattr(analysis, name, 1)

    if analysis.coefficient_bound < 1:
        logger.warning("analysis.coefficient_bound must be at least 1, using 1")
        analysis.coefficient_bound = 1

    if analysis.leaf_random_combinations < 0:
        logger.warning("analysis.leaf_random_combinations must be non-negative, using 0")
        analysis.leaf_random_combinations = 0

    if analysis.random_coefficient_bound < 1:
        logger.warning("analysis.random_coefficient_bound must be at least 1, using 1")
        analysis.random_coefficient_bound = 1

    if config.oracle.default_bound < 1:
        errors.append("oracle.default_bound must be positive")

    if config.corpus.workers < 1:
        logger.warning("corpus.workers must be at least 1, using 1")
        config.corpus.workers = 1

    from sympy import isprime
    if not isprime(config.corpus.random_prime):
        errors.append(f"corpus.random_prime must be prime, got {config.corpus.random_prime}")

    if any(d < 1 for d in config.corpus.random_degrees):
        errors.append("corpus.random_degrees must be positive")

    if config.output.format not in OUTPUT_FORMATS:
        logger.warning(f"output.format must be one of {OUTPUT_FORMATS}, using text")
        config.output.format = "text"

    if errors:
        raise ValueError("Configuration errors:\n  " + "\n  ".join(errors))
