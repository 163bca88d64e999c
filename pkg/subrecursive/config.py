import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

import yaml

from subrecursive.errors import ConfigError

DEFAULTS_PATH = Path(__file__).with_name("defaults.yaml")
CONFIG_ENV = "SUBRECURSIVE_CONFIG"
CACHE_ENV = "SUBRECURSIVE_CACHE"
FORMATS = ("text", "csv", "json")


@dataclass(frozen=True)
class ExperimentConfig:
    time_fn: str
    horizon: int
    diagonal_horizon: int
    witness_horizon: int
    dominance_horizon: int
    capacity: int
    workers: int
    cache: str
    format: str
    guard: int | None
    log_level: str
    progress: bool

    def validate(self):
        """Raise ConfigError when the settings are inconsistent."""
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        for name in ("horizon", "diagonal_horizon", "witness_horizon", "dominance_horizon"):
            value = getattr(self, name)
            if value < 0:
                raise ConfigError(f"{name} must be nonnegative, got {value}")
            if value > self.capacity:
                raise ConfigError(f"{name} {value} exceeds capacity {self.capacity}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}, expected one of {FORMATS}")
        if self.guard is not None and not 0 <= self.guard <= self.capacity:
            raise ConfigError(f"guard must lie in [0, {self.capacity}], got {self.guard}")
        return self

    @property
    def effective_guard(self):
        return self.horizon if self.guard is None else self.guard

    def with_overrides(self, **overrides):
        """Return a copy with every non-None override applied, validated."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes).validate()


def _read_yaml(path):
    try:
        with open(path, "r") as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"malformed config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return data


def load_config(path=None):
    """Load the packaged defaults, then a user file, then the environment.

    Args:
        path: Optional user YAML. Falls back to $SUBRECURSIVE_CONFIG.

    Returns:
        A validated ExperimentConfig.
    """
    data = _read_yaml(DEFAULTS_PATH)
    user_path = path or os.environ.get(CONFIG_ENV)
    if user_path:
        data.update(_read_yaml(user_path))
    if os.environ.get(CACHE_ENV):
        data["cache"] = os.environ[CACHE_ENV]
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        config = ExperimentConfig(**data)
    except TypeError as e:
        raise ConfigError(f"incomplete config: {e}") from e
    return config.validate()


# Largest program size any enumeration may reach in this process.
_capacity = None


def get_capacity():
    global _capacity
    if _capacity is None:
        _capacity = int(_read_yaml(DEFAULTS_PATH)["capacity"])
    return _capacity


def set_capacity(value):
    global _capacity
    if value < 0:
        raise ConfigError(f"capacity must be nonnegative, got {value}")
    _capacity = int(value)
