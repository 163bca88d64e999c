"""Subrecursive laboratory: time-bounded halting probabilities on a frozen language."""
from subrecursive import heads  # noqa: F401  registers the reserved-head handlers
from subrecursive.errors import (
    CapacityError,
    ConfigError,
    DecodeError,
    DomainError,
    EncodingError,
    RecursionGuardError,
    SubrecursiveError,
)

__version__ = "0.1.0"
