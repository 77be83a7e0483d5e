"""Range search over metric spaces with hyperbolic and Hilbert hyperplane exclusion."""

from .errors import (
    CalibrationError,
    ConfigurationError,
    DegenerateSpaceError,
    HilbexError,
    InputError,
    ParseError,
    VerificationError,
)
from .index import COVER_ONLY, HILBERT, HYPERBOLIC, ExclusionStrategy, build_ght, build_mht, linear_scan, range_query
from .metrics import MetricDescriptor, get_metric

__version__ = "0.1.0"

__all__ = [
    "COVER_ONLY",
    "HILBERT",
    "HYPERBOLIC",
    "CalibrationError",
    "ConfigurationError",
    "DegenerateSpaceError",
    "ExclusionStrategy",
    "HilbexError",
    "InputError",
    "MetricDescriptor",
    "ParseError",
    "VerificationError",
    "build_ght",
    "build_mht",
    "get_metric",
    "linear_scan",
    "range_query",
]
