"""Utility modules"""

from .errors import (
    UsageError,
    RangeError,
    CapabilityError,
    SingularityError,
    SingularAnsatzError,
    ConvergenceError,
    StiffIntegrationError,
    QuadratureError,
    NoDriveError,
    ConfigError,
)
from .io import write_csv, write_json, meta_path

# config depends on src.protocols; import it as src.utils.config

__all__ = [
    "UsageError",
    "RangeError",
    "CapabilityError",
    "SingularityError",
    "SingularAnsatzError",
    "ConvergenceError",
    "StiffIntegrationError",
    "QuadratureError",
    "NoDriveError",
    "ConfigError",
    "write_csv",
    "write_json",
    "meta_path",
]
