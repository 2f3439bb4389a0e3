"""Self-test battery behind the validate subcommand."""

from src.validation.base import CheckResult, PropertyCheck, ValidationSuite
from src.validation.checks import default_checks

__all__ = [
    "CheckResult",
    "PropertyCheck",
    "ValidationSuite",
    "default_checks",
]
