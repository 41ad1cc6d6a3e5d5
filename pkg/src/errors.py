"""
Error hierarchy shared by every module.

The CLI maps ValidationError to exit status 2 and NumericalFailure to 3.
"""

from __future__ import annotations


class LabError(Exception):
    """Base class for all lp-lab errors."""


class ValidationError(LabError, ValueError):
    """Bad parameters or a violated precondition."""


class AliasingError(ValidationError):
    """Sample grid too small for the frequency support."""


class CoverageError(ValidationError):
    """Frequency support not covered by the sequence prefix."""

    def __init__(self, message: str, required_term: int):
        super().__init__(message)
        self.required_term = required_term


class ConfigError(ValidationError):
    """Invalid config file or command-line flags."""


class NumericalFailure(LabError):
    """Non-finite measurement or a violated postcondition."""

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}
