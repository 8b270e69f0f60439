"""Shared exception types.

The CLI maps these onto its documented exit codes: ValidationError -> 3,
MissingArtifactError -> 2.
"""


class SuppTopicsError(Exception):
    """Base class for all package errors."""


class ValidationError(SuppTopicsError):
    """Bad input data, config, or file content."""


class MissingArtifactError(SuppTopicsError):
    """A pipeline stage's required upstream artifact does not exist."""
