"""Shared exception types.

All errors raised by the library derive from EncostError so the CLI can map
them to exit codes uniformly. Argument/validation problems are ValueError
subclasses, so plain `except ValueError` also works.
"""

from __future__ import annotations


class EncostError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(EncostError, ValueError):
    """A field or argument violates its stated constraints."""


class DegenerateInputError(InvalidArgumentError):
    """An input is too small for the model convention (e.g. fewer than 2 rows)."""


class InsufficientDataError(InvalidArgumentError):
    """Too few measurement samples to fit parameters."""


class DegenerateFitError(EncostError, ValueError):
    """The regression design matrix is rank deficient."""


class MissingCoreCountError(InvalidArgumentError):
    """An operation needs a core count but the platform profile has none."""


class CacheGeometryError(InvalidArgumentError):
    """Cache geometry violates a model guard (e.g. cache smaller than line^2)."""


class UndefinedRatioError(InvalidArgumentError):
    """A span/work or energy ratio is undefined (zero denominator)."""


class TraceTooLargeError(InvalidArgumentError):
    """A generated trace would exceed the configured access cap."""


class UnknownNameError(EncostError, KeyError):
    """A platform, matrix or algorithm name did not resolve."""

    def __init__(self, kind: str, name: str, suggestions: list[str] | None = None):
        self.kind = kind
        self.name = name
        self.suggestions = suggestions or []
        msg = f"unknown {kind} {name!r}"
        if self.suggestions:
            msg += "; did you mean: " + ", ".join(self.suggestions)
        super().__init__(msg)

    def __str__(self) -> str:  # KeyError would repr() the message
        return self.args[0]


class CatalogFormatError(EncostError, ValueError):
    """A platform or matrix catalog file is malformed."""
