"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class GPTError(Exception):
    """Base class for all errors raised by this package."""


class LinalgError(GPTError, ValueError):
    """Malformed input to a linear-algebra routine."""


class DomainError(GPTError, ValueError):
    """A request that is meaningless for the given model or state."""


class DecompositionError(DomainError):
    """No classical decomposition exists (or none can be constructed)."""


class NotSelfDualError(DomainError):
    """The model carries no self-dualizing inner product."""


class InvalidMeasurementError(DomainError):
    """Effects, frames or projectors fail their defining conditions."""
