"""Exception types shared across the package."""

from __future__ import annotations


class DimensionMismatchError(ValueError):
    """Operands live in different ambient spaces F_2^n."""


class CapacityError(ValueError):
    """Requested object exceeds the dense-table / enumeration capacity caps."""


class NormalizationError(ValueError):
    """A mass table is not a probability distribution within tolerance."""


class EmptySupportError(ValueError):
    """A distribution or set with empty support was requested."""


class ConditioningError(ValueError):
    """Conditioning on an event of probability zero."""


class ValidationError(ValueError):
    """Serialized payload failed structural validation on read."""


class SearchFailureError(RuntimeError):
    """A subspace search ended without a qualifying subspace."""


class HypothesisViolationError(RuntimeError):
    """A lemma's hypothesis failed; carries the measured gaps.

    ``gaps`` is a list of (name, lhs, rhs) triples where lhs > rhs + tol.
    """

    def __init__(self, message: str, gaps: list[tuple[str, float, float]] | None = None):
        super().__init__(message)
        self.gaps = gaps or []


class PipelineError(RuntimeError):
    """The structure pipeline could not make progress (caps exhausted, etc.)."""
