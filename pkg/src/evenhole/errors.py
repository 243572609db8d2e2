"""Exceptions shared across modules."""

from __future__ import annotations


class EvenholeError(Exception):
    """Base class for package-specific failures."""


class OverBudgetError(EvenholeError):
    """An exact oracle or exhaustive search refused an input over its size budget."""


class OutOfClassError(EvenholeError):
    """Input graph is not a connected even-hole-free graph without star cutset."""

    def __init__(self, reason: str, witness=None):
        super().__init__(reason)
        self.reason = reason
        self.witness = witness


class DecompositionError(EvenholeError):
    """2-join decomposition failed (no extreme non-crossing split found)."""


class SearchBudgetExceeded(EvenholeError):
    """The 2-join branch-and-propagate search hit its node budget."""


class OrderConstructionError(EvenholeError):
    """Nice elimination order construction failed a structural assumption."""


class ComposeError(EvenholeError):
    """Invalid composition recipe (parity, completeness, or flatness violated)."""


class GraphFormatError(EvenholeError):
    """Malformed graph file."""
