"""Exception hierarchy for tarskicert.

Everything raised on purpose derives from TarskicertError so CLI code can
catch one type and map it to exit code 1. Exceptions that carry a
counterexample keep it on the instance (``witness``) so callers can turn a
failure into a certificate instead of a stack trace.
"""

from __future__ import annotations


class TarskicertError(Exception):
    """Base class for all library errors."""


class AlphabetMismatch(TarskicertError):
    """Two objects built over different free-group alphabets were combined."""


class BudgetExceeded(TarskicertError):
    """A search exceeded its vertex / word / time budget before resolving."""


class FiniteIndexError(TarskicertError):
    """An operation that needs finite index was given an infinite-index subgroup."""


class NoPassingIndex(TarskicertError):
    """A scan over candidate indices exhausted its range without a PASS."""


class GreedyStuck(TarskicertError):
    """The greedy sparse spanning construction ran out of legal moves."""


class FreenessViolation(TarskicertError):
    """An action expected to be free had a fixed point.

    witness is (vertex, word): the word fixes the vertex.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class UnresolvedTranslate(TarskicertError):
    """A translate left the computed window, so a set check cannot be decided."""


class NonEquivariantMap(TarskicertError):
    """A claimed equivariant map failed the edge-compatibility check.

    witness is (vertex, letter): the square that does not commute.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InvariantViolation(TarskicertError):
    """An internal structural invariant failed; indicates a construction bug."""


class ShapeError(TarskicertError):
    """Input data has the wrong shape for the requested construction."""


class NotFound(TarskicertError):
    """A bounded search finished without finding the requested object."""
