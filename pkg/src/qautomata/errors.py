"""Exception hierarchy shared by every module of the package."""


class QAutomataError(Exception):
    """Base class for all errors raised by qautomata."""


class ShapeError(QAutomataError, ValueError):
    """A matrix or vector has the wrong shape for the requested operation."""


class AlphabetError(QAutomataError, ValueError):
    """A word uses a symbol outside the machine's alphabet, or alphabets disagree."""


class InvariantError(QAutomataError, ValueError):
    """A value violates a structural invariant (norm, unitarity, orthonormality...)."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ModeError(QAutomataError):
    """An operation was applied to a machine of the wrong mode (unitary vs generalized)."""


class SearchBoundError(QAutomataError):
    """A bounded search gave up before finding an answer."""


class OracleScaleError(QAutomataError):
    """A brute-force oracle was asked to enumerate too many objects."""


class UnsupportedGrammarError(QAutomataError):
    """A grammar has infinitely many derivations for some word (or the series diverges)."""


class GrammarFormError(QAutomataError):
    """A grammar is not in the normal form an operation requires."""


class DivergenceError(QAutomataError):
    """Unit-production amplitudes sum to a divergent series, (1 - M) is singular."""


class SchemaError(QAutomataError, ValueError):
    """A machine file does not follow the interchange schema; ``path`` is a JSON pointer."""

    def __init__(self, message, path=""):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path
