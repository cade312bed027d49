"""Exception hierarchy for the quantum-group engine."""


class QGroupError(Exception):
    """Base class for all engine errors."""


class CartanError(QGroupError, ValueError):
    """Unknown type label, rank out of range, or an invalid weight."""


class PrecisionError(QGroupError, ArithmeticError):
    """A rank decision fell between tol and sqrt(tol)."""


class SolveError(QGroupError, RuntimeError):
    """A graded triangular solve was inconsistent or not unique."""

    def __init__(self, message, grade=None, residual=None):
        super().__init__(message)
        self.grade = grade
        self.residual = residual


class DiagramError(QGroupError, ValueError):
    """Invalid Satake/Vogan data or a missing fixture."""


class ExtensionError(DiagramError):
    """The sign check failed; `k` is the violating vector."""

    def __init__(self, message, k=None):
        super().__init__(message)
        self.k = k


class ModuleMismatchError(QGroupError, ValueError):
    """Modules with different data or context, or a missing inner product."""


class TruncationError(QGroupError, OverflowError):
    """A coefficient product left the configured spectral window."""


class DocumentError(QGroupError, ValueError):
    """A JSON document is malformed, incomplete or of an unknown schema."""
