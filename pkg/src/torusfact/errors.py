"""Exception hierarchy shared by all modules."""


class TorusFactError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(TorusFactError, ValueError):
    pass


class GridTooCoarse(TorusFactError):
    pass


class SpectrumViolation(TorusFactError):
    """Eigenvalues come within the margin of a branch cut or of zero."""

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class NoConvergence(TorusFactError):
    pass


class SingularSample(TorusFactError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NearSingular(TorusFactError):
    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class AmbiguousWinding(TorusFactError):
    pass


class NonzeroWinding(TorusFactError):
    pass


class PhaseJumpTooLarge(TorusFactError):
    pass


class IdenticallySingular(TorusFactError):
    pass


class UnstableSections(TorusFactError):
    pass


class NotUnitary(TorusFactError):
    pass


class NotNormalizedOnSubtorus(TorusFactError):
    pass


class NotOnSphere(TorusFactError):
    pass


class ApproximationTooCoarse(TorusFactError):
    pass


class Inconclusive(TorusFactError):
    pass


class DocumentError(TorusFactError, ValueError):
    """Malformed series document; carries a 1-based line/column when known."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)
        self.line = line
        self.column = column


class MalformedField(DocumentError):
    pass


class IndexArityMismatch(DocumentError):
    pass


class DuplicateTerm(DocumentError):
    pass
