"""Exception hierarchy shared by all modules."""


class GraphRigidityError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class GraphFormatError(GraphRigidityError):
    """Malformed graph text; carries the offending line number."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class NotConnectedError(GraphRigidityError):
    pass


class UnknownVertexError(GraphRigidityError, KeyError):
    pass


class UnknownEdgeError(GraphRigidityError, KeyError):
    pass


class SizeBoundError(GraphRigidityError):
    pass


class LemmaTreeError(GraphRigidityError):
    pass


class NotIrreducibleError(GraphRigidityError):
    pass


class ConvergenceError(GraphRigidityError):
    def __init__(self, message, residual):
        self.residual = residual
        super().__init__(f"{message} (last residual {residual:.3e})")


class BasisError(GraphRigidityError):
    pass


class HypothesisError(GraphRigidityError):
    pass


class DeckInconsistentError(GraphRigidityError):
    pass


class DSearchBoundError(GraphRigidityError):
    pass


class AmbiguousCardError(GraphRigidityError):
    def __init__(self, message, trace=None):
        self.trace = trace or []
        super().__init__(message)
