"""Exception hierarchy shared by every qwalk module."""


class QWalkError(Exception):
    """Base class for all qwalk errors."""


class ParseError(QWalkError, ValueError):
    """Malformed textual input (graph6, rotation systems, cycle notation).

    ``offset`` is the 0-based byte position of the offending character when
    it is known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ParameterError(QWalkError, ValueError):
    """An argument is outside the domain an operation supports."""


class PreconditionError(ParameterError):
    """A structural requirement on the input model is not met (regularity,
    double stochasticity, ...)."""


class CoinCompatibilityError(ParameterError):
    """The coin cannot define a walk for a rotation system."""


class InvalidOrdersError(ParameterError):
    """Linear orders that do not yield a permutation shift operator."""

    def __init__(self, vertex, label):
        super().__init__(
            f"label {label} is received twice at vertex {vertex}; "
            "orders do not define a shunt-decomposition"
        )
        self.vertex = vertex
        self.label = label


class InternalConsistencyError(QWalkError, RuntimeError):
    """Raised when a computed quantity violates an identity that must hold."""
