"""Exception types shared across the package."""


class QvoteError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(QvoteError):
    """Operands have incompatible dimensions or an index is out of range."""


class ArityError(ShapeError):
    """An operation received the wrong number of operands."""


class CapacityError(QvoteError):
    """A result would exceed the configured qubit cap."""


class ValidationError(QvoteError):
    """A value violates a structural invariant (hermiticity, unitarity, ...)."""


class NormalizationError(ValidationError):
    """A state vector or weight list is not normalized."""


class DomainError(QvoteError):
    """A scalar argument lies outside its allowed range."""


class ConfigError(QvoteError):
    """An election configuration is malformed or inconsistent."""


class EvaluationError(QvoteError):
    """A formula cannot be evaluated against the given ballots."""


class ProtocolError(QvoteError):
    """A protocol step received an impossible input."""


class NumericalCorruptionError(QvoteError):
    """Numerical noise exceeded the corruption threshold; results are untrusted."""
