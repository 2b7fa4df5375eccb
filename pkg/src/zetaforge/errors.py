"""Exception types shared by all modules."""


class ZetaforgeError(Exception):
    """Base class for computation errors raised by the toolkit."""


class DomainError(ZetaforgeError, ValueError):
    """An argument lies outside the supported domain."""


class PoleError(ZetaforgeError):
    """Evaluation was requested at (or too close to) a pole."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConvergenceError(ZetaforgeError):
    """A series, product or quadrature failed to reach the requested accuracy."""


class HypothesisError(ZetaforgeError):
    """A mathematical precondition of an identity is not satisfied."""


class ValidationError(ZetaforgeError, ValueError):
    """Malformed input data (file formats, invariants of domain types)."""
