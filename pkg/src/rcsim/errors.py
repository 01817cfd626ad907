"""Exception types shared across the solvers."""


class RcsimError(Exception):
    """Base class for all rcsim errors."""


class ValidationError(RcsimError):
    """A configuration or argument failed validation."""


class DegeneracyError(RcsimError):
    """A uniqueness assumption failed (non-unique kernel, coefficient pole)."""


class ConvergenceError(RcsimError):
    """A truncation refinement loop exhausted its budget without converging."""


class CapacityError(RcsimError):
    """A requested hierarchy would exceed the configured memory budget."""


class IntegrationError(RcsimError):
    """Time integration failed; carries the time reached when it gave up."""

    def __init__(self, message, t_reached=None):
        super().__init__(message)
        self.t_reached = t_reached


class InvalidMomentsError(RcsimError):
    """Second moments violate the uncertainty relation beyond tolerance."""
