"""Exception and warning types raised by mixphase."""


class MixphaseError(Exception):
    """Base class for all library errors."""


class InvalidStateError(MixphaseError, ValueError):
    """Matrix or Bloch vector does not describe a qubit density operator."""


class InvalidParameterError(MixphaseError, ValueError):
    """Physical or numerical parameters outside the supported domain."""


class BundleUndefinedError(MixphaseError):
    """Uhlmann bundle quantity requested for a rank-deficient state."""


class UndefinedStateError(MixphaseError):
    """State requested at a gap-closing point where it is not defined."""


class UndefinedAngleError(MixphaseError):
    """Polar angle requested at (or across) the maximally mixed point."""


class UndefinedPhaseError(MixphaseError):
    """Geometric phase is undefined for the given curve."""


class NumericError(MixphaseError, ArithmeticError):
    """A numerical kernel failed to deliver a result within tolerance."""


class NonConvergenceError(NumericError):
    def __init__(self, message, worst_interval=None, estimate=None):
        super().__init__(message)
        self.worst_interval = worst_interval
        self.estimate = estimate


class BracketError(NumericError):
    """The supplied bracket does not contain a sign change."""


class UndersampledError(NumericError):
    """Adjacent angle samples are too far apart to unwrap unambiguously."""


class DegenerateNodeWarning(UserWarning):
    """A zero of the holonomy trace without a sign change was found."""
