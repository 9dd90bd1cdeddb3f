"""Exception types raised by the numerics, models and validation packages."""


class RTTError(Exception):
    """Root of all library errors."""


class DomainError(RTTError, ValueError):
    """Argument outside the domain of an operation."""


class BracketError(RTTError, ValueError):
    """Root-solve target not bracketed by f(lo), f(hi)."""


class SolverError(RTTError, RuntimeError):
    """Root solve found no sign change or failed to converge."""


class DegenerateSampleError(RTTError, ValueError):
    """Constant sample (S = 0) or all-zero error vector."""


class CapabilityError(RTTError, ValueError):
    """Exact computation requested beyond the supported size."""


class SpecError(RTTError, ValueError):
    """Invalid mixture specification."""


class InfeasibleLevelError(RTTError, ValueError):
    """No finite critical value exists at the requested level."""

    def __init__(self, message: str, minimum_level: float):
        super().__init__(message)
        self.minimum_level = minimum_level
