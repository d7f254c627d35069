"""Exception types shared across the package."""


class SparseHinfError(Exception):
    """Base class for all package errors."""


class DimensionError(SparseHinfError):
    """Matrix dimensions are mutually inconsistent."""


class DomainError(SparseHinfError):
    """Continuous/discrete domain mismatch or wrong domain for an operation."""


class NumericFailure(SparseHinfError):
    """A numerical backend broke down (overflow, solver failure, ...)."""


class UnstableSystemError(SparseHinfError):
    """Operation requires a stable system (the H-infinity norm is infinite)."""


class InfeasibleRelaxation(SparseHinfError):
    """The jointly-affine relaxation is certified infeasible at the given bound."""


class NoConvergence(SparseHinfError):
    """The alternation exhausted its iteration budget without a certificate.

    Carries the best iterate found for diagnostics.
    """

    def __init__(self, message, gain=None, lyapunov=None, min_eig=None, trace=None):
        super().__init__(message)
        self.gain = gain
        self.lyapunov = lyapunov
        self.min_eig = min_eig
        self.trace = trace
