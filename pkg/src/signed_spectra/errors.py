"""Exception types shared across the package."""


class SignedSpectraError(Exception):
    """Base class for all computation failures raised by this package."""


class EdgeListError(SignedSpectraError):
    """Malformed or inconsistent edge-list input."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EigenConvergenceError(SignedSpectraError):
    """Eigensolver failed to reach the requested residual tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class PerronCheckError(SignedSpectraError):
    """A block does not have a real, simple, positive dominant eigenpair."""


class KMeansError(SignedSpectraError):
    """k-means cannot run on the given inputs (e.g. k exceeds distinct points)."""


class SingularOperatorError(SignedSpectraError):
    """A resolvent solve hit a (near-)singular operator."""


class GenerationError(SignedSpectraError):
    """Synthetic graph generation could not satisfy its constraints."""
