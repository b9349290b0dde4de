"""Exception types shared across the toolkit."""


class KreissError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(KreissError):
    """Input matrix is not square or has inconsistent dimensions."""


class FactorizationError(KreissError):
    """A dense factorization (Schur, exponential scaling, solver) failed."""


class SingularPointError(KreissError):
    """Evaluation point is numerically on the spectrum."""


class BoundaryError(KreissError):
    """Solver precondition violated: spectrum touches the stability boundary.

    Raised by the Lyapunov/Stein solvers when the spectral abscissa (radius)
    is not strictly inside the stable region, i.e. no strict certificate of
    that form exists.
    """


class NotUnitTriangularError(KreissError):
    """Matrix is not unit upper triangular within tolerance."""


class ConfigurationError(KreissError):
    """A runtime configuration is inconsistent (e.g. contour hits spectrum)."""


class MatrixMarketError(KreissError):
    """Matrix Market parse failure, with a 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
