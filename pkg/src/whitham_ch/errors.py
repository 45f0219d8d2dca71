"""Exception hierarchy shared by all modules.

Exit-code mapping lives in the CLI: invalid inputs (DomainError,
InvalidCurveError) map to 2, numerical failures (ConsistencyError,
NumericalError) to 3.
"""


class WhithamChError(Exception):
    """Base class for all package errors."""


class DomainError(WhithamChError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class InvalidCurveError(WhithamChError, ValueError):
    """Curve parameters violate an ordering/positivity invariant.

    The message names the violated invariant.
    """


class ConsistencyError(WhithamChError, RuntimeError):
    """Two independent computation routes disagree beyond tolerance."""

    def __init__(self, check: str, residual: float, tol: float):
        self.check = check
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(
            f"consistency check '{check}' failed: residual {residual:.6e} "
            f"exceeds tolerance {tol:.1e}"
        )


class NumericalError(WhithamChError, RuntimeError):
    """A numerical procedure failed to converge; carries the achieved error."""

    def __init__(self, message: str, achieved: float | None = None):
        self.achieved = achieved
        if achieved is not None:
            message = f"{message} (achieved error estimate {achieved:.3e})"
        super().__init__(message)
