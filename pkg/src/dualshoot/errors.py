"""Exception hierarchy shared by all dualshoot modules."""


class DualshootError(Exception):
    """Base class for all library errors."""


class ModelError(DualshootError):
    """Invalid model configuration (inadmissible exponents, bad family, ...)."""


class ConditionNotMet(ModelError):
    """A sampled growth/structure condition failed for the configured model.

    Signals a misconfigured model rather than a program bug.
    """

    def __init__(self, item: str, message: str = ""):
        self.item = item
        super().__init__(f"condition check failed: {item}" + (f" ({message})" if message else ""))


class TNotFound(ModelError):
    """No potential-well crossing found below the scan cutoff."""


class SolverError(DualshootError):
    """Radial solver failure."""


class BracketNotFound(SolverError):
    """Shooting scan found no undershoot/overshoot sign change."""


class ToleranceNotReached(SolverError):
    """Bisection or root refinement stopped before the requested tolerance."""


class StepSizeUnderflow(SolverError):
    """Adaptive integrator step size collapsed (stiffness or blow-up)."""


class NonFiniteState(SolverError):
    """Integration state became NaN or infinite."""


class InsufficientPoints(DualshootError):
    """Not enough branch points in the requested regime for the analysis."""


class NoRootInBranch(DualshootError):
    """Prescribed mass not attained on the traced branch.

    Carries the classifier verdict so callers can distinguish expected
    nonexistence from a sweep that is too narrow.
    """

    def __init__(self, c: float, verdict: str, message: str = ""):
        self.c = c
        self.verdict = verdict
        super().__init__(message or f"no root with mass c={c:g} in traced branch: {verdict}")


class PointFailed(SolverError):
    """A branch grid point failed after warm- and cold-start attempts."""

    def __init__(self, lam: float, cause: Exception):
        self.lam = lam
        self.cause = cause
        super().__init__(f"branch point at lambda={lam:g} failed: {cause}")


class UsageError(DualshootError):
    """Command-line usage error (maps to exit code 64)."""
