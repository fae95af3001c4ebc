"""Exception types shared across the package.

Each class maps to one failure mode of the pipeline; the CLI translates
them into its exit-code contract (see cli.py) and the HTTP service into
status codes (see service.py).
"""


class FrontspeedError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(FrontspeedError):
    """Problem configuration failed to parse or validate."""


class MeshTooCoarse(FrontspeedError):
    """Grid spacing violates the nonnegative-off-diagonal condition
    spacing <= 2 / max|2*lambda*e + q|; the Perron structure of the
    stencil is lost and the eigensolver refuses to run."""


class NoConvergence(FrontspeedError):
    """Eigensolver exceeded its iteration budget."""


class AssumptionViolated(FrontspeedError):
    """A standing assumption of the analysis fails (e.g. k(0) <= 0)."""


class BracketNotFound(FrontspeedError):
    """No interior minimum of k(lambda)/lambda inside the search window."""


class SpeedBelowLinear(FrontspeedError):
    """Requested speed c does not exceed the linear speed c0."""


class TailNotResolved(FrontspeedError):
    """Candidate profile rectangle does not reach the required tail level."""


class Instability(FrontspeedError):
    """Time stepper produced values far outside [0, 1]."""


class FrontHitBoundary(FrontspeedError):
    """Tracked level set came too close to the truncated domain edge."""


class FitRejected(FrontspeedError):
    """Least-squares speed fit failed the r-squared acceptance bar."""


class BracketInvalid(FrontspeedError):
    """Both endpoints of a speed bracket classify identically."""
