"""Exception hierarchy shared by all modules."""


class DelayedHedgeError(Exception):
    """Base class for all library errors."""


class DomainError(DelayedHedgeError):
    """Input violates a model invariant (bad delay, non-positive volatility, ...)."""


class SizeError(DelayedHedgeError):
    """Problem size exceeds what an exhaustive check can handle."""


class LengthMismatch(DelayedHedgeError):
    """Path or batch length does not match the market's step count."""


class SingularMatrix(DelayedHedgeError):
    """Matrix is singular or too ill-conditioned for a dense oracle."""


class NumericalError(DelayedHedgeError):
    """A quantity that theory guarantees (real root, SPD covariance) failed numerically."""


class IntegrabilityError(DelayedHedgeError):
    """The Gaussian expectation of exp(-V) diverges for this quadratic form."""


class OptimizerFailure(DelayedHedgeError):
    """Derivative-free search did not converge within its budget."""
