"""Exception types shared across the package."""


class SieveError(Exception):
    """Base class for all package-specific errors."""


class DistributionError(SieveError, ValueError):
    """Invalid law specification or parameters."""


class Unclassifiable(SieveError):
    """Tail metadata matches none of the five convergence regimes."""


class RegimeMismatch(SieveError):
    """Operation called on a spec whose regime does not support it."""


class QuadratureFailure(SieveError):
    """Adaptive integration failed to meet tolerance on a finite-moment law."""


class SolverFailure(SieveError):
    """Root finding for the scaling sequence did not converge."""


class InversionFailure(SieveError):
    """Characteristic-function inversion missed its error target."""


class KindMismatch(SieveError, TypeError):
    """Limit-law kind does not support the requested comparison."""


class BinomialCapExceeded(SieveError, OverflowError):
    """Sample size exceeds the exact-binomial cap of 10**15."""
