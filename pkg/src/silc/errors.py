"""Exception types raised across the package."""


class SilcError(Exception):
    """Base class for package errors."""


class DimensionMismatch(SilcError, ValueError):
    pass


class NoRelativeDegree(SilcError):
    """No nonzero Markov parameter found up to the search limit."""


class NotConverged(SilcError):
    """Iterative estimate did not settle; ``estimate`` holds the last value."""

    def __init__(self, max_iter, estimate):
        super().__init__(f"not converged after {max_iter} iterations (last estimate {estimate!r})")
        self.max_iter = max_iter
        self.estimate = estimate


class InvalidLambda(SilcError, ValueError):
    pass


class NonFiniteIterate(SilcError):
    """An outer-loop input went non-finite; ``records`` holds the trials run so far."""

    def __init__(self, k, records):
        super().__init__(f"non-finite input at trial {k}")
        self.k = k
        self.records = records


class NonFiniteState(SilcError):
    """Plant simulation blew up."""


class ConfigError(SilcError, ValueError):
    pass
