"""Exception types raised by the library."""


class GhzError(ValueError):
    """Base class for all errors raised by ghz_entanglement."""


class NegativeProbability(GhzError):
    pass


class NotNormalized(GhzError):
    pass


class NotPositiveSemidefinite(GhzError):
    pass


class DomainError(GhzError):
    pass


class InvalidKappa(GhzError):
    pass


class PreconditionViolated(GhzError):
    pass


class NoValidRoot(GhzError):
    pass


class ConvergenceFailure(RuntimeError):
    """An iterative solver did not reach its stated tolerance.

    ``best`` carries the best iterate found (if any) and ``residual`` a
    solver-specific diagnostic.
    """

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class SupportMismatch(GhzError):
    """Relative entropy diverges: some p_k > 0 where q_k = 0."""
