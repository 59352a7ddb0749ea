"""Exception types raised by the solvers."""


class DomainError(ValueError):
    """An argument lies outside the domain of a closed-form function."""


class BranchError(ValueError):
    """A solver was called on a parameter branch where its equation has no root."""


class ExistenceError(ValueError):
    """The threshold system has no solution for the given payoffs."""


class UnsupportedConfiguration(ValueError):
    """Payoffs satisfy neither payoff symmetry nor the no-risky-option condition."""


class CaseMismatch(ValueError):
    """Thresholds belong to a different regime than the one requested."""


class RegionError(ValueError):
    """A point lies in the stopping region where a continuation-only check was requested."""


class ConvergenceError(RuntimeError):
    """Root-finding did not converge.

    ``state`` carries the last bracket and residuals for diagnosis.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state or {}
