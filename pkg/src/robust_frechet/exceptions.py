"""Exception hierarchy shared by all modules."""


class FrechetError(Exception):
    """Base class for errors raised by this package."""


class InvalidArgumentError(FrechetError, ValueError):
    """An argument is outside its documented domain."""


class CapabilityError(FrechetError, NotImplementedError):
    """The metric space does not provide the requested operation."""


class DegenerateInputError(FrechetError, ValueError):
    """Inputs make a quantity ill-defined (e.g. division by a vanishing distance)."""


class HypothesisViolationError(FrechetError, ValueError):
    """The supplied parameters violate an assumption of a bound."""


class ConvergenceError(FrechetError, RuntimeError):
    """An iterative solver stopped before meeting its stopping rule.

    The best iterate found so far is kept on ``result`` (an
    ``EstimatorResult`` or a solver-specific payload) together with the final
    ``residual``.
    """

    def __init__(self, message, result=None, residual=None):
        super().__init__(message)
        self.result = result
        self.residual = residual
