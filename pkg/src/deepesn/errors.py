"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class ConvergenceError(RuntimeError):
    """An iterative estimator hit its iteration cap.

    ``estimate`` holds the last value reached before giving up.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class DegenerateSystemError(ArithmeticError):
    """Every Gram eigenvalue fell under the pseudoinverse cutoff."""


class IllConditionedError(ArithmeticError):
    """Smallest singular value is below the rank-deficiency floor."""

    def __init__(self, message, sigma_max):
        super().__init__(message)
        self.sigma_max = sigma_max


class DivergenceError(RuntimeError):
    """LMS training blew up; carries the loss trace and the last weights."""

    def __init__(self, message, trace, weights):
        super().__init__(message)
        self.trace = trace
        self.weights = weights
