"""Exception types shared across the package."""


class DomainError(ValueError):
    """A site lies outside the interval covered by the spline basis."""


class SingularSystemError(ArithmeticError):
    """The normal-equation matrix is not positive definite.

    Attributes
    ----------
    index : int
        Index of the first non-positive pivot met during factorization.
    """

    def __init__(self, index, message=None):
        self.index = index
        if message is None:
            message = (
                f'non-positive pivot at index {index}; the system is singular '
                'or indefinite. Increase lambda, add data sites, or reduce the '
                'number of knots.'
            )
        super().__init__(message)


class QuadratureAccuracyError(RuntimeError):
    """Adaptive quadrature exhausted its recursion depth before converging."""


class ReproductionCheckError(RuntimeError):
    """Computed reproduction coefficients failed their residual certification.

    Signals an inconsistency in the basis construction, not bad user input.
    """


class DegenerateDFError(ArithmeticError):
    """GCV denominator is non-positive: the model has as many effective
    degrees of freedom as there are data points."""


class DiscrepancyRangeError(RuntimeError):
    """No lambda on the search grid reaches the target residual level.

    Attributes
    ----------
    rss_min, rss_max : float
        Range of residual sums of squares seen over the grid.
    """

    def __init__(self, rss_min, rss_max, target):
        self.rss_min = rss_min
        self.rss_max = rss_max
        self.target = target
        super().__init__(
            f'discrepancy level {target!r} is not reached on the grid: '
            f'RSS ranges over [{rss_min!r}, {rss_max!r}]'
        )
