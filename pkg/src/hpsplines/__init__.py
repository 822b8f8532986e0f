"""Penalized smoothing with hyperbolic-polynomial B-splines.

Fits curves that behave like exponentials where the data does: the basis is
built from exponential kernels, and the roughness penalty is an exponential
second difference whose kernel contains the damped family
``exp(-alpha*x)``, ``x*exp(-alpha*x)``. Data from that family is returned
exactly at any penalty weight, classical cubic P-splines are the
``alpha = 0`` special case, and two damped moments of the data are conserved
by every fit.
"""

from ._backend import BACKEND_NAME
from .basis import (
    BandedCollocation,
    HBBasis,
    KnotGrid,
    build_hb_spline,
    build_knot_grid,
    collocation_matrix,
    reproduction_coefficients,
)
from .errors import (
    DegenerateDFError,
    DiscrepancyRangeError,
    DomainError,
    QuadratureAccuracyError,
    ReproductionCheckError,
    SingularSystemError,
)
from .fitting import (
    Diagnostics,
    FitProblem,
    FitReport,
    HPSplineModel,
    SymmetricBanded,
    assemble_system,
    default_knot_count,
    exponential_moments,
    fit,
    fit_report,
    relative_residual,
    solve_spd_banded,
)
from .penalty import PenaltyOperator
from .piecewise import ExpoTerm, PiecewiseExpo, convolve, first_order_kernel
from .selection import (
    LambdaSearchSpec,
    SelectionResult,
    default_lambda_grid,
    effective_df,
    gcv_score,
    select_lambda,
)

__version__ = '0.1.0'

__all__ = [
    'BACKEND_NAME',
    'BandedCollocation',
    'DegenerateDFError',
    'Diagnostics',
    'DiscrepancyRangeError',
    'DomainError',
    'ExpoTerm',
    'FitProblem',
    'FitReport',
    'HBBasis',
    'HPSplineModel',
    'KnotGrid',
    'LambdaSearchSpec',
    'PenaltyOperator',
    'PiecewiseExpo',
    'QuadratureAccuracyError',
    'ReproductionCheckError',
    'SelectionResult',
    'SingularSystemError',
    'SymmetricBanded',
    'assemble_system',
    'build_hb_spline',
    'build_knot_grid',
    'collocation_matrix',
    'convolve',
    'default_knot_count',
    'default_lambda_grid',
    'effective_df',
    'exponential_moments',
    'first_order_kernel',
    'fit',
    'fit_report',
    'gcv_score',
    'relative_residual',
    'reproduction_coefficients',
    'select_lambda',
    'solve_spd_banded',
    '__version__',
]
