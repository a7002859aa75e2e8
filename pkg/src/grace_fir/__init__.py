"""Linear-phase low-pass FIR filters built from sampled Grace functions.

The taps are samples of G(x) = Gp(x, n) (1 - x^2)^(p - 1/2), an even
polynomial envelope whose transform has z = n - p vanishing even moments.
Optional compensation removes residual pass-band ripple by solving for a
small correction that restores the vanishing derivatives at f = 0.
"""

from .asymptotics import (
    DesignResult,
    DesignTargets,
    InfeasibleDesign,
    SeriesKind,
    cutoff_product,
    derivative_prediction,
    design_search,
    dirichlet_sum,
    limiting_mfr,
)
from .chebyshev import cheb_t, cheb_u_even, grace_poly
from .deripple import (
    CompensationReport,
    SVDNotConverged,
    auto_compensate,
    compensate,
    preconditioner_rows,
    svd_tall,
)
from .filter import (
    DegenerateResponse,
    FilterMetrics,
    FilterSpec,
    coefficients,
    cutoff_frequency,
    even_derivatives,
    measure_metrics,
    reference_frequency,
    response,
    response_derivative,
    ripple_scan,
)
from .grace import GraceParams, grace_fn, norm_a, norm_b, transform, transform_metrics

__version__ = "0.1.0"

__all__ = [
    "CompensationReport", "DegenerateResponse", "DesignResult", "DesignTargets",
    "FilterMetrics", "FilterSpec", "GraceParams", "InfeasibleDesign", "SVDNotConverged",
    "SeriesKind", "auto_compensate", "cheb_t", "cheb_u_even", "coefficients", "compensate",
    "cutoff_frequency", "cutoff_product", "derivative_prediction", "design_search",
    "dirichlet_sum", "even_derivatives", "grace_fn", "grace_poly", "limiting_mfr",
    "measure_metrics", "norm_a", "norm_b", "preconditioner_rows", "reference_frequency",
    "response", "response_derivative", "ripple_scan", "svd_tall", "transform",
    "transform_metrics",
]
