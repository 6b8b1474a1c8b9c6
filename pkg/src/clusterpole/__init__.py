"""Rational approximation with exponentially clustered poles.

Subpackages cover clustered pole generation (uniform and square-root
tapered), closed-form and fitted rational approximants of functions with an
endpoint singularity, potential-theory diagnostics for interpolation
configurations, tanh / tanh-sinh quadrature with its contour-integral error
certificate, and a minimal lightning Laplace solver on polygons.
"""

from ._backend import BACKEND
from .core import (
    ErrorCurve,
    GradedGrid,
    RateFit,
    build_graded_grid,
    fit_grid,
    fit_rate,
    report_grid,
    sup_error,
    write_csv,
)
from .clustering import (
    ClusteredPoleSet,
    TaperDiagnostic,
    analyze_taper,
    lightning_poles,
    tapered_poles,
    uniform_poles,
)
from .approximants import (
    NewmanForm,
    NodePoleInterpolant,
    PoleResidue,
    RationalApproximant,
    evaluate,
    newman,
    stenger_interpolant,
    trapezoidal_sqrt,
    trapezoidal_sqrt_direct,
)
from .fitting import (
    FitProblem,
    FitResult,
    equioscillation_count,
    lawson_minimax_fit,
    least_squares_fit,
)
from .potential import (
    PointConfiguration,
    StripModel,
    discrete_potential,
    hermite_error_bound_l1,
    phi,
    predict_rates,
    strip_density,
    strip_potential_bilinear,
    strip_potential_exact,
    tau,
)
from .quadrature import (
    QuadratureRule,
    Rectangle,
    build_rule,
    characteristic_phi,
    endpoint_distances,
    gtm_error_identity_check,
    gtm_l1_norm,
    integrate,
    rule_rational,
)
from .lightning import (
    LightningBasis,
    LightningSolution,
    PolygonDomain,
    build_basis,
    evaluate_solution,
    lshape_polygon,
    snowflake_polygon,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # core
    "GradedGrid", "ErrorCurve", "RateFit",
    "build_graded_grid", "fit_grid", "report_grid", "sup_error", "fit_rate", "write_csv",
    # clustering
    "ClusteredPoleSet", "TaperDiagnostic",
    "uniform_poles", "tapered_poles", "lightning_poles", "analyze_taper",
    # approximants
    "NewmanForm", "PoleResidue", "NodePoleInterpolant", "RationalApproximant",
    "newman", "trapezoidal_sqrt", "trapezoidal_sqrt_direct", "stenger_interpolant", "evaluate",
    # fitting
    "FitProblem", "FitResult",
    "least_squares_fit", "lawson_minimax_fit", "equioscillation_count",
    # potential
    "PointConfiguration", "StripModel",
    "phi", "tau", "discrete_potential", "hermite_error_bound_l1",
    "strip_potential_exact", "strip_potential_bilinear", "strip_density", "predict_rates",
    # quadrature
    "QuadratureRule", "Rectangle",
    "build_rule", "integrate", "endpoint_distances", "characteristic_phi",
    "rule_rational", "gtm_error_identity_check", "gtm_l1_norm",
    # lightning
    "PolygonDomain", "LightningBasis", "LightningSolution",
    "build_basis", "solve", "evaluate_solution", "lshape_polygon", "snowflake_polygon",
]
