"""Error-controlled C2 cubic B-spline interpolation of curves and offset toolpaths.

Each interval [t0, t1] of a partition gets one cubic B-spline on the knots
{t0 x4, t0 + L/3, t0 + 2L/3, t1 x4} that matches the source's value, first and
second derivative at both ends, so adjacent segments join with C2 continuity.
"""

from .assembly import (
    CompositeSpline,
    ContinuityReport,
    ErrorReport,
    assemble,
    fit,
    fit_path,
    verify_c2,
    verify_error,
)
from .bspline import KnotVector, SegmentSpline, basis_eval, basis_matrix, curve_eval
from .curves import (
    Arc,
    BezierSegment,
    CurveSource,
    FunctionSource,
    GraphCurve,
    LineSegment,
    Polynomial,
    Restricted,
    bezier_derivatives,
    circle,
    cosine,
    exponential,
    sine,
)
from .error_control import (
    Partition,
    SecondDerivEstimate,
    ToleranceBudget,
    adaptive_partition,
    error_bound,
    estimate_second_derivative,
    max_step_parametric,
    max_step_scalar,
    segment_constant,
    uniform_partition,
)
from .errors import (
    C2FitError,
    DomainError,
    GeometryError,
    OffsetWarning,
    ParseError,
    RegularityError,
    ToleranceError,
)
from .hermite import (
    HermiteEndData,
    interior_second_derivatives,
    interp_segment,
    scale_to_unit,
    unit_coefficients,
)
from .offset import OffsetCurve, offset_eval
from .paths import Junction, PiecewisePath, corner_compensation

__version__ = "0.1.0"
