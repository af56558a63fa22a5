"""flatmap: executable local isometries for conformally flat plane metrics.

Given an analytic f, the flat metric scaled by e^{2 Re f} is realized by an
explicit map W on a validated disc, and every identity behind that
construction (harmonic conjugacy, the gradient-log identity, pullback
conformality, flat curvature) is checked numerically on grids.
"""

__version__ = "0.1.0"

from .construction import (  # noqa: F401
    ConstructionConfig,
    ConstructionResult,
    DomainValidationError,
    OutsideDomainError,
    build_g,
    choose_constant,
    isometry_W,
    solve_lemma1,
)
from .contour import (  # noqa: F401
    Disc,
    QuadratureConfig,
    QuadratureError,
    integrate_along_polyline,
    integrate_exp_f,
)
from .expr import (  # noqa: F401
    DivisionByZeroError,
    EvaluationError,
    ExprTree,
    NonFiniteError,
    ParseError,
    UnknownIdentifierError,
    differentiate,
    evaluate,
    parse,
    real_part_field,
    to_source,
)
from .geometry import (  # noqa: F401
    Grid2D,
    ResidualReport,
    curvature_conformal,
    jacobian,
    laplace_beltrami_conformal,
    laplacian,
    pullback_residual,
    verification_suite,
)
from .product_metric import (  # noqa: F401
    ProductMetricSpec,
    embed_product,
    gaussian_spec,
    image_side_lengths,
    zero_spec,
)
