"""Constrained polynomial zonotopes: exact set operations, conversions and
witness-based validation."""
from .convert import (
    from_con_zonotope,
    from_ellipsoid,
    from_interval,
    from_poly_zonotope,
    from_taylor_model,
    from_zonotope,
    simplex_fixture_P,
    to_cpz,
)
from .linalg import ConvergenceError, DomainError, Interval, ShapeError, ValidationError
from .ops import (
    cartesian_product,
    convex_hull,
    intersect,
    linear_map,
    minkowski_sum,
    quadratic_map,
    union,
)
from .oracle import WitnessSampleConfig, check_witness_map, point_cloud, sample_witnesses
from .regularize import compact, compact_con, compact_gen
from .sets import (
    ConPolyZonotope,
    ConZonotope,
    Ellipsoid,
    IntervalBox,
    PolyZonotope,
    TaylorModel,
    Zonotope,
    constraint_residual,
    eval_point,
    example_cpz,
    is_regular,
    representation_size,
)

__version__ = "0.1.0"
