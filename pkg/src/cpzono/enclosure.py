"""Order-2 Taylor enclosures of nonlinear maps R^2 -> R^2.

For ``f`` expanded at ``x*`` with ``d = x - x*``::

    f_j(x) in f_j(x*) + J_j d + 0.5 d^T H_j d + L_j
    L_j = 1/6 sum_k d_k d^T T_{j,k} d,    T_{j,k} = d/dx_k of H_j at some point on [x*, x]

The polynomial part is computed exactly: lifting ``s - x*`` to ``{1} x (s - x*)``
turns ``p`` into a pure quadratic form ``y^T Qt_j y`` with::

    Qt_j = [[f_j(x*),      0.5 J_j  ],
            [0.5 J_j^T,    0.5 H_j  ]]

so a single quadratic map reproduces constant, linear and quadratic terms on
shared factors.  ``L`` is bounded with interval arithmetic over a box that
contains the set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg as la
from .convert import from_interval, simplex_fixture_P
from .linalg import Interval, ShapeError, as_vector
from .oracle import WitnessSampleConfig, point_cloud
from .ops import cartesian_product, intersect, minkowski_sum, quadratic_map, union
from .sets import ConPolyZonotope, IntervalBox, singleton

IntervalMatrix = Sequence[Sequence[Interval]]


@dataclass(frozen=True)
class SmoothFunction2D:
    """A map R^2 -> R^2 with hand-supplied derivatives.

    ``gradient(x)`` is the 2x2 Jacobian, ``hessian(x)`` has shape (2, 2, 2)
    indexed [output, a, b], and ``third_interval(box)`` returns, per output,
    the pair ``(T1, T2)`` of 2x2 interval matrices enclosing the third
    derivatives over ``box``.
    """

    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    third_interval: Callable[[IntervalBox], Sequence[tuple[IntervalMatrix, IntervalMatrix]]]
    name: str = "f"

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.value(np.asarray(x, dtype=float)), dtype=float)


def taylor_polynomial(f: SmoothFunction2D, xstar, x) -> np.ndarray:
    """Pointwise value of the order-2 polynomial ``p(x)``."""
    xstar = as_vector(xstar, "xstar")
    d = np.asarray(x, dtype=float) - xstar
    J, H = f.gradient(xstar), f.hessian(xstar)
    return f.value(xstar) + J @ d + 0.5 * np.einsum("a,jab,b->j", d, H, d)


def _monomial(d: list[Interval], idx: tuple[int, ...]) -> Interval:
    # d_k d_a d_b with repeated indices as powers: tighter than plain products
    out = Interval.point(1.0)
    for k in sorted(set(idx)):
        out = out * la.pow_int(d[k], idx.count(k))
    return out


def lagrange_remainder(f: SmoothFunction2D, box: IntervalBox, xstar) -> list[Interval]:
    """Interval enclosure of ``L`` per output, for every ``x`` in ``box``."""
    xstar = as_vector(xstar, "xstar")
    if box.n != 2 or xstar.shape[0] != 2:
        raise ShapeError("taylor enclosure is defined for maps on R^2")
    if not box.contains(xstar):
        raise la.ValidationError("xstar: expansion point must lie in the box")
    d = [iv - float(xs) for iv, xs in zip(box.intervals(), xstar)]
    out = []
    for T in f.third_interval(box):
        acc = Interval.point(0.0)
        for k in range(2):
            for a in range(2):
                for b in range(2):
                    acc = acc + T[k][a][b] * _monomial(d, (k, a, b))
        out.append(acc / 6.0)
    return out


def taylor_enclose(f: SmoothFunction2D, s: ConPolyZonotope, box: IntervalBox, xstar) -> ConPolyZonotope:
    """Enclosure of ``f(s)``: exact polynomial part plus the interval remainder."""
    xstar = as_vector(xstar, "xstar")
    if s.n != 2:
        raise ShapeError(f"taylor enclosure needs a set in R^2, got R^{s.n}")
    L = lagrange_remainder(f, box, xstar)
    fx, J, H = f.value(xstar), f.gradient(xstar), f.hessian(xstar)
    Qs = []
    for j in range(len(fx)):
        Q = np.zeros((3, 3))
        Q[0, 0] = fx[j]
        Q[0, 1:] = Q[1:, 0] = 0.5 * J[j]
        Q[1:, 1:] = 0.5 * H[j]
        Qs.append(Q)
    lifted = cartesian_product(singleton([1.0]), s.translate(-xstar))
    poly = quadratic_map(Qs, lifted)
    rem = from_interval(IntervalBox([iv.lo for iv in L], [iv.hi for iv in L]))
    return minkowski_sum(poly, rem)


# --------------------------------------------------------------------------
# regions of the demo map


def _require_demo_box(box: IntervalBox) -> None:
    if box.n != 2 or not (np.all(box.lo == -1.0) and np.all(box.hi == 1.0)):
        raise la.ValidationError("box: the region parametrizations assume [-1, 1]^2")


def region_above_parabola(box: IntervalBox | None = None) -> ConPolyZonotope:
    """``{x in [-1,1]^2 : x2 >= 0.5 x1^2}``: x2 sweeps linearly from the
    parabola (a2 = -1) to the top edge (a2 = 1)."""
    _require_demo_box(DEMO_BOX if box is None else box)
    return ConPolyZonotope(
        c=[0.0, 0.5],
        G=[[1.0, 0.0, 0.0, 0.0], [0.0, 0.25, 0.5, -0.25]],
        E=[[1, 2, 0, 2], [0, 0, 1, 1]],
    )


def region_below_parabola(box: IntervalBox | None = None) -> ConPolyZonotope:
    """``{x in [-1,1]^2 : x2 <= 0.5 x1^2}``, from the bottom edge (a2 = -1) to
    the parabola (a2 = 1)."""
    _require_demo_box(DEMO_BOX if box is None else box)
    return ConPolyZonotope(
        c=[0.0, -0.5],
        G=[[1.0, 0.0, 0.0, 0.0], [0.0, 0.25, 0.5, 0.25]],
        E=[[1, 2, 0, 2], [0, 0, 1, 1]],
    )


DEMO_BOX = IntervalBox([-1.0, -1.0], [1.0, 1.0])


# --------------------------------------------------------------------------
# the two branches of the demo map, differentiated by hand
#
# f1 = ( -1.6 + x2 - 0.5 x1 x2 + cos(0.5 x2),  0.5 + x2^2 + sin(0.4 x1 - 1) )
#   J  = [[-0.5 x2, 1 - 0.5 x1 - 0.5 sin(0.5 x2)], [0.4 cos(0.4 x1 - 1), 2 x2]]
#   H1 = [[0, -0.5], [-0.5, -0.25 cos(0.5 x2)]]     H2 = [[-0.16 sin(0.4 x1 - 1), 0], [0, 2]]
#   output 1: T1 = 0, T2 = [[0, 0], [0, 0.125 sin(0.5 x2)]]
#   output 2: T1 = [[-0.064 cos(0.4 x1 - 1), 0], [0, 0]], T2 = 0
#
# f2 = ( -0.6 + 2 sin(0.3 x2) + exp(0.3 x1),  0.1 + x1 x2 )
#   J  = [[0.3 exp(0.3 x1), 0.6 cos(0.3 x2)], [x2, x1]]
#   H1 = diag(0.09 exp(0.3 x1), -0.18 sin(0.3 x2))   H2 = [[0, 1], [1, 0]]
#   output 1: T1 = [[0.027 exp(0.3 x1), 0], [0, 0]], T2 = [[0, 0], [0, -0.054 cos(0.3 x2)]]
#   output 2: T1 = T2 = 0


_Z = Interval.point(0.0)


def _only(entry: Interval, a: int, b: int) -> list[list[Interval]]:
    out = [[_Z, _Z], [_Z, _Z]]
    out[a][b] = entry
    return out


_ZERO_T = [[_Z, _Z], [_Z, _Z]]


def _f1_value(x):
    x1, x2 = x
    return np.array([-1.6 + x2 - 0.5 * x1 * x2 + math.cos(0.5 * x2),
                     0.5 + x2**2 + math.sin(0.4 * x1 - 1.0)])


def _f1_gradient(x):
    x1, x2 = x
    return np.array([[-0.5 * x2, 1.0 - 0.5 * x1 - 0.5 * math.sin(0.5 * x2)],
                     [0.4 * math.cos(0.4 * x1 - 1.0), 2.0 * x2]])


def _f1_hessian(x):
    x1, x2 = x
    return np.array([[[0.0, -0.5], [-0.5, -0.25 * math.cos(0.5 * x2)]],
                     [[-0.16 * math.sin(0.4 * x1 - 1.0), 0.0], [0.0, 2.0]]])


def _f1_third(box: IntervalBox):
    x1, x2 = box.intervals()
    t1 = 0.125 * la.sin(0.5 * x2)
    t2 = -0.064 * la.cos(0.4 * x1 - 1.0)
    return [(_ZERO_T, _only(t1, 1, 1)), (_only(t2, 0, 0), _ZERO_T)]


def _f2_value(x):
    x1, x2 = x
    return np.array([-0.6 + 2.0 * math.sin(0.3 * x2) + math.exp(0.3 * x1), 0.1 + x1 * x2])


def _f2_gradient(x):
    x1, x2 = x
    return np.array([[0.3 * math.exp(0.3 * x1), 0.6 * math.cos(0.3 * x2)], [x2, x1]])


def _f2_hessian(x):
    x1, x2 = x
    return np.array([[[0.09 * math.exp(0.3 * x1), 0.0], [0.0, -0.18 * math.sin(0.3 * x2)]],
                     [[0.0, 1.0], [1.0, 0.0]]])


def _f2_third(box: IntervalBox):
    x1, x2 = box.intervals()
    t1 = 0.027 * la.exp(0.3 * x1)
    t2 = -0.054 * la.cos(0.3 * x2)
    return [(_only(t1, 0, 0), _only(t2, 1, 1)), (_ZERO_T, _ZERO_T)]


F1 = SmoothFunction2D(_f1_value, _f1_gradient, _f1_hessian, _f1_third, name="f1")
F2 = SmoothFunction2D(_f2_value, _f2_gradient, _f2_hessian, _f2_third, name="f2")


def demo_map(x) -> np.ndarray:
    """The piecewise map: ``f1`` where ``0.5 x1^2 <= x2``, else ``f2``."""
    x = np.asarray(x, dtype=float)
    return F1(x) if 0.5 * x[0] ** 2 <= x[1] else F2(x)


# --------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class DemoPiece:
    function: SmoothFunction2D
    region: ConPolyZonotope
    piece: ConPolyZonotope  # P intersected with the region
    cloud: np.ndarray  # point cloud of ``piece`` used to choose xstar
    xstar: np.ndarray
    remainder: tuple[Interval, Interval]
    enclosure: ConPolyZonotope


@dataclass(frozen=True)
class DemoResult:
    P: ConPolyZonotope
    pieces: tuple[DemoPiece, DemoPiece]
    union: ConPolyZonotope


DEMO_CONFIG = WitnessSampleConfig(draws=10_000, seed=2020)


def _hull_midpoint(cloud: np.ndarray, box: IntervalBox) -> np.ndarray:
    if cloud.shape[0] == 0:
        return 0.5 * (box.lo + box.hi)
    return np.clip(0.5 * (cloud.min(axis=0) + cloud.max(axis=0)), box.lo, box.hi)


def demo_pipeline(cfg: WitnessSampleConfig = DEMO_CONFIG) -> DemoResult:
    """P, both region pieces with their enclosures, and the final union."""
    P = simplex_fixture_P()
    pieces = []
    for f, region in ((F1, region_above_parabola()), (F2, region_below_parabola())):
        piece = intersect(P, region)
        cloud = point_cloud(piece, cfg)
        xstar = _hull_midpoint(cloud, DEMO_BOX)
        rem = tuple(lagrange_remainder(f, DEMO_BOX, xstar))
        pieces.append(DemoPiece(f, region, piece, cloud, xstar, rem,
                                taylor_enclose(f, piece, DEMO_BOX, xstar)))
    return DemoResult(P, tuple(pieces), union(pieces[0].enclosure, pieces[1].enclosure))


def demo_nonlinear_map(cfg: WitnessSampleConfig = DEMO_CONFIG) -> ConPolyZonotope:
    """Enclosure of the piecewise demo map over the simplex fixture."""
    return demo_pipeline(cfg).union
