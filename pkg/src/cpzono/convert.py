"""Exact embeddings of other set representations into CPZs."""
from __future__ import annotations

import numpy as np

from .linalg import ShapeError, as_matrix, as_vector
from .regularize import compact_gen
from .sets import (
    ConPolyZonotope,
    ConZonotope,
    Ellipsoid,
    IntervalBox,
    PolyZonotope,
    TaylorModel,
    Zonotope,
    check_positive_definite,
)


def from_poly_zonotope(s: PolyZonotope) -> ConPolyZonotope:
    """Independent generators become generators of fresh factors appended
    after the dependent ones."""
    p, h = s.E.shape
    qi = s.GI.shape[1]
    E = np.block([
        [s.E, np.zeros((p, qi), dtype=np.int64)],
        [np.zeros((qi, h), dtype=np.int64), np.eye(qi, dtype=np.int64)],
    ])
    return ConPolyZonotope(s.c, np.hstack([s.G, s.GI]), E, R=np.zeros((p + qi, 0), dtype=np.int64))


def from_con_zonotope(s: ConZonotope) -> ConPolyZonotope:
    p = s.G.shape[1]
    eye = np.eye(p, dtype=np.int64)
    return ConPolyZonotope(s.c, s.G, eye, s.A, s.b, eye)


def from_zonotope(c, g) -> ConPolyZonotope:
    c = as_vector(c, "c")
    g = as_matrix(g, "G", rows=c.shape[0])
    if g.shape[0] != c.shape[0]:
        raise ShapeError(f"G: expected {c.shape[0]} rows (len(c)), got {g.shape[0]}")
    return from_poly_zonotope(PolyZonotope(c, GI=g))


def _center_radius(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mid = 0.5 * (lo + hi)
    rad = np.maximum(hi - mid, mid - lo)
    # nudge up where rounding left an endpoint uncovered
    short = (mid + rad < hi) | (mid - rad > lo)
    rad = np.where(short, np.nextafter(rad, np.inf), rad)
    return mid, rad


def from_interval(box: IntervalBox) -> ConPolyZonotope:
    mid, rad = _center_radius(box.lo, box.hi)
    return from_zonotope(mid, np.diag(rad))


def from_taylor_model(t: TaylorModel) -> ConPolyZonotope:
    """Polynomial part -> dependent generators over the model's factors;
    the remainder box -> center shift plus one fresh factor per dimension."""
    lo = np.array([r.lo for r in t.remainder])
    hi = np.array([r.hi for r in t.remainder])
    mid, rad = _center_radius(lo, hi)
    pz = PolyZonotope(mid, t.coeffs, np.diag(rad), t.expons)
    return compact_gen(from_poly_zonotope(pz))


def from_ellipsoid(e: Ellipsoid) -> ConPolyZonotope:
    """Generators ``V diag(sqrt(lambda))`` on factors ``a_1..a_n`` plus one slack
    factor ``a_{n+1}`` with the constraint ``-0.5 a_{n+1} + sum a_k^2 = 0.5``,
    which is equivalent to ``sum a_k^2 <= 1``."""
    values, V = check_positive_definite(e.Q)
    n = e.c.shape[0]
    G = V * np.sqrt(values)[None, :]
    E = np.vstack([np.eye(n, dtype=np.int64), np.zeros((1, n), dtype=np.int64)])
    A = np.hstack([[-0.5], np.ones(n)])[None, :]
    R = np.zeros((n + 1, n + 1), dtype=np.int64)
    R[n, 0] = 1
    R[:n, 1:] = 2 * np.eye(n, dtype=np.int64)
    return ConPolyZonotope(e.c, G, E, A, [0.5], R)


def ellipsoid_witness(e: Ellipsoid, x) -> np.ndarray:
    """Factor vector reproducing a point ``x`` of the ellipsoid in
    :func:`from_ellipsoid`'s parametrization (same eigendecomposition).

    The slack is clipped to [-1, 1]: on the boundary rounding can push it a
    hair past 1, and the clipped value moves that error into the constraint
    residual instead of the factor bound."""
    values, V = check_positive_definite(e.Q)
    z = V.T @ (as_vector(x, "x") - e.c)
    alpha = z / np.sqrt(values)
    slack = min(max(2.0 * float(np.sum(alpha**2)) - 1.0, -1.0), 1.0)
    return np.append(alpha, slack)


def simplex_fixture_P() -> ConPolyZonotope:
    """The triangle with vertices (-1, 1), (0, -1), (1, 0) as a bilinear
    polynomial zonotope in two factors."""
    return ConPolyZonotope(
        c=[-0.25, 0.25],
        G=[[-0.75, -0.25, 0.25], [0.75, -0.25, 0.25]],
        E=[[1, 0, 1], [0, 1, 1]],
    )


SIMPLEX_VERTICES = np.array([[-1.0, 1.0], [0.0, -1.0], [1.0, 0.0]])


def to_cpz(obj) -> ConPolyZonotope:
    """Convert any supported representation to a CPZ."""
    if isinstance(obj, ConPolyZonotope):
        return obj
    if isinstance(obj, PolyZonotope):
        return from_poly_zonotope(obj)
    if isinstance(obj, ConZonotope):
        return from_con_zonotope(obj)
    if isinstance(obj, IntervalBox):
        return from_interval(obj)
    if isinstance(obj, Ellipsoid):
        return from_ellipsoid(obj)
    if isinstance(obj, TaylorModel):
        return from_taylor_model(obj)
    if isinstance(obj, Zonotope):
        return from_zonotope(obj.c, obj.G)
    raise TypeError(f"cannot convert {type(obj).__name__} to a constrained polynomial zonotope")
