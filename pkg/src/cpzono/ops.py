"""Closed-form set operations on constrained polynomial zonotopes.

Every operation returns a compacted (regular) CPZ.  Factor ordering of the
results is part of the contract, since witness liftings depend on it:

* Minkowski sum, Cartesian product, intersection: ``(a_1, a_2)``
* convex hull: ``(a_1, a_2, lam)`` with the interpolation factor last
* union: ``(s1, s2, a_1, a_2)`` with the two selector factors first
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .linalg import ShapeError, as_matrix
from .regularize import compact, compact_con, compact_gen
from .sets import ConPolyZonotope

_INT = np.int64


def _blkdiag(*mats: np.ndarray) -> np.ndarray:
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    dtype = np.result_type(*mats) if mats else float
    out = np.zeros((rows, cols), dtype=dtype)
    r = k = 0
    for m in mats:
        out[r:r + m.shape[0], k:k + m.shape[1]] = m
        r += m.shape[0]
        k += m.shape[1]
    return out


def _zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=_INT)


def _same_dim(s1: ConPolyZonotope, s2: ConPolyZonotope, what: str) -> None:
    if s1.n != s2.n:
        raise ShapeError(f"{what}: operands live in R^{s1.n} and R^{s2.n}")


def linear_map(M, s: ConPolyZonotope) -> ConPolyZonotope:
    M = as_matrix(M, "M")
    if M.shape[1] != s.n:
        raise ShapeError(f"linear map: M is {M.shape[0]}x{M.shape[1]} but the set lives in R^{s.n}")
    return compact(ConPolyZonotope(M @ s.c, M @ s.G, s.E, s.A, s.b, s.R))


def minkowski_sum(s1: ConPolyZonotope, s2: ConPolyZonotope) -> ConPolyZonotope:
    _same_dim(s1, s2, "Minkowski sum")
    out = ConPolyZonotope(
        s1.c + s2.c,
        np.hstack([s1.G, s2.G]),
        _blkdiag(s1.E, s2.E),
        _blkdiag(s1.A, s2.A),
        np.concatenate([s1.b, s2.b]),
        _blkdiag(s1.R, s2.R),
    )
    return compact(out)


def cartesian_product(s1: ConPolyZonotope, s2: ConPolyZonotope) -> ConPolyZonotope:
    out = ConPolyZonotope(
        np.concatenate([s1.c, s2.c]),
        _blkdiag(s1.G, s2.G),
        _blkdiag(s1.E, s2.E),
        _blkdiag(s1.A, s2.A),
        np.concatenate([s1.b, s2.b]),
        _blkdiag(s1.R, s2.R),
    )
    return compact(out)


def convex_hull(s1: ConPolyZonotope, s2: ConPolyZonotope) -> ConPolyZonotope:
    """Points ``0.5 (1 + lam) x1 + 0.5 (1 - lam) x2`` with ``lam`` housed as a
    fresh last factor."""
    _same_dim(s1, s2, "convex hull")
    p1, p2, h1, h2 = s1.p, s2.p, s1.h, s2.h
    G = 0.5 * np.hstack([(s1.c - s2.c)[:, None], s1.G, s1.G, s2.G, -s2.G])
    E = np.block([
        [_zeros(p1, 1), s1.E, s1.E, _zeros(p1, h2), _zeros(p1, h2)],
        [_zeros(p2, 1), _zeros(p2, h1), _zeros(p2, h1), s2.E, s2.E],
        [np.ones((1, 1), _INT), _zeros(1, h1), np.ones((1, h1), _INT), _zeros(1, h2), np.ones((1, h2), _INT)],
    ])
    R = np.vstack([_blkdiag(s1.R, s2.R), _zeros(1, s1.q + s2.q)])
    out = ConPolyZonotope(
        0.5 * (s1.c + s2.c), G, E,
        _blkdiag(s1.A, s2.A), np.concatenate([s1.b, s2.b]), R,
    )
    return compact(out)


def quadratic_map(qs: Sequence, s: ConPolyZonotope) -> ConPolyZonotope:
    """Image ``{x | x_i = y^T Q_i y, y in s}``; same factors and constraints."""
    Qs = [as_matrix(Q, f"Q[{i}]") for i, Q in enumerate(qs)]
    for i, Q in enumerate(Qs):
        if Q.shape != (s.n, s.n):
            raise ShapeError(f"Q[{i}] is {Q.shape[0]}x{Q.shape[1]}, expected {s.n}x{s.n}")
    w, h = len(Qs), s.h
    c, G = s.c, s.G
    QG = [Q @ G for Q in Qs]
    c_bar = np.array([c @ Q @ c for Q in Qs], dtype=float)
    G_hat1 = np.array([c @ qg for qg in QG]).reshape(w, h)
    G_hat2 = np.array([G.T @ Q @ c for Q in Qs]).reshape(w, h)
    blocks_G = [G_hat1, G_hat2]
    blocks_E = [s.E, s.E]
    for j in range(h):
        blocks_G.append(np.array([G[:, j] @ qg for qg in QG]).reshape(w, h))
        blocks_E.append(s.E + s.E[:, j:j + 1])
    out = ConPolyZonotope(
        c_bar, np.hstack(blocks_G), np.hstack(blocks_E) if blocks_E else s.E,
        s.A, s.b, s.R,
    )
    return compact(out)


def intersect(s1: ConPolyZonotope, s2: ConPolyZonotope, *, compacted: bool = True) -> ConPolyZonotope:
    """Keeps ``s1``'s parametrization and adds the coupling constraint
    ``c1 + G1 m1(a_1) = c2 + G2 m2(a_2)``."""
    _same_dim(s1, s2, "intersection")
    p2 = s2.p
    A = _blkdiag(s1.A, s2.A, np.hstack([s1.G, -s2.G]))
    b = np.concatenate([s1.b, s2.b, s2.c - s1.c])
    R = np.block([
        [s1.R, _zeros(s1.p, s2.q), s1.E, _zeros(s1.p, s2.h)],
        [_zeros(p2, s1.q), s2.R, _zeros(p2, s1.h), s2.E],
    ])
    E = np.vstack([s1.E, _zeros(p2, s1.h)])
    out = ConPolyZonotope(s1.c, s1.G, E, A, b, R)
    return compact_gen(compact_con(out)) if compacted else out


def union_selector_constraint(p1: int, p2: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient row and exponent matrix of the polynomial ``g(a) = 0`` that
    pins the inactive operand's factors to zero.

    Factor layout: ``(s1, s2, a_1 [p1], a_2 [p2])``.  With ``f1 = mean(a_1^2)``
    and ``f2 = mean(a_2^2)``::

        g = (1 + s1 + 0.5 f1 (1 - s1)) (1 - 0.5 f2) - s2 - 1
    """
    if p1 < 1 or p2 < 1:
        raise ValueError("the union selector needs at least one factor per operand")
    p = p1 + p2 + 2
    coeff = np.concatenate([
        [1.0, -1.0],
        np.full(p1, 1.0 / (2 * p1)),
        np.full(p1, -1.0 / (2 * p1)),
        np.full(p2, -1.0 / (2 * p2)),
        np.full(p2, -1.0 / (2 * p2)),
        np.full(p1 * p2, -1.0 / (4 * p1 * p2)),
        np.full(p1 * p2, 1.0 / (4 * p1 * p2)),
    ])
    sel1 = np.zeros((2, 1), _INT)
    sel1[0, 0] = 1
    sq1 = np.vstack([_zeros(2, p1), 2 * np.eye(p1, dtype=_INT), _zeros(p2, p1)])
    sq2 = np.vstack([_zeros(2 + p1, p2), 2 * np.eye(p2, dtype=_INT)])
    H = np.vstack([
        np.kron(2 * np.eye(p1, dtype=_INT), np.ones((1, p2), _INT)),
        np.tile(2 * np.eye(p2, dtype=_INT), (1, p1)),
    ])
    cross = np.vstack([_zeros(2, p1 * p2), H])
    with_s1 = np.zeros((p, 1), _INT)
    with_s1[0, 0] = 1
    R = np.hstack([
        np.vstack([[[1], [0]], _zeros(p - 2, 1)]),
        np.vstack([[[0], [1]], _zeros(p - 2, 1)]),
        sq1,
        sq1 + with_s1,
        sq2,
        sq2 + with_s1,
        cross,
        cross + with_s1,
    ]).astype(_INT)
    return coeff[None, :], R


def _pad_factor(s: ConPolyZonotope) -> ConPolyZonotope:
    return s.with_factors(1) if s.p == 0 else s


def union(s1: ConPolyZonotope, s2: ConPolyZonotope, *, compacted: bool = True) -> ConPolyZonotope:
    """Union via two selector factors ``s1 s2 = 1`` (so ``s1 = s2 = +-1``) and
    the polynomial constraint of :func:`union_selector_constraint`.

    An operand without factors (a point) receives one unused factor first.
    """
    _same_dim(s1, s2, "union")
    s1, s2 = _pad_factor(s1), _pad_factor(s2)
    p1, p2 = s1.p, s2.p
    p = p1 + p2 + 2
    c = 0.5 * (s1.c + s2.c)
    G = np.hstack([0.5 * (s1.c - s2.c)[:, None], s1.G, s2.G])
    E = np.block([
        [np.ones((1, 1), _INT), _zeros(1, s1.h), _zeros(1, s2.h)],
        [_zeros(1, 1), _zeros(1, s1.h), _zeros(1, s2.h)],
        [_zeros(p1, 1), s1.E, _zeros(p1, s2.h)],
        [_zeros(p2, 1), _zeros(p2, s1.h), s2.E],
    ])
    sel_A, sel_R = union_selector_constraint(p1, p2)
    qbar = sel_A.shape[1]
    m1, m2, q1, q2 = s1.m, s2.m, s1.q, s2.q
    A = np.zeros((2 + m1 + m2, 1 + qbar + q1 + q2 + 1))
    A[0, 0] = 1.0
    A[1, 1:1 + qbar] = sel_A[0]
    A[2:2 + m1, 1 + qbar:1 + qbar + q1] = s1.A
    A[2 + m1:, 1 + qbar + q1:1 + qbar + q1 + q2] = s2.A
    A[2:2 + m1, -1] = -0.5 * s1.b
    A[2 + m1:, -1] = 0.5 * s2.b
    b = np.concatenate([[1.0, 0.0], 0.5 * s1.b, 0.5 * s2.b])
    R_hat = np.zeros((p, 1), _INT)
    R_hat[:2, 0] = 1
    R_low = np.zeros((p, q1 + q2 + 1), _INT)
    R_low[2:2 + p1, :q1] = s1.R
    R_low[2 + p1:, q1:q1 + q2] = s2.R
    R_low[0, -1] = 1
    R = np.hstack([R_hat, sel_R, R_low])
    out = ConPolyZonotope(c, G, E, A, b, R)
    return compact_gen(compact_con(out)) if compacted else out
