"""Exact merging of duplicate monomials so a CPZ becomes regular."""
from __future__ import annotations

import numpy as np

from .sets import ConPolyZonotope


def unique_columns(M) -> tuple[np.ndarray, list[list[int]]]:
    """Distinct columns of ``M`` in order of first appearance.

    ``groups[j]`` lists the (0-based) column indices of ``M`` equal to
    ``unique[:, j]``.  Duplicates are found by a lexicographic column sort.
    """
    M = np.asarray(M)
    if M.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {M.shape}")
    if M.shape[1] == 0:
        return M.copy(), []
    if M.shape[0] == 0:
        # every column is the empty column
        return M[:, :1].copy(), [list(range(M.shape[1]))]
    _, first, inverse = np.unique(M, axis=1, return_index=True, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    groups: list[list[int]] = [[] for _ in order]
    for col, sorted_id in enumerate(inverse):
        groups[rank[sorted_id]].append(col)
    return M[:, first[order]].copy(), groups


def _merge(coeffs: np.ndarray, exps: np.ndarray):
    """Sum coefficient columns sharing an exponent column.

    Returns (merged coeffs, unique exps, index of the all-zero exponent
    column or None).
    """
    uniq, groups = unique_columns(exps)
    if len(groups) == exps.shape[1]:
        merged = coeffs
    else:
        merged = np.zeros((coeffs.shape[0], len(groups)))
        for j, g in enumerate(groups):
            col = coeffs[:, g[0]].copy()
            for i in g[1:]:
                col = col + coeffs[:, i]
            merged[:, j] = col
    zero = None
    if uniq.shape[1]:
        hits = np.flatnonzero(~uniq.any(axis=0))
        if hits.size:
            zero = int(hits[0])
    return merged, uniq, zero


def compact_gen(s: ConPolyZonotope) -> ConPolyZonotope:
    """Merge generators with identical exponent columns.

    Generators attached to the all-zero exponent column are constants and are
    added to the center; generators that end up exactly zero are dropped.
    """
    G, E, zero = _merge(s.G, s.E)
    c = s.c
    keep = np.ones(G.shape[1], dtype=bool)
    if zero is not None:
        c = c + G[:, zero]
        keep[zero] = False
    keep &= G.any(axis=0) if G.shape[1] else keep
    if keep.all() and zero is None and G is s.G:
        return s
    return ConPolyZonotope(c, G[:, keep], E[:, keep], s.A, s.b, s.R)


def compact_con(s: ConPolyZonotope) -> ConPolyZonotope:
    """Merge constraint generators with identical exponent columns.

    A constant constraint term (all-zero exponent column) moves to the
    right-hand side; constraint generators that are exactly zero are dropped.
    """
    A, R, zero = _merge(s.A, s.R)
    b = s.b
    keep = np.ones(A.shape[1], dtype=bool)
    if zero is not None:
        b = b - A[:, zero]
        keep[zero] = False
    keep &= A.any(axis=0) if A.shape[1] else keep
    if keep.all() and zero is None and A is s.A:
        return s
    return ConPolyZonotope(s.c, s.G, s.E, A[:, keep], b, R[:, keep])


def compact(s: ConPolyZonotope) -> ConPolyZonotope:
    return compact_con(compact_gen(s))
