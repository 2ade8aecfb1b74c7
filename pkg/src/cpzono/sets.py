"""Set representations and the evaluation primitives built on them.

A constrained polynomial zonotope (CPZ) ``<c, G, E, A, b, R>`` is the set

    { c + sum_i (prod_k a_k^E[k,i]) G[:,i]  |  sum_j (prod_k a_k^R[k,j]) A[:,j] = b,
      a in [-1, 1]^p }

All value types here are frozen dataclasses over read-only numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

from .linalg import (
    Interval,
    ShapeError,
    ValidationError,
    as_exponents,
    as_matrix,
    as_vector,
    sym_eig,
)

WITNESS_TOL = 1e-9
FACTOR_TOL = 1e-12
POS_DEF_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _arrays_equal(x, y) -> bool:
    for f in fields(x):
        a, b = getattr(x, f.name), getattr(y, f.name)
        if isinstance(a, np.ndarray):
            if a.shape != b.shape or a.dtype.kind != b.dtype.kind or not np.array_equal(a, b):
                return False
        elif a != b:
            return False
    return True


class _Value:
    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return _arrays_equal(self, other)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ConPolyZonotope(_Value):
    c: np.ndarray
    G: np.ndarray = None
    E: np.ndarray = None
    A: np.ndarray = None
    b: np.ndarray = None
    R: np.ndarray = None

    def __post_init__(self):
        c = as_vector(self.c, "c")
        n = c.shape[0]
        G = np.zeros((n, 0)) if self.G is None else as_matrix(self.G, "G", rows=n)
        if G.shape[0] != n:
            raise ShapeError(f"G: expected {n} rows (len(c)), got {G.shape[0]}")
        h = G.shape[1]
        if self.A is None:
            A = np.zeros((0, 0))
        else:
            A = as_matrix(self.A, "A", rows=None if self.b is None else len(as_vector(self.b, "b")))
        b = np.zeros(A.shape[0]) if self.b is None else as_vector(self.b, "b")
        if A.shape[0] != b.shape[0]:
            raise ShapeError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        q = A.shape[1]
        if self.E is None and self.R is None:
            p = 0
        elif self.E is not None:
            E0 = np.asarray(self.E)
            p = E0.shape[0] if E0.ndim == 2 else (1 if E0.size else 0)
        else:
            R0 = np.asarray(self.R)
            p = R0.shape[0] if R0.ndim == 2 else (1 if R0.size else 0)
        E = np.zeros((p, 0), dtype=np.int64) if self.E is None else as_exponents(self.E, "E", rows=p)
        R = np.zeros((p, 0), dtype=np.int64) if self.R is None else as_exponents(self.R, "R", rows=p)
        if E.shape[1] != h:
            raise ShapeError(f"E: expected {h} columns (one per generator), got {E.shape[1]}")
        if R.shape[1] != q:
            raise ShapeError(f"R: expected {q} columns (one per constraint generator), got {R.shape[1]}")
        if E.shape[0] != R.shape[0]:
            raise ShapeError(f"E has {E.shape[0]} factor rows but R has {R.shape[0]}")
        for name, val in (("c", c), ("G", G), ("A", A), ("b", b)):
            if val.size and not np.all(np.isfinite(val)):
                raise ValidationError(f"{name}: entries must be finite")
        for name, val in (("c", c), ("G", G), ("E", E), ("A", A), ("b", b), ("R", R)):
            object.__setattr__(self, name, _frozen(val))

    @property
    def n(self) -> int:
        return self.c.shape[0]

    @property
    def p(self) -> int:
        return self.E.shape[0]

    @property
    def h(self) -> int:
        return self.G.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def q(self) -> int:
        return self.A.shape[1]

    def dims(self) -> dict:
        return dict(n=self.n, p=self.p, h=self.h, m=self.m, q=self.q)

    def unconstrained(self) -> "ConPolyZonotope":
        return ConPolyZonotope(self.c, self.G, self.E, R=np.zeros((self.p, 0), dtype=np.int64))

    def translate(self, v) -> "ConPolyZonotope":
        return ConPolyZonotope(self.c + as_vector(v, "shift"), self.G, self.E, self.A, self.b, self.R)

    def with_factors(self, p: int) -> "ConPolyZonotope":
        """Same set with ``p - self.p`` unused factors appended."""
        extra = p - self.p
        if extra < 0:
            raise ValueError("cannot drop factors")
        E = np.vstack([self.E, np.zeros((extra, self.h), dtype=np.int64)])
        R = np.vstack([self.R, np.zeros((extra, self.q), dtype=np.int64)])
        return ConPolyZonotope(self.c, self.G, E, self.A, self.b, R)

    def __repr__(self) -> str:
        d = self.dims()
        return "ConPolyZonotope(" + ", ".join(f"{k}={v}" for k, v in d.items()) + ")"


@dataclass(frozen=True, eq=False)
class PolyZonotope(_Value):
    c: np.ndarray
    G: np.ndarray = None
    GI: np.ndarray = None
    E: np.ndarray = None

    def __post_init__(self):
        c = as_vector(self.c, "c")
        n = c.shape[0]
        G = np.zeros((n, 0)) if self.G is None else as_matrix(self.G, "G", rows=n)
        GI = np.zeros((n, 0)) if self.GI is None else as_matrix(self.GI, "GI", rows=n)
        if G.shape[0] != n or GI.shape[0] != n:
            raise ShapeError(f"G and GI need {n} rows (len(c))")
        if self.E is None:
            E = np.zeros((0, G.shape[1]), dtype=np.int64)
        else:
            E0 = np.asarray(self.E)
            E = as_exponents(E0, "E", rows=E0.shape[0] if E0.ndim == 2 else 1)
        if E.shape[1] != G.shape[1]:
            raise ShapeError(f"E: expected {G.shape[1]} columns, got {E.shape[1]}")
        for name, val in (("c", c), ("G", G), ("GI", GI), ("E", E)):
            object.__setattr__(self, name, _frozen(val))


@dataclass(frozen=True, eq=False)
class Zonotope(_Value):
    c: np.ndarray
    G: np.ndarray = None

    def __post_init__(self):
        c = as_vector(self.c, "c")
        G = np.zeros((c.shape[0], 0)) if self.G is None else as_matrix(self.G, "G", rows=c.shape[0])
        if G.shape[0] != c.shape[0]:
            raise ShapeError(f"G: expected {c.shape[0]} rows (len(c)), got {G.shape[0]}")
        object.__setattr__(self, "c", _frozen(c))
        object.__setattr__(self, "G", _frozen(G))


@dataclass(frozen=True, eq=False)
class ConZonotope(_Value):
    c: np.ndarray
    G: np.ndarray = None
    A: np.ndarray = None
    b: np.ndarray = None

    def __post_init__(self):
        c = as_vector(self.c, "c")
        n = c.shape[0]
        G = np.zeros((n, 0)) if self.G is None else as_matrix(self.G, "G", rows=n)
        if G.shape[0] != n:
            raise ShapeError(f"G: expected {n} rows (len(c)), got {G.shape[0]}")
        b = np.zeros(0) if self.b is None else as_vector(self.b, "b")
        A = np.zeros((b.shape[0], G.shape[1])) if self.A is None else as_matrix(self.A, "A", rows=b.shape[0])
        if A.shape[0] != b.shape[0]:
            raise ShapeError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        if A.shape[1] != G.shape[1]:
            raise ShapeError(f"A has {A.shape[1]} columns but G has {G.shape[1]}")
        for name, val in (("c", c), ("G", G), ("A", A), ("b", b)):
            object.__setattr__(self, name, _frozen(val))


def check_positive_definite(Q) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose ``Q`` and reject it unless every eigenvalue clears
    ``POS_DEF_TOL`` relative to the spectral scale."""
    values, vectors = sym_eig(Q)
    if values.size:
        scale = max(1.0, float(np.max(np.abs(values))))
        bad = values[values <= POS_DEF_TOL * scale]
        if bad.size:
            raise ValidationError(f"Q: not positive definite (eigenvalue {bad[-1]:.6g})")
    return values, vectors


@dataclass(frozen=True, eq=False)
class Ellipsoid(_Value):
    c: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        c = as_vector(self.c, "c")
        Q = as_matrix(self.Q, "Q", rows=c.shape[0])
        if Q.shape != (c.shape[0], c.shape[0]):
            raise ShapeError(f"Q: expected {c.shape[0]}x{c.shape[0]}, got {Q.shape[0]}x{Q.shape[1]}")
        check_positive_definite(Q)
        object.__setattr__(self, "c", _frozen(c))
        object.__setattr__(self, "Q", _frozen(Q))


@dataclass(frozen=True, eq=False)
class IntervalBox(_Value):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = as_vector(self.lo, "lo"), as_vector(self.hi, "hi")
        if lo.shape != hi.shape:
            raise ShapeError(f"lo has {lo.shape[0]} entries but hi has {hi.shape[0]}")
        if np.any(lo > hi):
            raise ValidationError("IntervalBox: lo must not exceed hi")
        object.__setattr__(self, "lo", _frozen(lo))
        object.__setattr__(self, "hi", _frozen(hi))

    @property
    def n(self) -> int:
        return self.lo.shape[0]

    def intervals(self) -> list[Interval]:
        return [Interval(a, b) for a, b in zip(self.lo, self.hi)]

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))


@dataclass(frozen=True, eq=False)
class TaylorModel(_Value):
    """Polynomial ``sum_i coeffs[:,i] prod_k a_k^expons[k,i]`` over ``[-1,1]^p``
    plus a componentwise interval remainder."""

    coeffs: np.ndarray
    expons: np.ndarray
    remainder: tuple = field(default=())

    def __post_init__(self):
        rem = tuple(Interval.coerce(r) if not isinstance(r, (tuple, list)) else Interval(*r)
                    for r in self.remainder)
        n = len(rem)
        coeffs = as_matrix(self.coeffs, "coeffs", rows=n)
        if coeffs.shape[0] != n:
            raise ShapeError(f"remainder has {n} entries but coeffs has {coeffs.shape[0]} rows")
        E0 = np.asarray(self.expons)
        expons = as_exponents(E0, "expons", rows=E0.shape[0] if E0.ndim == 2 else (1 if E0.size else 0))
        if expons.shape[1] != coeffs.shape[1]:
            raise ShapeError(f"expons: expected {coeffs.shape[1]} columns, got {expons.shape[1]}")
        object.__setattr__(self, "coeffs", _frozen(coeffs))
        object.__setattr__(self, "expons", _frozen(expons))
        object.__setattr__(self, "remainder", rem)

    def __eq__(self, other):
        if type(other) is not TaylorModel:
            return NotImplemented
        return (
            self.coeffs.shape == other.coeffs.shape
            and np.array_equal(self.coeffs, other.coeffs)
            and self.expons.shape == other.expons.shape
            and np.array_equal(self.expons, other.expons)
            and self.remainder == other.remainder
        )


# --------------------------------------------------------------------------
# evaluation primitives


def factor_assignment(alpha, p: int) -> np.ndarray:
    """Validate a factor vector: length ``p``, entries in ``[-1, 1]`` up to
    ``FACTOR_TOL``."""
    a = np.asarray(alpha, dtype=float).reshape(-1)
    if a.shape[0] != p:
        raise ShapeError(f"factor assignment has length {a.shape[0]}, expected p={p}")
    if a.size and np.max(np.abs(a)) > 1.0 + FACTOR_TOL:
        raise ValidationError("factor assignment: entries must lie in [-1, 1]")
    return a


def monomials(alphas: np.ndarray, exps: np.ndarray) -> np.ndarray:
    """Evaluate ``prod_k a_k^exps[k,i]`` for a batch ``alphas`` of shape (N, p).

    Returns shape (N, cols).  ``0**0`` evaluates to 1.
    """
    alphas = np.atleast_2d(np.asarray(alphas, dtype=float))
    if exps.shape[0] == 0 or exps.shape[1] == 0:
        return np.ones((alphas.shape[0], exps.shape[1]))
    rows, pw = column_entries(exps)
    table = power_table(alphas, int(pw.max()))
    return np.prod(table[pw, rows], axis=1).T


def column_entries(exps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nonzero pattern of an exponent matrix, column by column.

    Returns ``(rows, powers)``, both (cols, t) with ``t`` the largest number of
    nonzeros in a column; padding slots have power 0 (row 0).
    """
    nz = exps != 0
    counts = nz.sum(axis=0)
    t = max(1, int(counts.max()) if counts.size else 1)
    cols, ks = np.nonzero(nz.T)
    start = np.cumsum(counts) - counts
    slot = np.arange(cols.size) - start[cols]
    rows = np.zeros((exps.shape[1], t), dtype=np.intp)
    powers = np.zeros((exps.shape[1], t), dtype=np.intp)
    rows[cols, slot] = ks
    powers[cols, slot] = exps[ks, cols]
    return rows, powers


def power_table(alphas: np.ndarray, top: int) -> np.ndarray:
    """``table[e, k, i] = alphas[i, k] ** e`` for ``e = 0..top`` by repeated
    products."""
    a = np.ascontiguousarray(alphas.T)
    table = np.empty((top + 1,) + a.shape)
    table[0] = 1.0
    for e in range(1, top + 1):
        table[e] = table[e - 1] * a
    return table


def _check_len(s: ConPolyZonotope, alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=float).reshape(-1)
    if a.shape[0] != s.p:
        raise ShapeError(f"factor assignment has length {a.shape[0]}, expected p={s.p}")
    return a


def eval_point(s: ConPolyZonotope, alpha) -> np.ndarray:
    """Point of the polynomial parametrization at ``alpha``; constraints are
    not consulted."""
    a = _check_len(s, alpha)
    return s.c + s.G @ monomials(a[None, :], s.E)[0]


def constraint_residual(s: ConPolyZonotope, alpha) -> np.ndarray:
    a = _check_len(s, alpha)
    return s.A @ monomials(a[None, :], s.R)[0] - s.b


def eval_points(s: ConPolyZonotope, alphas: np.ndarray) -> np.ndarray:
    """Batched :func:`eval_point`: (N, p) -> (N, n)."""
    return s.c[None, :] + monomials(alphas, s.E) @ s.G.T


def constraint_residuals(s: ConPolyZonotope, alphas: np.ndarray) -> np.ndarray:
    """Batched :func:`constraint_residual`: (N, p) -> (N, m)."""
    return monomials(alphas, s.R) @ s.A.T - s.b[None, :]


def is_witness(s: ConPolyZonotope, alpha, tol: float = WITNESS_TOL) -> bool:
    a = _check_len(s, alpha)
    if a.size and np.max(np.abs(a)) > 1.0 + FACTOR_TOL:
        return False
    r = constraint_residual(s, a)
    return bool(r.size == 0 or np.max(np.abs(r)) <= tol)


def _columns_regular(M: np.ndarray) -> bool:
    if M.shape[1] == 0:
        return True
    if not np.all(M.any(axis=0)):
        return False
    return np.unique(M, axis=1).shape[1] == M.shape[1]


def is_regular(s: ConPolyZonotope) -> bool:
    """Columns of ``E`` pairwise distinct and nonzero, and likewise for ``R``."""
    return _columns_regular(s.E) and _columns_regular(s.R)


def representation_size(s: ConPolyZonotope) -> int:
    n, p, h, m, q = s.n, s.p, s.h, s.m, s.q
    return (n + p) * h + n + (m + p) * q + m


def example_cpz() -> ConPolyZonotope:
    """The two-dimensional, three-factor CPZ with one polynomial constraint
    ``a2 - 0.5 a1 a3 + 0.5 a1^2 = 0.5`` used throughout the docs and tests."""
    return ConPolyZonotope(
        c=[0.0, 0.0],
        G=[[1, 0, 1, -1], [0, 1, 1, 1]],
        E=[[1, 0, 1, 2], [0, 1, 1, 0], [0, 0, 1, 1]],
        A=[[1, -0.5, 0.5]],
        b=[0.5],
        R=[[0, 1, 2], [1, 0, 0], [0, 1, 0]],
    )


def singleton(v: Sequence[float]) -> ConPolyZonotope:
    return ConPolyZonotope(c=v)
