"""Numeric substrate: shape-checked dense products, a cyclic Jacobi
eigensolver for symmetric matrices, and outward-rounded interval scalars.

Dense matrices and vectors are plain ``numpy`` arrays (float64); exponent
matrices are ``int64`` arrays with nonnegative entries.  Zero-sized
dimensions are legal everywhere, so a ``(2, 0)`` matrix and a ``(0, 2)``
matrix are distinct values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

SYM_TOL = 1e-9
JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-12


class ShapeError(ValueError):
    """Operand dimensions do not conform."""


class ValidationError(ValueError):
    """A value violates a type invariant (symmetry, definiteness, bounds...)."""


class ConvergenceError(RuntimeError):
    """An iterative method exhausted its iteration budget."""


class DomainError(ArithmeticError):
    """An interval operation is undefined on its arguments."""


def as_matrix(x, name: str = "matrix", rows: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a 2-D float64 array.

    A 1-D input is read as a single row unless ``rows`` says otherwise, which
    lets callers write ``[1, -0.5, 0.5]`` for a 1 x 3 matrix.
    """
    a = np.asarray(x, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        r = 1 if rows is None else rows
        a = a.reshape(r, a.size // r if r else 0)
    if a.ndim != 2:
        raise ShapeError(f"{name}: expected a matrix, got array of shape {a.shape}")
    return a


def as_vector(x, name: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim == 2 and 1 in v.shape:
        v = v.reshape(-1)
    if v.ndim != 1:
        raise ShapeError(f"{name}: expected a vector, got array of shape {v.shape}")
    return v


def as_exponents(x, name: str = "exponent matrix", rows: int | None = None) -> np.ndarray:
    a = np.asarray(x)
    if a.size and not np.all(np.equal(np.mod(a, 1), 0)):
        raise ValidationError(f"{name}: entries must be integers")
    a = as_matrix(a, name, rows).astype(np.int64)
    if a.size and a.min() < 0:
        raise ValidationError(f"{name}: entries must be nonnegative")
    return a


def mat_mul(a, b) -> np.ndarray:
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    # matmul over an empty inner dimension already yields zeros of the outer shape
    return a @ b


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0.0:
        return np.diag(a).copy(), v
    target = JACOBI_REL_TOL * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < target:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    off = float(np.linalg.norm(a - np.diag(np.diag(a))))
    if off < target:
        return np.diag(a).copy(), v
    raise ConvergenceError(
        f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps "
        f"(off-diagonal norm {off:.3e}, target {target:.3e})"
    )


def sym_eig(q) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition ``q = V diag(values) V^T`` of a symmetric matrix.

    Uses cyclic Jacobi rotations.  Eigenvalues come back in descending order
    with the matching eigenvectors as columns of ``V``.  Inputs asymmetric by
    more than ``SYM_TOL`` (absolute, entrywise) are rejected; smaller
    asymmetries are removed by averaging with the transpose.
    """
    q = as_matrix(q, "Q")
    if q.shape[0] != q.shape[1]:
        raise ValidationError(f"Q: expected a square matrix, got {q.shape[0]}x{q.shape[1]}")
    if q.size and not np.all(np.isfinite(q)):
        raise ValidationError("Q: entries must be finite")
    asym = float(np.max(np.abs(q - q.T))) if q.size else 0.0
    if asym > SYM_TOL:
        raise ValidationError(f"Q: not symmetric (max |Q - Q^T| = {asym:.3e} > {SYM_TOL:g})")
    values, vectors = _jacobi(0.5 * (q + q.T))
    order = np.argsort(-values, kind="stable")
    return values[order], vectors[:, order]


# --------------------------------------------------------------------------
# interval scalars


def _down(x: float, ulps: int = 1) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, -math.inf)
    return x


def _up(x: float, ulps: int = 1) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, math.inf)
    return x


def _sum_bounds(a: float, b: float) -> tuple[float, float]:
    s = a + b
    if not math.isfinite(s):
        if math.isinf(s) and math.isfinite(a) and math.isfinite(b):
            # finite overflow: the exact sum is finite, so the inner bound is the largest double
            return (math.nextafter(s, 0.0), s) if s > 0 else (s, math.nextafter(s, 0.0))
        return s, s
    # error-free transformation: a + b == s + err exactly
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    if err == 0.0:
        return s, s
    return (s, _up(s)) if err > 0 else (_down(s), s)


def _bracket(r: float, exact) -> tuple[float, float]:
    """Tightest float bounds around ``exact`` given its rounded value ``r``."""
    if math.isinf(r):
        return (math.nextafter(r, 0.0), r) if r > 0 else (r, math.nextafter(r, 0.0))
    fr = Fraction(r)
    if fr == exact:
        return r, r
    return (r, _up(r)) if fr < exact else (_down(r), r)


def _exact_or_widen(r: float, exact) -> tuple[float, float]:
    try:
        return _bracket(r, exact())
    except (OverflowError, ValueError):  # infinite operands
        return _down(r), _up(r)


def _prod(a: float, b: float) -> tuple[float, float]:
    if a == 0.0 or b == 0.0:
        return 0.0, 0.0
    return _exact_or_widen(a * b, lambda: Fraction(a) * Fraction(b))


def _quot(a: float, b: float) -> tuple[float, float]:
    if a == 0.0:
        return 0.0, 0.0
    return _exact_or_widen(a / b, lambda: Fraction(a) / Fraction(b))


# libm transcendental results are within one ulp; two ulps of widening keeps
# the enclosure sound without directed rounding
_LIBM_ULPS = 2


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with outward rounding on every operation."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or lo > hi:
            raise ValidationError(f"invalid interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @staticmethod
    def coerce(x) -> "Interval":
        return x if isinstance(x, Interval) else Interval(float(x), float(x))

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def rad(self) -> float:
        return 0.5 * (self.hi - self.lo)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def __contains__(self, x) -> bool:
        return self.contains(float(x))

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other) -> "Interval":
        other = Interval.coerce(other)
        lo, _ = _sum_bounds(self.lo, other.lo)
        _, hi = _sum_bounds(self.hi, other.hi)
        return Interval(lo, hi)

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        return self + (-Interval.coerce(other))

    def __rsub__(self, other) -> "Interval":
        return Interval.coerce(other) - self

    def __mul__(self, other) -> "Interval":
        other = Interval.coerce(other)
        bounds = [_prod(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(min(b[0] for b in bounds), max(b[1] for b in bounds))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        other = Interval.coerce(other)
        if other.lo <= 0.0 <= other.hi:
            raise DomainError(f"division by an interval containing zero: [{other.lo}, {other.hi}]")
        quotients = [_quot(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(min(q[0] for q in quotients), max(q[1] for q in quotients))

    def __rtruediv__(self, other) -> "Interval":
        return Interval.coerce(other) / self

    def __pow__(self, n: int) -> "Interval":
        return pow_int(self, n)


def pow_int(x: Interval, n: int) -> Interval:
    if int(n) != n or n < 0:
        raise DomainError(f"pow_int needs a nonnegative integer exponent, got {n}")
    n = int(n)
    if n == 0:
        return Interval(1.0, 1.0)
    if n == 1:
        return x

    def mag(v: float) -> tuple[float, float]:
        if v == 0.0:
            return 0.0, 0.0
        r = abs(v) ** n
        if math.isinf(r):
            return math.nextafter(r, 0.0), r
        return _exact_or_widen(r, lambda: Fraction(abs(v)) ** n)

    lo_l, lo_h = mag(x.lo)
    hi_l, hi_h = mag(x.hi)
    if n % 2:
        lo = -lo_h if x.lo < 0 else lo_l
        hi = -hi_l if x.hi < 0 else hi_h
        return Interval(lo, hi)
    if x.lo >= 0.0:
        return Interval(max(lo_l, 0.0), hi_h)
    if x.hi <= 0.0:
        return Interval(max(hi_l, 0.0), lo_h)
    return Interval(0.0, max(lo_h, hi_h))


def _libm(fn, x: float) -> tuple[float, float]:
    # sin, cos and exp are exact at zero
    y = fn(x)
    if x == 0.0:
        return y, y
    return _down(y, _LIBM_ULPS), _up(y, _LIBM_ULPS)


def _contains_critical(lo: float, hi: float, offset: float) -> bool:
    """Whether some ``offset + 2 k pi`` lies in ``[lo, hi]`` (conservatively)."""
    two_pi = 2.0 * math.pi
    slack = 4 * math.ulp(max(abs(lo), abs(hi), 1.0))
    k = math.ceil((lo - slack - offset) / two_pi)
    return offset + k * two_pi <= hi + slack


def _trig(x: Interval, fn, max_at: float, min_at: float) -> Interval:
    if x.hi - x.lo >= 2.0 * math.pi:
        return Interval(-1.0, 1.0)
    (a_lo, a_hi), (b_lo, b_hi) = _libm(fn, x.lo), _libm(fn, x.hi)
    lo, hi = min(a_lo, b_lo), max(a_hi, b_hi)
    if _contains_critical(x.lo, x.hi, max_at):
        hi = 1.0
    if _contains_critical(x.lo, x.hi, min_at):
        lo = -1.0
    return Interval(max(lo, -1.0), min(hi, 1.0))


def sin(x: Interval) -> Interval:
    return _trig(Interval.coerce(x), math.sin, 0.5 * math.pi, -0.5 * math.pi)


def cos(x: Interval) -> Interval:
    return _trig(Interval.coerce(x), math.cos, 0.0, math.pi)


def exp(x: Interval) -> Interval:
    x = Interval.coerce(x)
    return Interval(max(_libm(math.exp, x.lo)[0], 0.0), _libm(math.exp, x.hi)[1])


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "pow_int": pow_int,
    "sin": sin,
    "cos": cos,
    "exp": exp,
}


def interval_arith(op: str, *args) -> Interval:
    """Apply a named interval operation; ``pow_int`` takes ``(x, n)``."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown interval operation {op!r}; expected one of {sorted(_OPS)}") from None
    if op == "pow_int":
        x, n = args
        return fn(Interval.coerce(x), n)
    return fn(*(Interval.coerce(a) for a in args))
