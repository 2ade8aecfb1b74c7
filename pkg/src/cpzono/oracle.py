"""Witness sampling and factor-lifting checks.

Deciding whether a point lies in a CPZ means solving a system of polynomial
equations over a box, so the package never claims to.  Instead every closed
form is validated through *witnesses*: factor vectors inside ``[-1, 1]^p``
that satisfy the constraints to ``WITNESS_TOL``.

Random stream
-------------
Proposals come from xorshift64* so that any implementation can reproduce
them bit for bit.  With all arithmetic modulo 2**64::

    state  = splitmix64(seed), or 0x9E3779B97F4A7C15 if that is zero
    step:    x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27
    output:  ((x * 0x2545F4914F6CDD1D) >> 11) * 2**-53     # uniform in [0, 1)

    splitmix64(z): z += 0x9E3779B97F4A7C15
                   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
                   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
                   return z ^ (z >> 31)

A proposal for a ``p``-factor set consumes ``p`` consecutive outputs ``u`` and
maps each to ``2 u - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import ops
from .regularize import compact
from .sets import (
    FACTOR_TOL,
    WITNESS_TOL,
    ConPolyZonotope,
    constraint_residual,
    constraint_residuals,
    eval_point,
    column_entries,
    eval_points,
    monomials,
    power_table,
)

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class XorShift64Star:
    """Seedable xorshift64* generator (recurrence in the module docstring)."""

    def __init__(self, seed: int = 0):
        self.state = _splitmix64(int(seed) & _MASK) or _GOLDEN

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self.state = x
        return ((x * 0x2545F4914F6CDD1D) & _MASK) >> 11

    def uniform(self, k: int) -> np.ndarray:
        """``k`` doubles in [0, 1)."""
        x = self.state
        out = [0] * k
        for i in range(k):
            x ^= x >> 12
            x ^= (x << 25) & _MASK
            x ^= x >> 27
            out[i] = ((x * 0x2545F4914F6CDD1D) & _MASK) >> 11
        self.state = x
        return np.array(out, dtype=np.float64) * 2.0**-53


@dataclass(frozen=True)
class WitnessSampleConfig:
    """Sampler settings.

    ``reject_tol`` is the residual (inf-norm) a raw proposal must meet to be
    polished at all; ``math.inf`` polishes every proposal.
    """

    draws: int = 10_000
    reject_tol: float = math.inf
    polish_steps: int = 25
    seed: int = 0

    def __post_init__(self):
        if self.draws < 1:
            raise ValueError("draws must be at least 1")
        if not self.reject_tol > 0:
            raise ValueError("reject_tol must be positive")
        if self.polish_steps < 0:
            raise ValueError("polish_steps must be nonnegative")


# --------------------------------------------------------------------------
# Gauss-Newton polish


def _jacobian(s: ConPolyZonotope, alphas: np.ndarray) -> np.ndarray:
    """d residual / d alpha, shape (N, m, p), differentiated monomial by
    monomial over the nonzero exponents of each constraint column."""
    N, p = alphas.shape
    m, q = s.A.shape
    rows, pw = column_entries(s.R)
    t = rows.shape[1]
    table = power_table(alphas, int(pw.max()))
    vals = table[pw, rows]  # (q, t, N)
    ones = np.ones((q, 1, N))
    prefix = np.cumprod(np.concatenate([ones, vals[:, :-1]], axis=1), axis=1)
    suffix = np.cumprod(np.concatenate([ones, vals[:, :0:-1]], axis=1), axis=1)[:, ::-1]
    dvals = pw[:, :, None] * table[np.maximum(pw - 1, 0), rows] * prefix * suffix
    # scatter d monomial_j / d alpha_k into J[:, r, k] with weight A[r, j]
    W = np.zeros((q, t, m, p))
    jj, tt = np.nonzero(pw)
    W[jj, tt, :, rows[jj, tt]] = s.A[:, jj].T
    J = dvals.reshape(q * t, N).T @ W.reshape(q * t, m * p)
    return J.reshape(N, m, p)


def _inf_norm(r: np.ndarray) -> np.ndarray:
    return np.max(np.abs(r), axis=1) if r.shape[1] else np.zeros(r.shape[0])


_POLISH_TARGET = 1e-13
_AT_BOUND = 1.0 - 1e-15


def _gn_step(J: np.ndarray, r: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """Minimum-norm Gauss-Newton step, with factors pinned at a bound and
    pushed outward removed from the system."""
    free = np.ones(alphas.shape, dtype=bool)
    step = np.zeros_like(alphas)
    m = J.shape[1]
    for _ in range(3):
        Jf = J * free[:, None, :]
        JJt = Jf @ np.transpose(Jf, (0, 2, 1))
        damp = 1e-13 * (1.0 + np.trace(JJt, axis1=1, axis2=2))
        JJt = JJt + damp[:, None, None] * np.eye(m)[None]
        y = np.linalg.solve(JJt, -r[:, :, None])
        step = (np.transpose(Jf, (0, 2, 1)) @ y)[:, :, 0]
        blocked = free & (np.abs(alphas) >= _AT_BOUND) & (step * alphas > 0)
        if not blocked.any():
            break
        free &= ~blocked
    return step * free


def polish(s: ConPolyZonotope, alphas: np.ndarray, steps: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Projected Gauss-Newton on the constraint residual.

    Each iteration tries the doubled step as well as the plain one (the
    doubled step restores fast convergence on squared terms such as the
    union's pinning constraint) and halves on failure.  Each sample keeps its
    best iterate, so the residual never increases.  Returns (polished
    alphas, residual inf-norm before, after).
    """
    alphas = np.array(alphas, dtype=float, copy=True)
    r = constraint_residuals(s, alphas)
    before = _inf_norm(r)
    best, best_alpha = before.copy(), alphas.copy()
    active = np.flatnonzero(before > _POLISH_TARGET)
    for _ in range(steps):
        if active.size == 0:
            break
        a, ra = alphas[active], r[active]
        step = _gn_step(_jacobian(s, a), ra, a)
        cur = np.sum(ra**2, axis=1)
        new_a, new_r, new_n = a, ra, cur
        for t in (2.0, 1.0, 0.5, 0.25, 0.125, 0.0625):
            if t < 1.0 and not (new_n >= cur).any():
                break
            cand = np.clip(a + t * step, -1.0, 1.0)
            cand_r = constraint_residuals(s, cand)
            cand_n = np.sum(cand_r**2, axis=1)
            take = cand_n < new_n
            new_a = np.where(take[:, None], cand, new_a)
            new_r = np.where(take[:, None], cand_r, new_r)
            new_n = np.where(take, cand_n, new_n)
        stalled = new_n >= cur
        alphas[active], r[active] = new_a, new_r
        res = _inf_norm(new_r)
        improved = res < best[active]
        best[active[improved]] = res[improved]
        best_alpha[active[improved]] = new_a[improved]
        active = active[~stalled & (res > _POLISH_TARGET)]
    return best_alpha, before, best


def propose(s: ConPolyZonotope, cfg: WitnessSampleConfig) -> np.ndarray:
    rng = XorShift64Star(cfg.seed)
    return (2.0 * rng.uniform(cfg.draws * s.p) - 1.0).reshape(cfg.draws, s.p)


_CHUNK = 4096


def sample_witnesses_array(s: ConPolyZonotope, cfg: WitnessSampleConfig) -> np.ndarray:
    """:func:`sample_witnesses` as an (N, p) array."""
    alphas = propose(s, cfg)
    if s.m == 0:
        return alphas
    keep = []
    for lo in range(0, cfg.draws, _CHUNK):
        chunk = alphas[lo:lo + _CHUNK]
        raw = _inf_norm(constraint_residuals(s, chunk))
        cand = chunk[raw <= cfg.reject_tol]
        if cand.shape[0] == 0:
            continue
        polished, _, after = polish(s, cand, cfg.polish_steps)
        inside = np.all(np.abs(polished) <= 1.0 + FACTOR_TOL, axis=1) if s.p else np.ones(len(after), bool)
        keep.append(polished[(after <= WITNESS_TOL) & inside])
    return np.vstack(keep) if keep else np.zeros((0, s.p))


def sample_witnesses(s: ConPolyZonotope, cfg: WitnessSampleConfig) -> list[np.ndarray]:
    """Monte Carlo approximation of the feasible factor domain.

    Uniform proposals over ``[-1, 1]^p`` (seeded stream), residual
    prefilter at ``cfg.reject_tol``, projected Gauss-Newton polish, and final
    acceptance at ``WITNESS_TOL``.  May return an empty list.
    """
    return list(sample_witnesses_array(s, cfg))


def point_cloud(s: ConPolyZonotope, cfg: WitnessSampleConfig) -> np.ndarray:
    """Points of ``s`` at sampled witnesses, one row per witness."""
    W = sample_witnesses_array(s, cfg)
    if W.shape[0] == 0:
        return np.zeros((0, s.n))
    return eval_points(s, W)


# --------------------------------------------------------------------------
# witness liftings


@dataclass
class WitnessMapReport:
    op_kind: str
    checked: int
    max_residual: float
    max_point_error: float
    tol: float = WITNESS_TOL
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and self.max_residual <= self.tol and self.max_point_error <= self.tol

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.op_kind}: {self.checked} liftings, max residual "
                f"{self.max_residual:.3e}, max point error {self.max_point_error:.3e}")


def _lift_pair(w1, w2):
    return np.concatenate([w1, w2])


def _union_liftings(s1: ConPolyZonotope, s2: ConPolyZonotope, w1, w2):
    p1, p2 = max(s1.p, 1), max(s2.p, 1)
    a1 = np.zeros(p1)
    a1[:s1.p] = w1
    a2 = np.zeros(p2)
    a2[:s2.p] = w2
    from_1 = np.concatenate([[1.0, 1.0], a1, np.zeros(p2)])
    from_2 = np.concatenate([[-1.0, -1.0], np.zeros(p1), a2])
    return [(from_1, eval_point(s1, w1)), (from_2, eval_point(s2, w2))]


def liftings(op_kind: str, operands: Sequence[ConPolyZonotope], witnesses: Sequence, **params):
    """(lifted factor vector, expected point) pairs for one tuple of operand
    witnesses.  Expected points come straight from the set-level definition
    of each operation, not from the result's parametrization."""
    if op_kind == "linmap":
        (s,), (w,) = operands, witnesses
        M = np.asarray(params["M"], dtype=float)
        return [(np.asarray(w, float), M @ eval_point(s, w))]
    if op_kind == "quadmap":
        (s,), (w,) = operands, witnesses
        x = eval_point(s, w)
        return [(np.asarray(w, float), np.array([x @ np.asarray(Q, float) @ x for Q in params["Q"]]))]
    s1, s2 = operands
    w1, w2 = (np.asarray(w, float) for w in witnesses)
    if op_kind == "minksum":
        return [(_lift_pair(w1, w2), eval_point(s1, w1) + eval_point(s2, w2))]
    if op_kind == "cartprod":
        return [(_lift_pair(w1, w2), np.concatenate([eval_point(s1, w1), eval_point(s2, w2)]))]
    if op_kind == "convhull":
        out = []
        for lam in np.atleast_1d(params.get("lam", [-1.0, 0.0, 1.0])):
            x = 0.5 * (1 + lam) * eval_point(s1, w1) + 0.5 * (1 - lam) * eval_point(s2, w2)
            out.append((np.concatenate([w1, w2, [lam]]), x))
        return out
    if op_kind == "intersect":
        # caller guarantees both witnesses name the same point
        return [(_lift_pair(w1, w2), eval_point(s1, w1))]
    if op_kind == "union":
        return _union_liftings(s1, s2, w1, w2)
    raise ValueError(f"unknown op_kind {op_kind!r}; expected one of {sorted(OP_KINDS)}")


def apply_op(op_kind: str, operands: Sequence[ConPolyZonotope], **params) -> ConPolyZonotope:
    if op_kind == "linmap":
        return ops.linear_map(params["M"], operands[0])
    if op_kind == "quadmap":
        return ops.quadratic_map(params["Q"], operands[0])
    try:
        fn = OP_KINDS[op_kind]
    except KeyError:
        raise ValueError(f"unknown op_kind {op_kind!r}; expected one of {sorted(OP_KINDS)}") from None
    return fn(*operands)


OP_KINDS: dict[str, Callable] = {
    "linmap": ops.linear_map,
    "quadmap": ops.quadratic_map,
    "minksum": ops.minkowski_sum,
    "cartprod": ops.cartesian_product,
    "convhull": ops.convex_hull,
    "intersect": ops.intersect,
    "union": ops.union,
}


def check_witness_map(op_kind: str, operands: Sequence[ConPolyZonotope], witness_sets: Sequence[Sequence],
                      tol: float = WITNESS_TOL, result: ConPolyZonotope | None = None,
                      **params) -> WitnessMapReport:
    """Apply ``op_kind`` to ``operands`` and verify the documented lifting of
    every operand-witness tuple in ``witness_sets``."""
    if op_kind not in OP_KINDS:
        raise ValueError(f"unknown op_kind {op_kind!r}; expected one of {sorted(OP_KINDS)}")
    out = apply_op(op_kind, operands, **params) if result is None else result
    report = WitnessMapReport(op_kind, 0, 0.0, 0.0, tol)
    for ws in witness_sets:
        for alpha, expected in liftings(op_kind, operands, ws, **params):
            res = constraint_residual(out, alpha)
            r = float(np.max(np.abs(res))) if res.size else 0.0
            e = float(np.max(np.abs(eval_point(out, alpha) - expected))) if expected.size else 0.0
            report.checked += 1
            report.max_residual = max(report.max_residual, r)
            report.max_point_error = max(report.max_point_error, e)
            if r > tol or e > tol:
                report.failures.append((alpha, r, e))
    return report


# --------------------------------------------------------------------------
# random operands with planted witnesses


def random_cpz(rng: np.random.Generator, n: int, p: int, h: int, m: int, q: int,
               max_exp: int = 2) -> tuple[ConPolyZonotope, np.ndarray]:
    """Random regular CPZ together with one planted witness.

    ``b`` is chosen so that a uniformly drawn factor vector satisfies the
    constraints; compaction may shrink ``h`` and ``q``.
    """
    alpha = rng.uniform(-1.0, 1.0, size=p)
    c = rng.normal(size=n)
    G = rng.normal(size=(n, h))
    E = rng.integers(0, max_exp + 1, size=(p, h)) if p else np.zeros((0, h), np.int64)
    A = rng.normal(size=(m, q))
    R = rng.integers(0, max_exp + 1, size=(p, q)) if p else np.zeros((0, q), np.int64)
    b = A @ monomials(alpha[None, :], R)[0]
    return compact(ConPolyZonotope(c, G, E, A, b, R)), alpha
