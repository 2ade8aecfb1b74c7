import numpy as np
import pytest

from cpzono import ops
from cpzono.convert import from_interval, from_zonotope
from cpzono.linalg import ShapeError
from cpzono.oracle import OP_KINDS, WitnessSampleConfig, check_witness_map, point_cloud, sample_witnesses_array
from cpzono.sets import (
    ConPolyZonotope,
    IntervalBox,
    constraint_residual,
    eval_point,
    eval_points,
    example_cpz,
    is_regular,
    monomials,
    singleton,
)

from conftest import random_instance


def interval(lo, hi):
    return from_interval(IntervalBox([lo], [hi]))


def test_linear_map_examples():
    s = example_cpz()
    assert ops.linear_map(np.eye(2), s) == s
    z = ops.linear_map(np.zeros((1, 2)), s)
    np.testing.assert_array_equal(z.c, [0])
    assert z.h == 0
    out = ops.linear_map([[2, 0], [0, 1]], s)
    np.testing.assert_array_equal(out.G, [[2, 0, 2, -2], [0, 1, 1, 1]])
    for f in "EAbR":
        np.testing.assert_array_equal(getattr(out, f), getattr(s, f))
    with pytest.raises(ShapeError):
        ops.linear_map(np.eye(3), s)


def test_minkowski_sum_examples():
    unit = ConPolyZonotope([0.5], [[0.5]], [[1]])
    out = ops.minkowski_sum(unit, unit)
    np.testing.assert_array_equal(out.c, [1])
    np.testing.assert_array_equal(out.G, [[0.5, 0.5]])
    np.testing.assert_array_equal(out.E, np.eye(2))
    s = example_cpz()
    shifted = ops.minkowski_sum(s, singleton([1.0, -2.0]))
    np.testing.assert_array_equal(shifted.c, [1, -2])
    np.testing.assert_array_equal(shifted.G, s.G)
    with pytest.raises(ShapeError):
        ops.minkowski_sum(s, singleton([1.0]))


def test_cartesian_product_examples():
    sq = ops.cartesian_product(interval(-1, 1), interval(-1, 1))
    np.testing.assert_array_equal(sq.c, [0, 0])
    np.testing.assert_array_equal(sq.G, np.eye(2))
    np.testing.assert_array_equal(sq.E, np.eye(2))
    s = example_cpz()
    out = ops.cartesian_product(s, singleton([7.0]))
    np.testing.assert_array_equal(out.c, [0, 0, 7])
    np.testing.assert_array_equal(out.G, np.vstack([s.G, np.zeros((1, 4))]))


def test_convex_hull_examples():
    out = ops.convex_hull(singleton([0.0]), singleton([2.0]))
    np.testing.assert_array_equal(out.c, [1])
    np.testing.assert_array_equal(out.G, [[-1]])
    np.testing.assert_array_equal(out.E, [[1]])
    same = ops.convex_hull(singleton([3.0]), singleton([3.0]))
    np.testing.assert_array_equal(same.c, [3])
    assert same.h == 0


def test_quadratic_map_examples():
    s = example_cpz()
    zero = ops.quadratic_map([np.zeros((2, 2))] * 3, s)
    np.testing.assert_array_equal(zero.c, [0, 0, 0])
    assert zero.h == 0

    out = ops.quadratic_map([[[1.0]]], interval(-1, 1))
    np.testing.assert_array_equal(out.c, [0])
    np.testing.assert_array_equal(out.G, [[1]])
    np.testing.assert_array_equal(out.E, [[2]])

    out = ops.quadratic_map([[[1.0]]], ConPolyZonotope([1.0], [[1.0]], [[1]]))
    np.testing.assert_array_equal(out.c, [1])
    np.testing.assert_array_equal(out.G, [[2, 1]])
    np.testing.assert_array_equal(out.E, [[1, 2]])
    with pytest.raises(ShapeError):
        ops.quadratic_map([np.eye(3)], s)


def test_quadratic_map_range():
    pts = point_cloud(ops.quadratic_map([[[1.0]]], interval(-1, 1)), WitnessSampleConfig(draws=2000, seed=1))
    assert pts.min() >= 0 and pts.max() <= 1
    assert pts.min() < 1e-3 and pts.max() > 0.99


def test_quadratic_map_pointwise(rng):
    for _ in range(200):
        s, w = random_instance(rng)
        Qs = [rng.normal(size=(s.n, s.n)) for _ in range(2)]
        x = eval_point(s, w)
        y = eval_point(ops.quadratic_map(Qs, s), w)
        np.testing.assert_allclose(y, [x @ Q @ x for Q in Qs], atol=1e-9, rtol=0)


def test_intersection_example():
    out = ops.intersect(interval(0, 2), interval(1, 3))
    np.testing.assert_array_equal(out.c, [1])
    np.testing.assert_array_equal(out.G, [[1]])
    np.testing.assert_array_equal(out.E, [[1], [0]])
    np.testing.assert_array_equal(out.A, [[1, -1]])
    np.testing.assert_array_equal(out.b, [1])
    W = sample_witnesses_array(out, WitnessSampleConfig(draws=5000, seed=2))
    assert W[:, 0].min() >= -1e-9 and W[:, 0].max() <= 1 + 1e-12


def test_intersection_with_itself(rng):
    for _ in range(50):
        s, w = random_instance(rng)
        out = ops.intersect(s, s)
        ww = np.concatenate([w, w])
        assert np.max(np.abs(constraint_residual(out, ww)), initial=0) <= 1e-9
        np.testing.assert_allclose(eval_point(out, ww), eval_point(s, w), atol=1e-12)


def test_intersection_sizes(rng):
    for _ in range(50):
        s1, _ = random_instance(rng, n=2)
        s2, _ = random_instance(rng, n=2)
        raw = ops.intersect(s1, s2, compacted=False)
        assert raw.q == s1.q + s2.q + s1.h + s2.h
        assert raw.m == s1.m + s2.m + 2


def test_union_selector_matches_closed_form(rng):
    for p1, p2 in [(1, 1), (2, 3), (4, 1), (3, 3)]:
        coeff, R = ops.union_selector_constraint(p1, p2)
        assert coeff.shape[1] == 2 + 2 * p1 + 2 * p2 + 2 * p1 * p2
        alphas = rng.uniform(-1, 1, size=(1000, p1 + p2 + 2))
        assembled = monomials(alphas, R) @ coeff[0]
        s1, s2 = alphas[:, 0], alphas[:, 1]
        f1 = np.mean(alphas[:, 2:2 + p1] ** 2, axis=1)
        f2 = np.mean(alphas[:, 2 + p1:] ** 2, axis=1)
        g = (1 + s1 + 0.5 * f1 * (1 - s1)) * (1 - 0.5 * f2) - s2 - 1
        assert np.max(np.abs(assembled - g)) <= 1e-12


def test_union_liftings_and_sizes(rng):
    for _ in range(100):
        s1, w1 = random_instance(rng, n=2)
        s2, w2 = random_instance(rng, n=2)
        raw = ops.union(s1, s2, compacted=False)
        assert raw.q == 1 + (2 + 2 * s1.p + 2 * s2.p + 2 * s1.p * s2.p) + s1.q + s2.q + 1
        report = check_witness_map("union", (s1, s2), [(w1, w2)])
        assert report.passed, report


def test_union_pads_points():
    out = ops.union(singleton([0.0]), singleton([1.0]))
    for lift, x in (([1, 1, 0, 0], 0.0), ([-1, -1, 0, 0], 1.0)):
        assert np.max(np.abs(constraint_residual(out, lift))) <= 1e-12
        np.testing.assert_allclose(eval_point(out, lift), [x], atol=1e-15)


def test_union_of_adjacent_intervals():
    out = ops.union(interval(-1, 0), interval(0, 1))
    pts = point_cloud(out, WitnessSampleConfig(draws=10_000, seed=5))
    assert pts.min() >= -1 - 1e-9 and pts.max() <= 1 + 1e-9
    hist, _ = np.histogram(pts, bins=20, range=(-1, 1))
    assert hist.min() > 0


def test_union_domain_separation():
    s1, s2 = interval(0, 2), interval(5, 6)
    out = ops.union(s1, s2)
    W = sample_witnesses_array(out, WitnessSampleConfig(draws=10_000, seed=11))
    assert len(W) > 9000
    sel = W[:, :2]
    first = np.all(np.abs(sel - 1) <= 1e-4, axis=1)
    second = np.all(np.abs(sel + 1) <= 1e-4, axis=1)
    assert np.all(first | second)
    assert np.all(np.abs(W[first, 2 + s1.p:]) <= 1e-4)
    assert np.all(np.abs(W[second, 2:2 + s1.p]) <= 1e-4)


@pytest.mark.parametrize("kind", ["minksum", "cartprod", "convhull", "intersect", "union"])
def test_binary_outputs_regular(kind, rng):
    for _ in range(30):
        s1, _ = random_instance(rng, n=2)
        s2, _ = random_instance(rng, n=2)
        assert is_regular(OP_KINDS[kind](s1, s2))


def test_convex_hull_lambda_grid(rng):
    for _ in range(100):
        s1, w1 = random_instance(rng, n=3)
        s2, w2 = random_instance(rng, n=3)
        assert check_witness_map("convhull", (s1, s2), [(w1, w2)], lam=[-1.0, 0.0, 1.0]).passed


def test_minkowski_sum_zonotopes(rng):
    for _ in range(100):
        z1 = from_zonotope(rng.normal(size=2), rng.normal(size=(2, 3)))
        z2 = from_zonotope(rng.normal(size=2), rng.normal(size=(2, 2)))
        w = [(rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 2)) for _ in range(10)]
        assert check_witness_map("minksum", (z1, z2), w).passed


def test_cartesian_product_points(rng):
    for _ in range(100):
        s1, w1 = random_instance(rng)
        s2, w2 = random_instance(rng)
        out = ops.cartesian_product(s1, s2)
        x = eval_points(out, np.concatenate([w1, w2])[None])[0]
        np.testing.assert_allclose(x, np.concatenate([eval_point(s1, w1), eval_point(s2, w2)]), atol=1e-12)
