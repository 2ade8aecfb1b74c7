import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cpzono.regularize import compact, compact_con, compact_gen, unique_columns
from cpzono.sets import (
    ConPolyZonotope,
    constraint_residuals,
    eval_points,
    example_cpz,
    is_regular,
)


def test_unique_columns_examples():
    u, g = unique_columns(np.array([[1, 1], [0, 0]]))
    np.testing.assert_array_equal(u, [[1], [0]])
    assert g == [[0, 1]]
    u, g = unique_columns(np.array([[1, 0, 1], [0, 1, 0]]))
    np.testing.assert_array_equal(u, [[1, 0], [0, 1]])
    assert g == [[0, 2], [1]]
    u, g = unique_columns(np.zeros((2, 0), int))
    assert u.shape == (2, 0) and g == []


def test_unique_columns_first_appearance_order():
    u, g = unique_columns(np.array([[2, 0, 1, 0, 2]]))
    np.testing.assert_array_equal(u, [[2, 0, 1]])
    assert g == [[0, 4], [1, 3], [2]]


def test_compact_gen_examples():
    s = compact_gen(ConPolyZonotope([0.0], [[1, 2]], [[1, 1]]))
    np.testing.assert_array_equal(s.G, [[3]])
    np.testing.assert_array_equal(s.E, [[1]])
    s = compact_gen(ConPolyZonotope([0.0], [[1, -1]], [[1, 1]]))
    assert s.h == 0
    ex = example_cpz()
    assert compact_gen(ex) == ex


def test_compact_gen_folds_constant_into_center():
    s = compact_gen(ConPolyZonotope([1.0], [[2.0, 3.0]], [[0, 1]]))
    np.testing.assert_array_equal(s.c, [3.0])
    np.testing.assert_array_equal(s.G, [[3.0]])


def test_compact_con_examples():
    s = compact_con(ConPolyZonotope([0.0], [[1.0]], [[1]], [[1, 2]], [0], [[1, 1]]))
    np.testing.assert_array_equal(s.A, [[3]])
    np.testing.assert_array_equal(s.R, [[1]])
    np.testing.assert_array_equal(s.b, [0])
    s = compact_con(ConPolyZonotope([0.0], [[1.0]], [[1]], [[1.0]], [0.5], [[0]]))
    assert s.q == 0
    np.testing.assert_array_equal(s.b, [-0.5])
    u = example_cpz().unconstrained()
    assert compact_con(u) == u


def _non_regular(rng):
    """Random CPZ with duplicated, constant and zero columns planted."""
    n, p = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    h, m, q = int(rng.integers(2, 7)), int(rng.integers(1, 3)), int(rng.integers(2, 7))
    E = rng.integers(0, 2, size=(p, h))
    E[:, 1] = E[:, 0]
    R = rng.integers(0, 2, size=(p, q))
    R[:, -1] = R[:, 0]
    R[:, 1] = 0
    G = rng.normal(size=(n, h))
    G[:, -1] = 0.0
    return ConPolyZonotope(rng.normal(size=n), G, E, rng.normal(size=(m, q)), rng.normal(size=m), R)


def test_regularization_invariance(rng):
    for _ in range(100):
        s = _non_regular(rng)
        assert not is_regular(s)
        alphas = rng.uniform(-1, 1, size=(1000, s.p))
        g, c = compact_gen(s), compact_con(s)
        assert np.max(np.abs(eval_points(s, alphas) - eval_points(g, alphas))) <= 1e-12
        assert np.max(np.abs(constraint_residuals(s, alphas) - constraint_residuals(c, alphas))) <= 1e-12
        assert is_regular(compact(s))
        assert compact_gen(g) == g
        assert compact_con(c) == c


@given(arrays(np.int64, st.tuples(st.integers(0, 3), st.integers(0, 8)), elements=st.integers(0, 2)))
def test_unique_columns_partition(M):
    u, groups = unique_columns(M)
    assert sorted(i for g in groups for i in g) == list(range(M.shape[1]))
    for j, g in enumerate(groups):
        for i in g:
            np.testing.assert_array_equal(M[:, i], u[:, j])
    if u.shape[1]:
        assert np.unique(u, axis=1).shape[1] == u.shape[1]
    assert [g[0] for g in groups] == sorted(g[0] for g in groups)
