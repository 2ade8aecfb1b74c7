import numpy as np
import pytest

from cpzono.convert import (
    SIMPLEX_VERTICES,
    ellipsoid_witness,
    from_con_zonotope,
    from_ellipsoid,
    from_interval,
    from_poly_zonotope,
    from_taylor_model,
    from_zonotope,
    simplex_fixture_P,
    to_cpz,
)
from cpzono.linalg import Interval, ShapeError, ValidationError
from cpzono.oracle import WitnessSampleConfig, point_cloud, sample_witnesses_array
from cpzono.regularize import compact_gen
from cpzono.sets import (
    ConZonotope,
    Ellipsoid,
    IntervalBox,
    PolyZonotope,
    TaylorModel,
    Zonotope,
    constraint_residual,
    eval_point,
    eval_points,
    is_witness,
    monomials,
)


def _check_witness(s, alpha, x, tol=1e-9):
    assert is_witness(s, alpha, tol)
    assert np.max(np.abs(eval_point(s, alpha) - x)) <= tol


def test_poly_zonotope_examples(rng):
    pz = PolyZonotope([1.0, 2.0], [[1.0, 2.0], [0.0, 1.0]], None, [[1, 2]])
    s = from_poly_zonotope(pz)
    np.testing.assert_array_equal(s.G, pz.G)
    np.testing.assert_array_equal(s.E, pz.E)
    assert s.m == 0

    s = from_poly_zonotope(PolyZonotope([0.0], GI=[[1.0]]))
    np.testing.assert_array_equal(s.c, [0])
    np.testing.assert_array_equal(s.G, [[1]])
    np.testing.assert_array_equal(s.E, [[1]])

    for _ in range(1000):
        pz = PolyZonotope(rng.normal(size=2), rng.normal(size=(2, 3)), rng.normal(size=(2, 2)),
                          rng.integers(0, 3, size=(1, 3)))
        s = from_poly_zonotope(pz)
        a, b = rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 2)
        x = pz.c + pz.G @ monomials(a[None], pz.E)[0] + pz.GI @ b
        _check_witness(s, np.concatenate([a, b]), x)


def test_con_zonotope_examples(rng):
    s = from_con_zonotope(ConZonotope([0.0, 0.0], np.eye(2)))
    np.testing.assert_array_equal(s.E, np.eye(2))
    assert s.m == 0

    s = from_con_zonotope(ConZonotope([0.0], [[1.0]], [[1.0]], [0.5]))
    assert is_witness(s, [0.5])
    assert not is_witness(s, [0.4])
    np.testing.assert_array_equal(eval_point(s, [0.5]), [0.5])

    for _ in range(1000):
        G, A = rng.normal(size=(3, 4)), rng.normal(size=(2, 4))
        alpha = rng.uniform(-1, 1, 4)
        cz = ConZonotope(rng.normal(size=3), G, A, A @ alpha)
        _check_witness(from_con_zonotope(cz), alpha, cz.c + G @ alpha)


def test_zonotope_examples(rng):
    s = from_zonotope([0.0, 0.0], np.eye(2))
    np.testing.assert_array_equal(s.E, np.eye(2))
    s = compact_gen(from_zonotope([0.0, 0.0], [[1.0, 0.0], [0.0, 0.0]]))
    assert s.h == 1
    with pytest.raises(ShapeError):
        from_zonotope([0.0, 0.0], np.ones((3, 1)))
    for _ in range(1000):
        c, g = rng.normal(size=2), rng.normal(size=(2, 3))
        a = rng.uniform(-1, 1, 3)
        _check_witness(from_zonotope(c, g), a, c + g @ a)


@pytest.mark.parametrize("lo, hi, c, g", [
    ([-1, -1], [1, 1], [0, 0], np.eye(2)),
    ([0, 1], [2, 1], [1, 1], np.diag([1.0, 0.0])),
    ([0], [2], [1], [[1.0]]),
])
def test_interval_examples(lo, hi, c, g):
    s = from_interval(IntervalBox(lo, hi))
    np.testing.assert_array_equal(s.c, c)
    np.testing.assert_array_equal(s.G, g)


def test_interval_witnesses(rng):
    for _ in range(1000):
        lo = rng.normal(size=3)
        hi = lo + rng.uniform(0, 2, 3)
        s = from_interval(IntervalBox(lo, hi))
        x = rng.uniform(lo, hi)
        alpha = np.divide(x - s.c, np.diag(s.G), out=np.zeros(3), where=np.diag(s.G) > 0)
        _check_witness(s, alpha, x)


def test_taylor_model_examples(rng):
    t = TaylorModel([[1.0]], [[2]], remainder=(Interval(-0.1, 0.1),))
    s = from_taylor_model(t)
    np.testing.assert_array_equal(s.c, [0])
    np.testing.assert_array_equal(s.G, [[1, 0.1]])
    np.testing.assert_array_equal(s.E, [[2, 0], [0, 1]])

    s = compact_gen(from_taylor_model(TaylorModel(np.zeros((1, 0)), np.zeros((1, 0)), (Interval(1, 1),))))
    np.testing.assert_array_equal(s.c, [1])
    assert s.h == 0

    for _ in range(1000):
        coeffs = rng.normal(size=(2, 3))
        expons = rng.integers(0, 3, size=(2, 3))
        lo = rng.normal(size=2)
        hi = lo + rng.uniform(0.01, 1, 2)
        t = TaylorModel(coeffs, expons, tuple(Interval(a, b) for a, b in zip(lo, hi)))
        s = from_taylor_model(t)
        a = rng.uniform(-1, 1, 2)
        r = rng.uniform(lo, hi)
        mid, rad = 0.5 * (lo + hi), s.G[:, -2:].diagonal()
        # remainder factors follow the polynomial factors
        _check_witness(s, np.concatenate([a, (r - mid) / rad]), coeffs @ monomials(a[None], expons)[0] + r)


def test_ellipsoid_examples():
    s = from_ellipsoid(Ellipsoid([0.0, 0.0], np.eye(2)))
    np.testing.assert_array_equal(np.abs(s.G), np.eye(2))
    np.testing.assert_array_equal(s.A, [[-0.5, 1, 1]])
    np.testing.assert_array_equal(s.b, [0.5])
    np.testing.assert_array_equal(s.R, [[0, 2, 0], [0, 0, 2], [1, 0, 0]])

    s = from_ellipsoid(Ellipsoid([0.0, 0.0], np.diag([4.0, 1.0])))
    np.testing.assert_array_equal(np.abs(s.G), np.diag([2.0, 1.0]))


def test_ellipsoid_rejects_indefinite():
    with pytest.raises(ValidationError, match="eigenvalue"):
        Ellipsoid([0, 0], [[1.0, 2.0], [2.0, 1.0]])


def _random_spd(rng, n):
    B = rng.normal(size=(n, n))
    return B @ B.T + 0.1 * np.eye(n)


def test_ellipsoid_boundary_witnesses(rng):
    for _ in range(20):
        n = int(rng.integers(1, 6))
        e = Ellipsoid(rng.normal(size=n), _random_spd(rng, n))
        s = from_ellipsoid(e)
        L = np.linalg.cholesky(e.Q)
        for _ in range(50):
            u = rng.normal(size=n)
            x = e.c + L @ (u / np.linalg.norm(u))
            alpha = ellipsoid_witness(e, x)
            assert abs(alpha[-1] - 1.0) <= 1e-9
            _check_witness(s, alpha, x)


def test_ellipsoid_interior_samples(rng):
    e = Ellipsoid([1.0, -1.0, 0.5], _random_spd(rng, 3))
    pts = point_cloud(from_ellipsoid(e), WitnessSampleConfig(draws=1000, seed=7))
    assert len(pts) > 500
    d = pts - e.c
    forms = np.einsum("ij,jk,ik->i", d, np.linalg.inv(e.Q), d)
    assert forms.max() <= 1 + 1e-9


def test_simplex_fixture():
    P = simplex_fixture_P()
    np.testing.assert_allclose(eval_point(P, [1, 1]), [-1, 1], atol=0)
    # vertex (0,-1) gathers ~2e3 r^2 samples per 1e4 draws within distance r,
    # so reaching 1e-2 reliably takes 1e5 draws
    pts = point_cloud(P, WitnessSampleConfig(draws=100_000, seed=3))
    # inside the three half-spaces of the triangle
    V = SIMPLEX_VERTICES
    for i in range(3):
        a, b, o = V[i], V[(i + 1) % 3], V[(i + 2) % 3]
        nrm = np.array([b[1] - a[1], a[0] - b[0]])
        side = np.sign(nrm @ (o - a))
        assert np.all(side * ((pts - a) @ nrm) >= -1e-12)
    for v in V:
        assert np.min(np.linalg.norm(pts - v, axis=1)) <= 1e-2


def test_simplex_fixture_vertices_exact():
    P = simplex_fixture_P()
    corners = eval_points(P, np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], float))
    np.testing.assert_allclose(corners, [[-1, 1], [-1, 1], [0, -1], [1, 0]], atol=1e-15)


def test_to_cpz_dispatch():
    assert to_cpz(Zonotope([0.0], [[1.0]])).E.tolist() == [[1]]
    with pytest.raises(TypeError):
        to_cpz("nope")
