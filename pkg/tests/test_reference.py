import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from pxprobe.geometry import UsageError
from pxprobe.reference import (
    convex_hull_2d, exact_extremal, exact_hull_distance, gonzalez, interior_margin_at_least,
    min_norm_point,
)


def test_gonzalez_examples(rng):
    g = gonzalez([[0, 0], [1, 0], [0.4, 0]], 2)
    np.testing.assert_array_equal(g.centers, [[0, 0], [1, 0]])
    assert g.radius(2) == pytest.approx(0.4)
    P = rng.random((25, 2))
    assert gonzalez(P, 25).radii[-1] == 0
    with pytest.raises(UsageError):
        gonzalez(P, 0)
    with pytest.raises(UsageError):
        gonzalez(P, 26)


def test_gonzalez_covers_and_is_monotone(rng):
    P = rng.random((100, 2))
    g = gonzalez(P, 100)
    assert np.all(np.diff(g.radii) <= 1e-15)
    assert len(set(g.indices.tolist())) == 100
    for k in range(1, 101):
        d = np.sqrt(((P[:, None, :] - g.centers[None, :k]) ** 2).sum(-1)).min(axis=1)
        assert d.max() <= g.radius(k) + 1e-12


def test_gonzalez_two_approximation_on_line():
    # evenly spaced points: r_opt(2) = 0.25 on [0, 1]
    P = np.linspace(0, 1, 101)[:, None]
    g = gonzalez(P, 2)
    assert 0.25 <= g.radius(2) <= 0.5


def test_exact_extremal_examples(square):
    np.testing.assert_array_equal(exact_extremal(square, [1, 0]), [1, 0])
    np.testing.assert_array_equal(exact_extremal(square, np.array([1, 1]) / math.sqrt(2)), [1, 1])
    with pytest.raises(UsageError):
        exact_extremal(np.empty((0, 2)), [1, 0])


@given(hnp.arrays(np.float64, st.tuples(st.integers(1, 30), st.just(3)),
                  elements=st.floats(-5, 5)),
       hnp.arrays(np.float64, 3, elements=st.floats(-1, 1)).filter(lambda v: np.linalg.norm(v) > 0.1))
def test_exact_extremal_dominates(P, v):
    v = v / np.linalg.norm(v)
    z = exact_extremal(P, v)
    assert np.all(P @ v <= v @ z + 1e-12)


def test_hull_distance_examples(square):
    assert exact_hull_distance([0.5, 0.5], square) == 0
    assert exact_hull_distance([2, 0.5], square) == pytest.approx(1)
    assert exact_hull_distance([1.5, 1.5], square) == pytest.approx(0.7071067811865476)
    for q, want in (([0.5, 0.5], 0), ([2, 0.5], 1), ([1.5, 1.5], math.sqrt(0.5))):
        assert exact_hull_distance(q, square, method="wolfe") == pytest.approx(want, abs=1e-9)


def test_degenerate_hulls():
    assert exact_hull_distance([1, 1], [[0, 0]]) == pytest.approx(math.sqrt(2))
    seg = [[0, 0], [2, 0], [1, 0]]
    assert len(convex_hull_2d(seg)) == 2
    assert exact_hull_distance([1, 1], seg) == pytest.approx(1)
    assert exact_hull_distance([1, 0], seg) == pytest.approx(0)


def test_polygon_and_wolfe_agree(rng):
    for _ in range(300):
        P = rng.random((int(rng.integers(1, 30)), 2))
        q = rng.uniform(-0.5, 1.5, 2)
        a = exact_hull_distance(q, P)
        b = exact_hull_distance(q, P, method="wolfe")
        assert abs(a - b) <= 1e-6


def test_wolfe_bracket_and_certificate(rng):
    for d in (3, 5, 8):
        P = rng.normal(size=(150, d))
        for _ in range(20):
            q = rng.normal(size=d) * 3
            r = min_norm_point(q, P)
            assert r.lower <= r.distance + 1e-12
            assert r.distance - r.lower <= 1e-7
            assert np.all(r.weights >= 0) and abs(r.weights.sum() - 1) <= 1e-9
            assert np.abs(r.weights @ P - r.point).max() <= 1e-9


def test_interior_margin():
    P = np.array([[0, 0], [4, 0], [0, 4], [4, 4]], float)
    assert interior_margin_at_least([2, 2], P, 1.9)
    assert not interior_margin_at_least([2, 2], P, 2.1)
    cube = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], float)
    # the cross-polytope test is conservative: certified margins are real
    assert interior_margin_at_least([0.5, 0.5, 0.5], cube, 0.25)
    assert not interior_margin_at_least([0.5, 0.5, 0.5], cube, 0.3)
