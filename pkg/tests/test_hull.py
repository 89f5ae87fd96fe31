import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pxprobe.geometry import UsageError, diameter
from pxprobe.hull import (
    ExactExtremalOracle, HullConfig, WorstLegalExtremalOracle, ann_extremal, default_max_iters,
    membership, membership_ann, membership_approx_extremal, membership_exact,
)
from pxprobe.oracles import AdversarialAnnOracle, FiniteSetOracle
from pxprobe.reference import exact_extremal, exact_hull_distance, interior_margin_at_least

SQRT2 = math.sqrt(2)


def test_config_values():
    assert HullConfig(1.0, 1.0).delta_small == pytest.approx(1 / 961)
    assert HullConfig(1.0, 1.0).delta_small == pytest.approx(1.0406e-3, abs=1e-7)
    assert HullConfig(0.5, 1.0).tau == 64
    assert HullConfig(0.2, 1.0).max_iters == 200 + 3
    assert HullConfig(0.2, 1.0).budget("ann") == 4 * 203
    assert default_max_iters(1.0) == 8
    assert default_max_iters(0.1) == 800 + 4
    with pytest.raises(UsageError):
        HullConfig(0, 1)
    with pytest.raises(UsageError):
        HullConfig(0.5, 0)
    c = HullConfig(0.3, 2.0)
    assert c.tau > c.delta_big and 0 < c.delta_small < 1


def test_exact_examples(square):
    cfg = HullConfig(0.1, SQRT2)
    ext = ExactExtremalOracle(square)
    run = membership_exact([0.5, 0.5], ext, cfg, p0=[1, 1])
    assert run.verdict == "In" and run.iterations == 1
    np.testing.assert_allclose(run.iterates[1].point, [0.5, 0.5])
    run = membership_exact([1.5, 0.5], ext, cfg)
    assert run.verdict == "Out"
    assert run.certificate["kind"] == "separating-direction"
    np.testing.assert_allclose(run.certificate["direction"], [1, 0])
    assert run.certificate["max_dot"] == 1 and run.certificate["query_dot"] == 1.5
    run = membership_exact([0.5, 1.3], ext, cfg)
    assert run.verdict == "Out" and exact_hull_distance([0.5, 1.3], square) == pytest.approx(0.3)


def test_p0_is_extremal_along_e1(square):
    run = membership_exact([0.5, 0.5], ExactExtremalOracle(square), HullConfig(0.1, SQRT2))
    np.testing.assert_array_equal(run.iterates[0].point, [1, 0])
    assert run.probes == run.iterations + 1


def test_query_at_p0_is_in_immediately(square):
    cfg = HullConfig(0.2, SQRT2)
    run = membership_approx_extremal([1, 0], WorstLegalExtremalOracle(square, 0.2), cfg)
    assert run.verdict == "In" and run.iterations == 0


def test_dimension_mismatch(square):
    with pytest.raises(UsageError):
        membership_exact([0.5, 0.5, 0.5], ExactExtremalOracle(square), HullConfig(0.1, 1))


def test_ann_extremal_examples(square):
    cfg = HullConfig(0.1, SQRT2)
    ans = ann_extremal([0, 0], [1, 1], FiniteSetOracle(square), cfg)
    np.testing.assert_array_equal(ans.point, [1, 1])
    assert ans.kind == "ann-derived"
    with pytest.raises(UsageError):
        ann_extremal([0, 0], [0, 0], FiniteSetOracle(square), cfg)


def test_ann_extremal_agrees_with_exact(rng):
    P = rng.random((60, 2))
    D = diameter(P)
    cfg = HullConfig(0.2, D)
    o = FiniteSetOracle(P)
    for _ in range(1000):
        p = P[rng.integers(len(P))]
        v = rng.normal(size=2)
        v /= np.linalg.norm(v)
        z = ann_extremal(p, p + v, o, cfg).point
        assert v @ z >= v @ exact_extremal(P, v) - cfg.eps * D - 1e-9


def test_ann_membership_interior_centroid(rng):
    P = rng.random((50, 2))
    q = P.mean(axis=0)
    D = diameter(P)
    assert interior_margin_at_least(q, P, 0.2 * D)
    run = membership_ann(q, AdversarialAnnOracle(FiniteSetOracle(P)), HullConfig(0.2, D))
    assert run.verdict == "In"
    assert run.probes <= 4 * 203
    assert np.linalg.norm(run.certificate["point"] - q) <= 0.2 * D / 2
    assert run.reconstruction_error() <= 1e-9


def test_ann_membership_far_query(rng):
    P = rng.random((50, 2))
    q = np.array([2.5, 0.5])
    D = diameter(P)
    assert exact_hull_distance(q, P) > 0.2 * D
    run = membership_ann(q, AdversarialAnnOracle(FiniteSetOracle(P)), HullConfig(0.2, D))
    assert run.verdict == "Out" and not run.budget_exhausted


def test_approx_agrees_with_exact_when_oracle_is_exact(rng):
    n_checked = 0
    for _ in range(1000):
        P = rng.random((12, 2))
        D = diameter(P)
        eps = 0.25
        q = rng.uniform(-0.5, 1.5, 2)
        hd = exact_hull_distance(q, P)
        if not (hd > eps * D or interior_margin_at_least(q, P, eps * D)):
            continue
        n_checked += 1
        cfg = HullConfig(eps, D)
        a = membership_exact(q, ExactExtremalOracle(P), cfg)
        b = membership_approx_extremal(q, ExactExtremalOracle(P), cfg)
        assert a.verdict == b.verdict
    assert n_checked > 300


def test_budget_exhaustion_is_flagged(square):
    cfg = HullConfig(0.1, SQRT2, max_iters=1)
    run = membership_exact([0.4, 0.3], ExactExtremalOracle(square), cfg)
    assert run.verdict == "Out" and run.budget_exhausted and run.probes == 1


def test_front_end_modes(square):
    cfg = HullConfig(0.1, SQRT2)
    for mode in ("exact-extremal", "approx-extremal", "ann"):
        assert membership([0.5, 0.5], square, cfg, mode).verdict == "In"
        assert membership([1.5, 0.5], square, cfg, mode).verdict == "Out"
    with pytest.raises(UsageError):
        membership([0.5, 0.5], square, cfg, "oracle-of-delphi")


def test_report_fields(square):
    d = membership([1.5, 0.5], square, HullConfig(0.1, SQRT2)).as_dict()
    for key in ("verdict", "iterations", "probes", "eps", "delta_small", "tau", "certificate"):
        assert key in d


@settings(max_examples=40)
@given(st.integers(0, 100_000), st.integers(2, 8), st.integers(3, 60),
       st.sampled_from([0.1, 0.2, 0.5, 1.0]))
def test_run_invariants(seed, d, n, eps):
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(n, d))
    D = diameter(P)
    q = rng.normal(size=d) * rng.uniform(0.1, 2.0)
    cfg = HullConfig(eps, D * rng.uniform(1, 2))
    run = membership_exact(q, ExactExtremalOracle(P), cfg)
    assert run.probes <= cfg.max_iters
    assert run.reconstruction_error() <= 1e-9
    for it in run.iterates:
        assert np.all(it.weights >= -1e-12) and abs(it.weights.sum() - 1) <= 1e-9
    dists = [it.distance for it in run.iterates]
    assert all(b < a for a, b in zip(dists, dists[1:]))
    assert run.contraction_violations(D) == []
    if run.verdict == "Out" and not run.budget_exhausted:
        v = run.certificate["direction"]
        assert (P @ v).max() < v @ q - 1e-12
    if run.verdict == "In":
        assert np.linalg.norm(run.certificate["point"] - q) <= eps * cfg.delta_big
