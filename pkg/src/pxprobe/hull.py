"""Approximate convex-hull membership.

Given a query ``q`` and access to ``P`` through extremal or ANN queries, decide
whether ``q`` is inside ``hull(P)`` or at least ``eps * diam(P)`` away from it.
The iteration keeps a point ``p`` of the hull, asks for the extremal point
``z`` in the direction of ``q``, and either proves ``q`` outside (``z`` falls
short of ``q`` along the ray) or moves ``p`` to the projection of ``q`` on
segment ``p z``. Answers near the boundary may go either way.

Three extremal sources are supported: exact, ``eps/4``-approximate, and
ANN-derived (one ANN query far out along the ray).
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .geometry import (
    TOL, UsageError, as_point, as_points, diameter, dist, project_to_segment,
    projection_along_ray,
)
from .oracles import OracleStats

MODES = ("exact-extremal", "approx-extremal", "ann")


@dataclass(frozen=True)
class HullConfig:
    """Parameters of one membership run.

    Parameters
    ----------
    eps : float
        Accuracy in ``(0, 1]``.
    delta_big : float
        Diameter estimate ``Delta'`` with ``Delta <= Delta' <= 2 Delta``.
    max_iters : int, optional
        Exact-mode probe budget; defaults to ``ceil(8/eps^2) + ceil(lg(1/eps))``.
        Approximate and ANN modes get four times this.
    """

    eps: float
    delta_big: float
    max_iters: int | None = None

    def __post_init__(self):
        if not 0 < self.eps <= 1:
            raise UsageError("eps must lie in (0, 1]")
        if not self.delta_big > 0:
            raise UsageError("delta_big must be positive")
        if self.max_iters is None:
            object.__setattr__(self, "max_iters", default_max_iters(self.eps))
        if self.max_iters < 1:
            raise UsageError("max_iters must be >= 1")

    @property
    def tau(self):
        return 32.0 * self.delta_big / self.eps

    @property
    def delta_small(self):
        return self.eps ** 2 / (32.0 - self.eps) ** 2

    def budget(self, mode):
        return self.max_iters if mode == "exact-extremal" else 4 * self.max_iters


def default_max_iters(eps):
    return math.ceil(8.0 / eps ** 2 - 1e-9) + math.ceil(math.log2(1.0 / eps) - 1e-9)


@dataclass(frozen=True)
class ExtremalAnswer:
    point: np.ndarray
    kind: str


class ExactExtremalOracle:
    """Exact extremal queries over a finite set; ties go lexicographically."""

    kind = "exact"

    def __init__(self, points):
        self.points = as_points(points)
        if len(self.points) == 0:
            raise UsageError("extremal oracle needs at least one point")
        self.dim = self.points.shape[1]
        self.stats = OracleStats()

    def _pick(self, scores, cand):
        if len(cand) > 1:
            sub = self.points[cand]
            return int(cand[np.lexsort(sub.T[::-1])[0]])
        return int(cand[0])

    def query(self, v):
        v = as_point(v)
        self.stats.count("exact")
        s = self.points @ v
        i = self._pick(s, np.flatnonzero(s >= s.max() - TOL))
        return ExtremalAnswer(self.points[i].copy(), self.kind)


class WorstLegalExtremalOracle(ExactExtremalOracle):
    """The worst answer an ``(eps/4)``-approximate extremal oracle may give.

    Among points with ``v.x >= max_P v.x - slack`` it returns the one with the
    smallest ``v.x``. ``slack`` defaults to ``eps * diam(P) / 4``.
    """

    kind = "approx"

    def __init__(self, points, eps=None, slack=None):
        super().__init__(points)
        if slack is None:
            if eps is None:
                raise UsageError("give eps or slack")
            slack = eps * diameter(self.points) / 4.0
        self.slack = float(slack)

    def query(self, v):
        v = as_point(v)
        self.stats.count("approx")
        s = self.points @ v
        legal = np.flatnonzero(s >= s.max() - self.slack)
        low = s[legal].min()
        i = self._pick(s, legal[s[legal] <= low + TOL])
        return ExtremalAnswer(self.points[i].copy(), self.kind)


@dataclass
class Iterate:
    point: np.ndarray
    distance: float
    weights: np.ndarray


@dataclass
class HullRun:
    """Outcome of one membership run.

    ``iterates[i].weights`` are convex weights over ``support[:len(weights)]``.
    ``certificate`` is a dict whose ``kind`` is ``witness`` (In),
    ``separating-direction`` (exact Out), ``approx-separation`` (approximate
    Out) or ``budget`` (Out because the probe budget ran out).
    """

    verdict: str
    mode: str
    cfg: HullConfig
    query: np.ndarray
    iterates: list = field(default_factory=list)
    support: list = field(default_factory=list)
    certificate: dict | None = None
    probes: int = 0

    @property
    def iterations(self):
        return max(0, len(self.iterates) - 1)

    @property
    def budget_exhausted(self):
        return bool(self.certificate and self.certificate["kind"] == "budget")

    def reconstruction_error(self):
        """Largest ``|sum w_j s_j - p_i|`` over the recorded iterates."""
        S = np.array(self.support)
        return max(float(np.abs(it.weights @ S[:len(it.weights)] - it.point).max())
                   for it in self.iterates)

    def contraction_violations(self, diam):
        """Steps with ``d_{i-1} > eps*diam`` that miss ``d_i < (1 - eps^2/2) d_{i-1}``."""
        eps = self.cfg.eps
        out = []
        for i in range(1, len(self.iterates)):
            a, b = self.iterates[i - 1].distance, self.iterates[i].distance
            if a > eps * diam and not b < (1 - eps ** 2 / 2) * a:
                out.append(i)
        return out

    def as_dict(self):
        cert = None
        if self.certificate is not None:
            cert = {k: (v.tolist() if isinstance(v, np.ndarray) else v)
                    for k, v in self.certificate.items()}
        return {"verdict": self.verdict, "mode": self.mode, "iterations": self.iterations,
                "probes": self.probes, "budget": self.cfg.budget(self.mode),
                "budget_exhausted": self.budget_exhausted, "eps": self.cfg.eps,
                "delta_big": self.cfg.delta_big, "delta_small": self.cfg.delta_small,
                "tau": self.cfg.tau, "query": self.query.tolist(), "certificate": cert}


def _descend(q, cfg, mode, first, next_extremal, p0=None):
    """Shared loop. ``first()`` gives p_0 (one probe) unless ``p0`` is supplied."""
    q = as_point(q)
    budget = cfg.budget(mode)
    run = HullRun("Out", mode, cfg, q)
    if p0 is None:
        p = as_point(first())
        run.probes = 1
    else:
        p = as_point(p0)
    if len(p) != len(q):
        raise UsageError(f"query has dimension {len(q)}, points have {len(p)}")
    run.support = [p.copy()]
    w = np.array([1.0])
    in_thr = cfg.eps * cfg.delta_big / 2
    out_thr = cfg.eps * cfg.delta_big / 4
    while True:
        d = dist(p, q)
        run.iterates.append(Iterate(p.copy(), d, w.copy()))
        if d <= in_thr:
            run.verdict = "In"
            run.certificate = {"kind": "witness", "point": p.copy(), "distance": d,
                               "support": np.array(run.support), "weights": w.copy()}
            return run
        if run.probes >= budget:
            run.certificate = {"kind": "budget", "distance": d}
            return run
        v = (q - p) / d
        z = as_point(next_extremal(p, v))
        run.probes += 1
        s = projection_along_ray(z, p, v)
        if mode == "exact-extremal":
            if s < d - TOL:
                run.certificate = {"kind": "separating-direction", "direction": v,
                                   "max_dot": float(v @ z), "query_dot": float(v @ q)}
                return run
        elif d - s > out_thr:
            run.certificate = {"kind": "approx-separation", "direction": v, "extremal": z,
                               "shortfall": d - s}
            return run
        p_new, t = project_to_segment(q, p, z)
        w = (1 - t) * w
        hit = [j for j, sp in enumerate(run.support) if np.array_equal(sp, z)]
        if hit:
            w[hit[0]] += t
        else:
            run.support.append(z.copy())
            w = np.append(w, t)
        p = p_new


def _e1(dim):
    e = np.zeros(dim)
    e[0] = 1.0
    return e


def membership_exact(q, extremal, cfg, p0=None):
    """Membership with exact extremal queries. Out verdicts carry a separating direction.

    ``p_0`` is the extremal point along ``+e_1`` unless a point of P is given.
    """
    e1 = _e1(extremal.dim)
    return _descend(q, cfg, "exact-extremal", lambda: extremal.query(e1).point,
                    lambda p, v: extremal.query(v).point, p0)


def membership_approx_extremal(q, extremal, cfg, p0=None):
    """Membership with ``(eps/4)``-approximate extremal queries.

    Stops with Out before the budget only when ``z`` falls more than
    ``eps * delta_big / 4`` short of ``q`` along the ray.
    """
    e1 = _e1(extremal.dim)
    return _descend(q, cfg, "approx-extremal", lambda: extremal.query(e1).point,
                    lambda p, v: extremal.query(v).point, p0)


def ann_extremal(p_prev, q, ann_oracle, cfg):
    """Approximate extremal point in direction ``q - p_prev`` from one ANN query.

    The query sits at ``p_prev + tau * dir``; the ANN factor is ``1 + delta_small``.
    """
    p_prev, q = as_point(p_prev), as_point(q)
    n = float(np.linalg.norm(q - p_prev))
    if n == 0:
        raise UsageError("p_prev and q coincide: no direction")
    v = (q - p_prev) / n
    ans = ann_oracle.ann_query(p_prev + cfg.tau * v, cfg.delta_small)
    return ExtremalAnswer(ans.point, "ann-derived")


def membership_ann(q, ann_oracle, cfg, origin=None, p0=None):
    """Membership driven by ``(1 + delta_small)``-ANN queries only.

    ``p_0`` is the ANN answer for the point ``tau`` away from ``origin``
    (default: the unit-cube center) along ``-e_1``.
    """
    dim = ann_oracle.dim
    origin = np.full(dim, 0.5) if origin is None else as_point(origin)
    far = origin - cfg.tau * _e1(dim)

    def first():
        return ann_oracle.ann_query(far, cfg.delta_small).point

    def step(p, v):
        return ann_oracle.ann_query(p + cfg.tau * v, cfg.delta_small).point

    return _descend(q, cfg, "ann", first, step, p0)


def membership(q, P, cfg, mode="exact-extremal", ann_oracle=None):
    """Convenience front end over an explicit point set."""
    if mode == "exact-extremal":
        return membership_exact(q, ExactExtremalOracle(P), cfg)
    if mode == "approx-extremal":
        return membership_approx_extremal(q, WorstLegalExtremalOracle(P, cfg.eps), cfg)
    if mode == "ann":
        if ann_oracle is None:
            from .oracles import AdversarialAnnOracle, FiniteSetOracle
            ann_oracle = AdversarialAnnOracle(FiniteSetOracle(P))
        return membership_ann(q, ann_oracle, cfg)
    raise UsageError(f"unknown hull mode {mode!r}")
