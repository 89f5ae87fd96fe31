"""Greedy permutation by nearest-neighbour probing.

Each step probes the point of the uncovered domain farthest from the centers
found so far, adds the returned neighbour to the centers and carves out the
ball around the probe that the answer certifies empty. The uncovered region is
tracked with an adaptive grid of hypercube cells over ``[0, 1]^d``; farthest
points are approximated by live-cell centers.
"""
from dataclasses import dataclass, field
import itertools
import math
import os

import numpy as np

from . import _kernels
from .geometry import (
    TOL, Ball, Cell, UsageError, as_point, as_points, diameter, dist, face_grid_cones,
    face_grid_size, directions_covered,
)
from .oracles import OracleStats

DEFAULT_MAX_CELLS = 1 << 22


def _max_cells_from_env():
    raw = os.environ.get("PXPROBE_MAX_CELLS")
    return int(raw) if raw else DEFAULT_MAX_CELLS


class CarvedDomain:
    """Adaptive cell decomposition of ``[0, 1]^d`` minus the carved balls.

    Live cells cover every uncovered point. A cell dies when the closed cell
    lies strictly inside one carved (open) ball. Cells crossing a ball's
    boundary are split until their diameter is at most ``rho`` times that
    ball's radius, or ``max_depth`` / the cell cap is reached.

    Cells live in a slot pool; removed slots are flagged and compacted lazily.
    Each slot caches the distance from its center to the attached centers.
    """

    def __init__(self, dim, rho=0.25, max_depth=20, initial_depth=1, max_cells=None):
        if dim < 1:
            raise UsageError("dimension must be >= 1")
        if not rho > 0:
            raise UsageError("rho must be positive")
        if not 0 <= initial_depth <= max_depth:
            raise UsageError("need 0 <= initial_depth <= max_depth")
        self.dim = int(dim)
        self.rho = float(rho)
        self.max_depth = int(max_depth)
        self.max_cells = int(max_cells if max_cells is not None else _max_cells_from_env())
        m = 1 << initial_depth
        if m ** self.dim > self.max_cells:
            raise UsageError("initial grid exceeds the cell cap")
        self.ball_centers = np.empty((0, self.dim))
        self.ball_radii = np.empty(0)
        self.dead_lows = []
        self.dead_depths = []
        self.capped = False
        self._g = np.empty((0, self.dim))
        cap = max(64, m ** self.dim)
        self._lows = np.zeros((cap, self.dim))
        self._ctr = np.zeros((cap, self.dim))
        self._sides = np.zeros(cap)
        self._depths = np.zeros(cap, dtype=np.int64)
        self._live = np.zeros(cap, dtype=np.uint8)
        self._mind = np.full(cap, -np.inf)
        self._n = 0
        self._nlive = 0
        ticks = np.arange(m) / m
        grid = np.stack(np.meshgrid(*([ticks] * self.dim), indexing="ij"), -1)
        self._append(grid.reshape(-1, self.dim), np.full(m ** self.dim, initial_depth))

    # pool bookkeeping
    def _reserve(self, extra):
        need = self._n + extra
        if need <= len(self._sides):
            return
        if self._nlive + extra <= len(self._sides) // 2:
            self._compact()
            return
        cap = max(need, 2 * len(self._sides))
        for name, fill in (("_lows", 0.0), ("_ctr", 0.0), ("_sides", 0.0), ("_depths", 0),
                           ("_live", 0), ("_mind", -np.inf)):
            old = getattr(self, name)
            shape = (cap,) + old.shape[1:]
            grown = np.full(shape, fill, dtype=old.dtype)
            grown[:self._n] = old[:self._n]
            setattr(self, name, grown)

    def _compact(self):
        keep = np.flatnonzero(self._live[:self._n])
        k = len(keep)
        for name in ("_lows", "_ctr", "_sides", "_depths", "_live", "_mind"):
            arr = getattr(self, name)
            arr[:k] = arr[keep]
        self._live[k:self._n] = 0
        self._mind[k:self._n] = -np.inf
        self._n = k

    def _append(self, lows, depths):
        k = len(lows)
        if k == 0:
            return
        self._reserve(k)
        a, b = self._n, self._n + k
        depths = np.asarray(depths, dtype=np.int64)
        sides = np.ldexp(1.0, -depths)
        self._lows[a:b] = lows
        self._ctr[a:b] = lows + (sides / 2)[:, None]
        self._sides[a:b] = sides
        self._depths[a:b] = depths
        self._live[a:b] = 1
        if len(self._g):
            self._mind[a:b] = _kernels.nearest_many(self._g, self._ctr[a:b])[1]
        else:
            self._mind[a:b] = np.inf
        self._n = b
        self._nlive += k

    def _remove(self, slots):
        self._live[slots] = 0
        self._mind[slots] = -np.inf
        self._nlive -= len(slots)

    def _bury(self, lows, depths):
        if len(lows):
            self.dead_lows.append(np.array(lows))
            self.dead_depths.append(np.array(depths))

    def _children(self, lows, depths):
        offsets = np.array(list(itertools.product((0.0, 1.0), repeat=self.dim)))
        half = np.ldexp(1.0, -(depths + 1))
        kids = lows[:, None, :] + offsets[None, :, :] * half[:, None, None]
        return (np.ascontiguousarray(kids.reshape(-1, self.dim)),
                np.repeat(depths + 1, len(offsets)))

    def _can_split(self, n_new):
        if self._nlive + n_new > self.max_cells:
            self.capped = True
            return False
        return True

    # views of the live cells
    def _live_slots(self):
        return np.flatnonzero(self._live[:self._n])

    @property
    def live_count(self):
        return self._nlive

    @property
    def lows(self):
        return self._lows[self._live_slots()]

    @property
    def depths(self):
        return self._depths[self._live_slots()]

    @property
    def sides(self):
        return self._sides[self._live_slots()]

    @property
    def centers(self):
        return self._ctr[self._live_slots()]

    def cells(self):
        return [Cell(lo, sd) for lo, sd in zip(self.lows, self.sides)]

    def dead_cells(self):
        if not self.dead_lows:
            return np.empty((0, self.dim)), np.empty(0)
        return (np.concatenate(self.dead_lows),
                np.ldexp(1.0, -np.concatenate(self.dead_depths)))

    # mutation
    def carve(self, ball):
        """Remove the open ball from the uncovered region. Zero radius is a no-op."""
        c = as_point(ball.center)
        r = float(ball.radius)
        if len(c) != self.dim:
            raise UsageError("ball dimension does not match the domain")
        if r <= 0:
            return
        n = self._n
        limit = self.rho * r
        inside, split, _ = _kernels.carve_scan(
            self._lows[:n], self._sides[:n], self._depths[:n], self._live[:n],
            c, r, limit, self.max_depth)
        self._bury(self._lows[inside], self._depths[inside])
        self._remove(inside)
        pend_lows, pend_depths = self._lows[split], self._depths[split]
        self._remove(split)
        sqrt_d = math.sqrt(self.dim)
        ball_c, ball_r = c[None, :], np.array([r])
        while len(pend_lows):
            if not self._can_split(len(pend_lows) << self.dim):
                self._append(pend_lows, pend_depths)
                break
            kids, kd = self._children(pend_lows, pend_depths)
            ks = np.ldexp(1.0, -kd)
            dead = _kernels.inside_any_ball(kids, ks, ball_c, ball_r)
            alive = np.flatnonzero(~dead)
            if len(self.ball_radii) and len(alive):
                dead[alive] = _kernels.inside_any_ball(
                    kids[alive], ks[alive], self.ball_centers, self.ball_radii)
            self._bury(kids[dead], kd[dead])
            kids, kd, ks = kids[~dead], kd[~dead], ks[~dead]
            near, _ = _kernels.cell_ball_distances(kids, ks, c)
            more = (near < r) & (ks * sqrt_d > limit) & (kd < self.max_depth)
            self._append(kids[~more], kd[~more])
            pend_lows, pend_depths = kids[more], kd[more]
        self.ball_centers = np.vstack([self.ball_centers, ball_c])
        self.ball_radii = np.append(self.ball_radii, r)

    def _split_slots(self, slots):
        slots = slots[self._depths[slots] < self.max_depth]
        if len(slots) == 0 or not self._can_split(len(slots) << self.dim):
            return False
        lows, depths = self._lows[slots], self._depths[slots]
        self._remove(slots)
        kids, kd = self._children(lows, depths)
        dead = _kernels.inside_any_ball(kids, np.ldexp(1.0, -kd), self.ball_centers, self.ball_radii)
        self._bury(kids[dead], kd[dead])
        self._append(kids[~dead], kd[~dead])
        return True

    def refine_at(self, q):
        """Split the live cells whose closed box contains ``q``."""
        q = as_point(q)
        s = self._live_slots()
        lo = self._lows[s]
        hi = lo + self._sides[s][:, None]
        hit = np.all((lo - TOL <= q) & (q <= hi + TOL), axis=1)
        return self._split_slots(s[hit])

    def _centers_covered(self, slots):
        """Mask over ``slots``: cell center inside some carved open ball."""
        if not len(self.ball_radii):
            return np.zeros(len(slots), dtype=bool)
        diff = self._ctr[slots][:, None, :] - self.ball_centers[None, :, :]
        return (np.einsum("ijk,ijk->ij", diff, diff) < self.ball_radii ** 2).any(axis=1)

    def attach(self, G):
        """Bring the cached center distances up to date with the center list ``G``."""
        G = as_points(G)
        k, n = len(self._g), self._n
        if len(G) >= k and np.array_equal(G[:k], self._g):
            for g in G[k:]:
                _kernels.min_dist_update(self._ctr[:n], g, self._mind[:n])
        else:
            s = self._live_slots()
            self._mind[s] = _kernels.nearest_many(G, self._ctr[s])[1]
        self._g = G.copy()

    def _argmax(self):
        mind = self._mind[:self._n]
        m = mind.max()
        cand = np.flatnonzero(mind >= m - TOL)
        if len(cand) > 1:
            return int(cand[np.lexsort(self._ctr[cand].T[::-1])[0]])
        return int(cand[0])


_BATCH = 64


def farthest_live_point(dom, G, refine=False, slack=None):
    """Live-cell center farthest from ``G``.

    Returns ``(q, r)`` with ``r = dist_to_set(q, G)``, or ``None`` when no live
    cell remains. Ties go to the lexicographically smallest center.

    With ``refine`` the decomposition is first sharpened around the answer: a
    winning cell whose center is already carved away is split, and so is every
    cell whose distance bound ``r(center) + half diagonal`` exceeds
    ``(1 + slack) * r``. On return the center is uncovered and ``r`` is within a
    factor ``1 + slack`` (default ``rho / 2``) of the farthest uncovered point,
    unless the depth or cell cap stopped the splitting.
    """
    G = as_points(G)
    if len(G) == 0:
        raise UsageError("farthest_live_point needs a nonempty center set")
    if dom.live_count == 0:
        return None
    dom.attach(G)
    kappa = dom.rho / 2 if slack is None else float(slack)
    while dom.live_count:
        if refine:
            # split covered cells that outrank the best uncovered candidate
            mind = dom._mind[:dom._n]
            k = min(_BATCH, dom._n)
            cand = np.argpartition(-mind, k - 1)[:k]
            cand = cand[np.isfinite(mind[cand])]
            bad = dom._centers_covered(cand) & (dom._depths[cand] < dom.max_depth)
            top = mind[cand[~bad]].max() if (~bad).any() else -np.inf
            split = cand[bad & (mind[cand] >= top)]
            if len(split) and dom._split_slots(split):
                continue
        j = dom._argmax()
        m = float(dom._mind[j])
        if not refine or m <= TOL:
            break
        n = dom._n
        over = _kernels.bound_scan(dom._mind[:n], dom._sides[:n], dom._depths[:n],
                                   dom.dim, dom.max_depth, (1 + kappa) * m)
        if len(over) and dom._split_slots(over):
            continue
        break
    if dom.live_count == 0:
        return None
    j = dom._argmax()
    return dom._ctr[j].copy(), float(dom._mind[j])


def carve(dom, ball):
    dom.carve(ball)


@dataclass
class Step:
    q: np.ndarray
    nnp: np.ndarray
    r: float
    carve_radius: float
    reported: float


@dataclass
class GreedyTrace:
    mode: str
    eps: float | None
    steps: list = field(default_factory=list)
    stats: OracleStats = field(default_factory=OracleStats)
    complete: bool = False
    domain: CarvedDomain | None = None

    @property
    def centers(self):
        return np.array([s.nnp for s in self.steps])

    @property
    def probe_count(self):
        return len(self.steps)

    @property
    def radii(self):
        return np.array([s.r for s in self.steps])

    def as_dict(self):
        out = {"mode": self.mode}
        if self.eps is not None:
            out["eps"] = self.eps
        out["steps"] = [{"q": s.q.tolist(), "nnp": s.nnp.tolist(), "r": s.r,
                         "carve_radius": s.carve_radius} for s in self.steps]
        out["probe_count"] = self.probe_count
        out["live_cells_remaining"] = self.domain.live_count if self.domain else None
        out["complete"] = self.complete
        return out


def explore(oracle, iterations, mode="exact", eps=None, rho=0.25, max_depth=20,
            initial_depth=1, max_cells=None, refine=True):
    """Run the probing greedy permutation for ``iterations`` probes.

    ``mode`` is ``"exact"`` (carve the full NN ball) or ``"ann"`` (carve with
    radius ``(1 - eps)`` times the reported distance). The trace is shorter than
    ``iterations`` only when no live cell remains, with ``complete`` set.
    ``refine`` sharpens the cells before each selection (see
    :func:`farthest_live_point`); turning it off gives the plain cell-center rule.
    """
    if iterations < 1:
        raise UsageError("iterations must be >= 1")
    if mode not in ("exact", "ann"):
        raise UsageError(f"unknown mode {mode!r}")
    if mode == "ann" and not (eps is not None and 0 < eps < 1):
        raise UsageError("ann mode needs 0 < eps < 1")
    dom = CarvedDomain(oracle.dim, rho=rho, max_depth=max_depth,
                       initial_depth=initial_depth, max_cells=max_cells)
    trace = GreedyTrace(mode=mode, eps=eps if mode == "ann" else None, domain=dom)

    def probe(q):
        ans = oracle.nn_query(q) if mode == "exact" else oracle.ann_query(q, eps)
        trace.stats.count("exact" if mode == "exact" else "ann")
        shrink = 1.0 if mode == "exact" else 1.0 - eps
        return ans, shrink * ans.distance

    q = np.full(oracle.dim, 0.5)
    ans, radius = probe(q)
    G = [ans.point]
    trace.steps.append(Step(q, ans.point, float(dist(q, ans.point)), radius, ans.distance))
    dom.carve(Ball(q, radius))
    if radius <= 0:
        dom.refine_at(q)
    for _ in range(iterations - 1):
        found = farthest_live_point(dom, np.array(G), refine=refine)
        if found is None:
            trace.complete = True
            break
        q, r = found
        ans, radius = probe(q)
        trace.steps.append(Step(q, ans.point, r, radius, ans.distance))
        G.append(ans.point)
        dom.carve(Ball(q, radius))
        if radius <= 0:
            dom.refine_at(q)
    return trace


def covering_radius(P, centers):
    """Largest distance from a point of ``P`` to its nearest center."""
    _, d = _kernels.nearest_many(as_points(centers), as_points(P))
    return float(d.max())


# Diameter and cone counts ------------------------------------------------

def cone_count(d):
    """Number of cones of angular diameter at most pi/12 covering all directions.

    d=1: the two rays. d=2: 24 equal sectors. d>=3: the face-grid cover of
    ``[-1, 1]^d`` with grid side ``1/(12 sqrt d)``.
    """
    if d < 1:
        raise UsageError("dimension must be >= 1")
    if d == 1:
        return 2
    if d == 2:
        return 24
    return 2 * d * face_grid_size(1.0 / (12 * math.sqrt(d))) ** (d - 1)


def planar_sector_cones(count=24):
    """Axes and half angles of ``count`` equal angular sectors in the plane."""
    ang = (np.arange(count) + 0.5) * 2 * math.pi / count
    axes = np.stack([np.cos(ang), np.sin(ang)], 1)
    return axes, np.full(count, math.pi / count)


def verify_cone_count(d, samples=10_000, seed=0):
    """Sampled coverage check of the cover behind ``cone_count(d)``."""
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(samples, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    if d == 1:
        return True
    if d == 2:
        axes, halves = planar_sector_cones()
    else:
        axes, halves, _ = face_grid_cones(d, 1.0 / (12 * math.sqrt(d)))
        assert len(axes) == cone_count(d)
    return bool(directions_covered(u, axes, halves).all())


@dataclass
class DiameterEstimate:
    estimate: float
    centers_diameter: float
    last_radius: float
    iterations: int
    probes: int
    single_center: bool
    trace: GreedyTrace = None

    def as_dict(self):
        return {"estimate": self.estimate, "centers_diameter": self.centers_diameter,
                "last_radius": self.last_radius, "iterations": self.iterations,
                "probes": self.probes, "single_center": self.single_center}


def estimate_diameter(oracle, d=None, **explore_kw):
    """Constant-factor diameter estimate from ``cone_count(d) + 1`` probes.

    Returns ``max(diameter of returned centers, last carve radius r_m)``.
    """
    d = oracle.dim if d is None else d
    m = cone_count(d) + 1
    trace = explore(oracle, m, **explore_kw)
    C = np.unique(trace.centers, axis=0)
    cd = diameter(C)
    r_m = float(trace.steps[-1].r)
    return DiameterEstimate(max(cd, r_m), cd, r_m, m, trace.probe_count, len(C) == 1, trace)


@dataclass(frozen=True)
class SpreadEstimate:
    diam_domain: float
    min_pairwise: float
    phi: float


def spread(P, domain_diameter=None):
    """Domain diameter over minimum pairwise distance (unit cube by default)."""
    P = as_points(P)
    if len(P) < 2:
        raise UsageError("spread needs at least two points")
    dd = math.sqrt(P.shape[1]) if domain_diameter is None else float(domain_diameter)
    best = np.inf
    for i in range(len(P) - 1):
        diff = P[i + 1:] - P[i]
        best = min(best, float(np.sqrt(np.einsum("ij,ij->i", diff, diff).min())))
    if best <= 0:
        raise UsageError("duplicate points: spread is undefined")
    return SpreadEstimate(dd, best, dd / best)
