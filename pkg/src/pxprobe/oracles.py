"""Nearest-neighbour probe oracles.

Every oracle answers ``nn_query(q)`` with an exact nearest point of the set it
represents and ``ann_query(q, eps)`` with a legal ``(1 + eps)``-approximate
answer. Finite sets are searched by brute force; spheres, solid ball unions and
box boundaries are infinite sets answered in closed form.

Point files are CSV with one point per row and an optional ``# dim=d`` header.
Oracle configs are JSON objects ``{"kind": ..., "params": {...}, "dim": d}``.
"""
from dataclasses import dataclass
import json
import threading

import numpy as np

from . import _kernels
from .geometry import TOL, UsageError, as_point, as_points


class OracleStats:
    """Probe counters. Increments are locked so concurrent sessions add up."""

    def __init__(self):
        self._lock = threading.Lock()
        self.exact_queries = 0
        self.ann_queries = 0

    def count(self, kind):
        with self._lock:
            if kind == "exact":
                self.exact_queries += 1
            else:
                self.ann_queries += 1

    @property
    def total(self):
        return self.exact_queries + self.ann_queries

    def as_dict(self):
        return {"exact_queries": self.exact_queries, "ann_queries": self.ann_queries}


@dataclass(frozen=True)
class NnAnswer:
    point: np.ndarray
    distance: float


class Oracle:
    """Base class: subclasses implement ``_nearest(q) -> (point, distance)``."""

    kind = None

    def __init__(self, dim):
        self.dim = int(dim)
        self.stats = OracleStats()

    def _check(self, q):
        q = as_point(q)
        if len(q) != self.dim:
            raise UsageError(f"query has dimension {len(q)}, oracle has {self.dim}")
        return q

    def nn_query(self, q):
        q = self._check(q)
        self.stats.count("exact")
        p, d = self._nearest(q)
        return NnAnswer(p, d)

    def ann_query(self, q, eps):
        if not eps > 0:
            raise UsageError("ANN factor eps must be positive")
        q = self._check(q)
        self.stats.count("ann")
        p, d = self._nearest(q)
        return NnAnswer(p, d)

    def contains(self, x, tol=1e-9):
        """Whether ``x`` belongs to the represented set (up to ``tol``)."""
        raise NotImplementedError

    def config(self):
        raise NotImplementedError


class FiniteSetOracle(Oracle):
    kind = "finite-set"

    def __init__(self, points):
        P = as_points(points)
        if len(P) == 0:
            raise UsageError("finite oracle needs at least one point")
        super().__init__(P.shape[1])
        self.points = np.ascontiguousarray(P)
        self.points.setflags(write=False)

    def _nearest(self, q):
        i, d = _kernels.nearest(self.points, q)
        return self.points[i].copy(), d

    def contains(self, x, tol=1e-9):
        diff = self.points - as_point(x)
        return bool(np.min(np.einsum("ij,ij->i", diff, diff)) <= tol * tol)

    def config(self):
        return {"kind": self.kind, "dim": self.dim,
                "params": {"points": self.points.tolist()}}


class SphereOracle(Oracle):
    """Surface of the sphere ``|x - center| = radius``."""

    kind = "sphere"

    def __init__(self, center, radius):
        c = as_point(center)
        if not radius > 0:
            raise UsageError("sphere radius must be positive")
        super().__init__(len(c))
        self.center, self.radius = c, float(radius)

    def _nearest(self, q):
        v = q - self.center
        n = float(np.linalg.norm(v))
        if n <= TOL:
            p = self.center.copy()
            p[0] += self.radius
        else:
            p = self.center + self.radius * v / n
        return p, float(np.linalg.norm(q - p))

    def contains(self, x, tol=1e-9):
        return abs(float(np.linalg.norm(as_point(x) - self.center)) - self.radius) <= tol

    def config(self):
        return {"kind": self.kind, "dim": self.dim,
                "params": {"center": self.center.tolist(), "radius": self.radius}}


class BallUnionOracle(Oracle):
    """Union of closed solid balls."""

    kind = "ball-union"

    def __init__(self, centers, radii):
        C = as_points(centers)
        r = np.asarray(radii, dtype=np.float64).ravel()
        if len(C) == 0 or len(C) != len(r):
            raise UsageError("ball union needs matching nonempty centers and radii")
        if np.any(r < 0):
            raise UsageError("ball radii must be nonnegative")
        super().__init__(C.shape[1])
        self.centers, self.radii = C, r

    def _nearest(self, q):
        best_p, best_d = None, np.inf
        for c, r in zip(self.centers, self.radii):
            v = q - c
            n = float(np.linalg.norm(v))
            p = q.copy() if n <= r else c + r * v / n
            d = float(np.linalg.norm(q - p))
            if d < best_d - TOL or (abs(d - best_d) <= TOL and tuple(p) < tuple(best_p)):
                best_p, best_d = p, d
        return best_p, best_d

    def contains(self, x, tol=1e-9):
        x = as_point(x)
        return bool(np.any(np.linalg.norm(self.centers - x, axis=1) <= self.radii + tol))

    def config(self):
        return {"kind": self.kind, "dim": self.dim,
                "params": {"centers": self.centers.tolist(), "radii": self.radii.tolist()}}


class BoxBoundaryOracle(Oracle):
    """Boundary of the axis-aligned box ``[low, high]``."""

    kind = "box-boundary"

    def __init__(self, low, high):
        lo, hi = as_point(low), as_point(high)
        if len(lo) != len(hi) or np.any(hi <= lo):
            raise UsageError("box needs low < high in every coordinate")
        super().__init__(len(lo))
        self.low, self.high = lo, hi

    def _nearest(self, q):
        base = np.clip(q, self.low, self.high)
        best_p, best_d = None, np.inf
        for j in range(self.dim):
            for bound in (self.low[j], self.high[j]):
                p = base.copy()
                p[j] = bound
                d = float(np.linalg.norm(q - p))
                if d < best_d - TOL or (abs(d - best_d) <= TOL and tuple(p) < tuple(best_p)):
                    best_p, best_d = p, d
        return best_p, best_d

    def contains(self, x, tol=1e-9):
        x = as_point(x)
        if np.any(x < self.low - tol) or np.any(x > self.high + tol):
            return False
        return bool(np.any(np.abs(x - self.low) <= tol) or np.any(np.abs(x - self.high) <= tol))

    def config(self):
        return {"kind": self.kind, "dim": self.dim,
                "params": {"low": self.low.tolist(), "high": self.high.tolist()}}


class AdversarialAnnOracle(Oracle):
    """Answers ANN queries with the worst legal point of a finite set.

    The returned point is the farthest point of P from ``q`` among those within
    ``(1 + eps)`` times the exact NN distance. Exact queries are answered
    exactly. Counts probes on its own stats; the wrapped oracle is not touched.
    """

    kind = "adversarial"

    def __init__(self, base):
        if not isinstance(base, FiniteSetOracle):
            raise UsageError("adversarial wrapper needs a finite, enumerable base set")
        super().__init__(base.dim)
        self.base = base
        self.points = base.points

    def _nearest(self, q):
        return self.base._nearest(q)

    def ann_query(self, q, eps):
        if eps < 0:
            raise UsageError("ANN factor eps must be nonnegative")
        q = self._check(q)
        self.stats.count("ann")
        i, d = _kernels.adversarial_pick(self.points, q, 1.0 + eps)
        return NnAnswer(self.points[i].copy(), d)

    def contains(self, x, tol=1e-9):
        return self.base.contains(x, tol)

    def config(self):
        cfg = self.base.config()
        cfg["adversarial"] = True
        return cfg


def adversarial_ann_query(base, q, eps):
    """One worst-legal ANN answer over the finite oracle ``base``."""
    return AdversarialAnnOracle(base).ann_query(q, eps)


# Files ---------------------------------------------------------------------

def load_points(path):
    """Read a CSV point file. Returns an (n, d) float array."""
    rows, dim = [], None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("dim="):
                    dim = int(body[4:])
                continue
            try:
                rows.append([float(x) for x in line.split(",")])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad number ({exc})") from None
    if not rows:
        raise ValueError(f"{path}: no points")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: rows have differing lengths {sorted(widths)}")
    if dim is not None and widths != {dim}:
        raise ValueError(f"{path}: header says dim={dim}, rows have {widths.pop()}")
    return as_points(rows)


def save_points(path, points):
    P = as_points(points)
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# dim={P.shape[1]}\n")
        for row in P:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def oracle_from_config(cfg):
    """Build an oracle from a parsed JSON config (or a path to one)."""
    if isinstance(cfg, (str, bytes)) or hasattr(cfg, "__fspath__"):
        with open(cfg) as fh:
            cfg = json.load(fh)
    kind = cfg.get("kind")
    params = cfg.get("params", {})
    if kind == "finite-set":
        if "path" in params:
            o = FiniteSetOracle(load_points(params["path"]))
        else:
            o = FiniteSetOracle(params["points"])
    elif kind == "sphere":
        o = SphereOracle(params["center"], params["radius"])
    elif kind == "ball-union":
        o = BallUnionOracle(params["centers"], params["radii"])
    elif kind == "box-boundary":
        o = BoxBoundaryOracle(params["low"], params["high"])
    else:
        raise UsageError(f"unknown oracle kind {kind!r}")
    if "dim" in cfg and int(cfg["dim"]) != o.dim:
        raise UsageError(f"config dim={cfg['dim']} but {kind} has dimension {o.dim}")
    if cfg.get("adversarial"):
        o = AdversarialAnnOracle(o)
    return o
