"""k-density (balanced Voronoi) clustering.

A set of centers ``C`` taken from ``P`` is a k-density clustering when every
Voronoi cell of ``C`` holds at most ``k`` points of ``P``. Centers are found by
sampling and verifying: draw a random subset, compute the exact partition and
double the sample until it balances. The sample sizes come from the cone-cover
net argument; the verification makes every returned clustering exact.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import _kernels
from .geometry import (
    Cone, UsageError, as_points, directions_covered, face_grid_cones, face_grid_size,
)


@dataclass
class DensityClustering:
    """Centers, exact Voronoi assignment and per-cluster sizes.

    ``assignment[i]`` indexes the center of point ``i``; ``cluster_sizes[j]``
    counts the points of center ``j``. ``attempts`` lists ``(sample size,
    max cluster size)`` for every verification round.
    """

    centers: np.ndarray
    center_indices: np.ndarray
    assignment: np.ndarray
    cluster_sizes: np.ndarray
    k: int | None = None
    seed: int | None = None
    attempts: list = field(default_factory=list)

    @property
    def max_size(self):
        return int(self.cluster_sizes.max())

    @property
    def center_count(self):
        return len(self.centers)

    @property
    def balanced(self):
        return self.k is not None and self.max_size <= self.k

    def clusters(self):
        """List of point-index arrays, one per center."""
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.cumsum(self.cluster_sizes)[:-1]
        return np.split(order, bounds)

    def as_dict(self):
        return {"k": self.k, "centers": self.centers.tolist(),
                "center_indices": self.center_indices.tolist(),
                "sizes": self.cluster_sizes.tolist(), "max_size": self.max_size,
                "center_count": self.center_count, "seed": self.seed,
                "attempts": [{"sample_size": int(m), "max_size": int(s)} for m, s in self.attempts]}


def _row_index(P):
    return {tuple(row): i for i, row in reversed(list(enumerate(P.tolist())))}


def voronoi_partition(P, C, k=None):
    """Exact nearest-center partition of ``P``; ties go to the lexicographically smallest center.

    ``C`` must be a nonempty subset of the rows of ``P``.
    """
    P, C = as_points(P), as_points(C)
    if len(C) == 0:
        raise UsageError("need at least one center")
    if C.shape[1] != P.shape[1]:
        raise UsageError("centers and points differ in dimension")
    lookup = _row_index(P)
    try:
        idx = np.array([lookup[tuple(c)] for c in C.tolist()])
    except KeyError:
        raise UsageError("every center must be a point of P") from None
    assign, _ = _kernels.nearest_many(C, P)
    sizes = np.bincount(assign, minlength=len(C))
    return DensityClustering(C.copy(), idx, assign, sizes, k)


@dataclass
class ConeCover:
    """Cones with apex at the origin that together contain every direction."""

    cones: list
    angular_diameter: float
    grid_side: float

    @property
    def N(self):
        return len(self.cones)

    @property
    def axes(self):
        return np.array([c.axis for c in self.cones])

    @property
    def half_angles(self):
        return np.array([c.half_angle for c in self.cones])

    def covers(self, dirs):
        return directions_covered(dirs, self.axes, self.half_angles)


def _grid_side(d, angular_diameter):
    return angular_diameter / (math.pi / 3) / (3 * math.sqrt(d))


def cone_cover_size(d, angular_diameter=math.pi / 3):
    """``N`` of :func:`build_cone_cover` without building the cones."""
    return 2 * d * face_grid_size(_grid_side(d, angular_diameter)) ** (d - 1)


def build_cone_cover(d, angular_diameter=math.pi / 3, samples=10_000, seed=0):
    """Cones over a face grid of ``[-1, 1]^d``.

    The grid side is ``1/(3 sqrt d)`` at angular diameter ``pi/3`` and scales
    linearly for other angles. Each cone is the circular cone around a face
    cell's central direction that contains the cell. Raises ``RuntimeError`` if
    a cell is wider than requested or sampled directions escape the cover.
    """
    if d < 2:
        raise UsageError("cone covers need d >= 2")
    if not 0 < angular_diameter < math.pi / 2:
        raise UsageError("angular diameter must lie in (0, pi/2)")
    side = _grid_side(d, angular_diameter)
    axes, halves, diams = face_grid_cones(d, side)
    if diams.max() > angular_diameter + 1e-12:
        raise RuntimeError(f"face cell spans {diams.max():.4f} rad > {angular_diameter:.4f}")
    cover = ConeCover([Cone(np.zeros(d), a, h) for a, h in zip(axes, halves)],
                      angular_diameter, side)
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(samples, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    if not cover.covers(u).all():
        raise RuntimeError("cone cover misses sampled directions")
    return cover


def initial_sample_size(n, k, d, planar=False):
    """Starting sample size of the verify loop for ``eps = k / (N n)``."""
    N = cone_cover_size(d) if d >= 2 else 2
    eps = k / (N * n)
    if planar:
        return min(n, math.ceil(4 / eps))
    return min(n, math.ceil((1 / eps) * math.log(1 / eps + math.e)))


def k_density_centers(P, k, planar_mode=None, seed=0, initial_size=None, max_attempts=None):
    """Centers whose Voronoi clusters hold at most ``k`` points each.

    Parameters
    ----------
    P : (n, d) array
    k : int
        Balance bound, ``1 <= k <= n``.
    planar_mode : bool, optional
        Use the planar starting size; defaults to ``d == 2``.
    seed : int
        Seed of the sampling generator.
    initial_size : int, optional
        Override the starting sample size (the net-based default is often ``n``
        at small scale).
    max_attempts : int, optional
        Draws per sample size before doubling; defaults to one.

    Returns
    -------
    DensityClustering
        Always balanced: the loop ends at ``C = P`` at the latest.
    """
    P = as_points(P)
    n, d = P.shape
    if not 1 <= k <= n:
        raise UsageError(f"k must lie in [1, {n}]")
    if len(np.unique(P, axis=0)) != n and k < n:
        raise UsageError("duplicate points: Voronoi clusters are ambiguous")
    rng = np.random.default_rng(seed)
    if k == 1:
        out = voronoi_partition(P, P, k)
        out.attempts = [(n, out.max_size)]
    elif k == n:
        i = int(rng.integers(n))
        out = voronoi_partition(P, P[i:i + 1], k)
        out.attempts = [(1, out.max_size)]
    else:
        planar = (d == 2) if planar_mode is None else bool(planar_mode)
        m = initial_sample_size(n, k, d, planar) if initial_size is None else int(initial_size)
        m = max(1, min(n, m))
        tries = 1 if max_attempts is None else int(max_attempts)
        attempts = []
        while True:
            for _ in range(tries):
                idx = np.sort(rng.choice(n, size=m, replace=False))
                out = voronoi_partition(P, P[idx], k)
                attempts.append((m, out.max_size))
                if out.max_size <= k:
                    break
            if out.max_size <= k or m == n:
                break
            m = min(n, 2 * m)
        out.attempts = attempts
    out.seed = seed
    return out


def counterexample_set(n):
    """Points ``l_i e_i`` in ``R^n`` with ``l_i = sqrt(1 - 2^(-i-1))``, i = 1..n."""
    if n < 2:
        raise UsageError("counterexample needs n >= 2")
    ell = np.sqrt(1 - 2.0 ** (-np.arange(1, n + 1) - 1))
    return np.diag(ell)
