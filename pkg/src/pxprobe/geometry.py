"""Points, balls, cones, cells and the predicates the algorithms share.

Points are plain 1-D float arrays. Comparisons use an absolute tolerance of
``TOL`` unless a function says otherwise; distance ties are broken by the
lexicographically smallest point.
"""
from dataclasses import dataclass
import itertools
import math

import numpy as np

from . import _kernels

TOL = 1e-12


class UsageError(ValueError):
    """Bad arguments: dimension mismatch, empty sets, out-of-range parameters."""


def as_point(x):
    p = np.asarray(x, dtype=np.float64).ravel()
    if p.size == 0:
        raise UsageError("a point needs at least one coordinate")
    if not np.all(np.isfinite(p)):
        raise UsageError(f"non-finite coordinates: {p}")
    return p


def as_points(xs):
    P = np.asarray(xs, dtype=np.float64)
    if P.ndim == 1:
        P = P.reshape(-1, 1) if P.size else P.reshape(0, 1)
    if P.ndim != 2:
        raise UsageError("point list must be a 2-D array (n, d)")
    if not np.all(np.isfinite(P)):
        raise UsageError("point list has non-finite coordinates")
    return P


def _same_dim(a, b):
    if a.shape[-1] != b.shape[-1]:
        raise UsageError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise UsageError("ball radius must be nonnegative")
        object.__setattr__(self, "center", as_point(self.center))

    def contains(self, x, closed=True):
        r = dist(self.center, x)
        return r <= self.radius + TOL if closed else r < self.radius


@dataclass(frozen=True)
class Cone:
    """Circular cone: ``x`` is inside iff angle(x - apex, axis) <= half_angle."""

    apex: np.ndarray
    axis: np.ndarray
    half_angle: float

    def __post_init__(self):
        axis = as_point(self.axis)
        if abs(np.linalg.norm(axis) - 1.0) > 1e-12:
            raise UsageError("cone axis must be a unit vector")
        if not 0 < self.half_angle < math.pi / 2:
            raise UsageError("cone half angle must lie in (0, pi/2)")
        object.__setattr__(self, "apex", as_point(self.apex))
        object.__setattr__(self, "axis", axis)

    def contains(self, x):
        v = as_point(x) - self.apex
        n = np.linalg.norm(v)
        if n == 0:
            return True
        c = float(np.dot(v, self.axis)) / n
        return c >= math.cos(self.half_angle) - 1e-12


@dataclass(frozen=True)
class Cell:
    """Axis-aligned hypercube ``[low, low + side]^d`` inside the unit cube."""

    low: np.ndarray
    side: float

    def __post_init__(self):
        object.__setattr__(self, "low", as_point(self.low))
        if self.side < 0:
            raise UsageError("cell side must be nonnegative")
        if np.any(self.low < -TOL) or np.any(self.low + self.side > 1 + TOL):
            raise UsageError("cell must lie inside the unit cube")

    @property
    def center(self):
        return self.low + self.side / 2

    @property
    def depth(self):
        return int(round(-math.log2(self.side))) if self.side > 0 else None

    def corners(self):
        d = len(self.low)
        return np.array([self.low + self.side * np.array(bits)
                         for bits in itertools.product((0.0, 1.0), repeat=d)])


def dist(a, b):
    """Euclidean distance between two points of the same dimension."""
    a, b = as_point(a), as_point(b)
    _same_dim(a, b)
    # hypot rescales, so tiny nonzero differences do not underflow to 0
    return math.hypot(*(a - b))


def dist_to_set(q, S):
    """Distance from ``q`` to the nearest point of ``S`` and that point's index.

    Ties within ``TOL`` go to the lexicographically smallest point.
    """
    q = as_point(q)
    S = as_points(S)
    if len(S) == 0:
        raise UsageError("dist_to_set needs a nonempty set")
    _same_dim(S, q)
    i, d = _kernels.nearest(S, q)
    return d, i


def project_to_segment(q, a, b):
    """Closest point of segment ``ab`` to ``q`` and its parameter ``t``.

    The result equals ``(1 - t) a + t b``. A degenerate segment returns ``a``
    with ``t = 0``.
    """
    q, a, b = as_point(q), as_point(a), as_point(b)
    _same_dim(q, a)
    _same_dim(a, b)
    ab = b - a
    L2 = float(np.dot(ab, ab))
    if L2 == 0.0:
        return a.copy(), 0.0
    t = min(1.0, max(0.0, float(np.dot(q - a, ab)) / L2))
    return a + t * ab, t


def projection_along_ray(x, origin, direction):
    """Signed coordinate of ``x`` projected on the line ``origin + s * direction``."""
    x, origin, direction = as_point(x), as_point(origin), as_point(direction)
    _same_dim(x, origin)
    return float(np.dot(x - origin, direction))


def farthest_corner_distance(cell, c):
    c = as_point(c)
    far = np.maximum(np.abs(c - cell.low), np.abs(c - cell.low - cell.side))
    return float(np.linalg.norm(far))


def cell_inside_ball(cell, ball, strict=False):
    """Whether every corner of ``cell`` lies in ``ball``.

    The default tests the closed ball. ``strict=True`` asks for the closed cell
    inside the open ball with a ``TOL`` margin, which is what carving uses.
    """
    far = farthest_corner_distance(cell, ball.center)
    if strict:
        return far <= ball.radius - TOL
    return far <= ball.radius + TOL


def unit_vector(v):
    v = as_point(v)
    n = np.linalg.norm(v)
    if n == 0:
        raise UsageError("zero vector has no direction")
    return v / n


def lex_smallest(points):
    """Index of the lexicographically smallest row."""
    P = as_points(points)
    return int(np.lexsort(P.T[::-1])[0])


def angle_between(u, v):
    u, v = unit_vector(u), unit_vector(v)
    return math.acos(max(-1.0, min(1.0, float(np.dot(u, v)))))


def diameter(points):
    """Brute-force diameter of a finite point list (0 for fewer than two points)."""
    P = as_points(points)
    if len(P) < 2:
        return 0.0
    best = 0.0
    for i in range(len(P) - 1):
        diff = P[i + 1:] - P[i]
        best = max(best, float(np.sqrt(np.einsum("ij,ij->i", diff, diff).max())))
    return best


# Cone covers -------------------------------------------------------------

def face_grid_size(side):
    """Cells per face edge when a face of ``[-1, 1]^d`` is gridded at most ``side`` wide."""
    return math.ceil(2.0 / side - 1e-9)


def _face_grid_cells(d, side):
    """Face cells of ``[-1, 1]^d``: yields (axis, sign, low corner in face coords, cell side)."""
    m = face_grid_size(side)
    h = 2.0 / m
    ticks = -1.0 + h * np.arange(m)
    for axis in range(d):
        for sign in (-1.0, 1.0):
            for low in itertools.product(ticks, repeat=d - 1):
                yield axis, sign, np.array(low), h


def face_grid_cones(d, grid_side):
    """Circular cones circumscribing the cones over each face cell of ``[-1,1]^d``.

    Returns (axes, half_angles, corner_diameters) where the last entry is the
    largest angle between two corner directions of each face cell.
    """
    axes, halves, diams = [], [], []
    for axis, sign, low, h in _face_grid_cells(d, grid_side):
        corners = []
        for bits in itertools.product((0.0, 1.0), repeat=d - 1):
            face = low + h * np.array(bits)
            corners.append(np.insert(face, axis, sign))
        corners = np.array(corners)
        dirs = corners / np.linalg.norm(corners, axis=1, keepdims=True)
        center = np.insert(low + h / 2, axis, sign)
        ax = center / np.linalg.norm(center)
        cosines = np.clip(dirs @ ax, -1.0, 1.0)
        halves.append(float(np.arccos(cosines.min())))
        pair = np.clip(dirs @ dirs.T, -1.0, 1.0)
        diams.append(float(np.arccos(pair.min())))
        axes.append(ax)
    return np.array(axes), np.array(halves), np.array(diams)


def directions_covered(dirs, axes, half_angles, tol=1e-12):
    """Mask over unit ``dirs``: inside at least one circular cone (apex at origin)."""
    dirs = as_points(dirs)
    out = np.zeros(len(dirs), dtype=bool)
    cos_half = np.cos(half_angles)
    step = max(1, (1 << 22) // max(1, len(axes)))
    for s in range(0, len(dirs), step):
        c = dirs[s:s + step] @ axes.T
        out[s:s + step] = (c >= cos_half[None, :] - tol).any(axis=1)
    return out
