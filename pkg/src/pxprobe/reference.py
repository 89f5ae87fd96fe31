"""Brute-force ground truth.

Everything here is plain numpy over explicit point arrays and deliberately
avoids the compiled kernels, so tests can compare the probing algorithms
against an independent implementation.
"""
from dataclasses import dataclass
import math

import numpy as np

from .geometry import UsageError, as_point, as_points


def _lex_first(P, idx):
    """Lexicographically smallest row of ``P`` among indices ``idx``."""
    idx = np.asarray(idx)
    if len(idx) == 1:
        return int(idx[0])
    sub = P[idx]
    return int(idx[np.lexsort(sub.T[::-1])[0]])


def brute_nearest(P, q, tol=1e-12):
    """Exact nearest point of ``P`` to ``q``: (index, distance), lexicographic ties."""
    P, q = as_points(P), as_point(q)
    if len(P) == 0:
        raise UsageError("empty point set")
    d = np.sqrt(((P - q) ** 2).sum(axis=1))
    return _lex_first(P, np.flatnonzero(d <= d.min() + tol)), float(d.min())


def nearest_center_assignment(P, C, tol=1e-12):
    """Index into ``C`` of the nearest center of every point of ``P`` (lexicographic ties)."""
    P, C = as_points(P), as_points(C)
    out = np.empty(len(P), dtype=np.int64)
    for i, p in enumerate(P):
        out[i] = brute_nearest(C, p, tol)[0]
    return out


@dataclass
class GonzalezResult:
    """Greedy permutation prefix.

    ``radii[i]`` is the covering radius of the first ``i + 1`` centers, so the
    radii are non-increasing and ``radii[k - 1]`` is the k-center greedy radius.
    """

    centers: np.ndarray
    indices: np.ndarray
    radii: np.ndarray

    def radius(self, k):
        return float(self.radii[k - 1])


def gonzalez(P, k):
    """Exact farthest-point greedy on explicit points.

    The first center is the lexicographically smallest point; later ties go to
    the lexicographically smallest candidate.
    """
    P = as_points(P)
    n = len(P)
    if not 1 <= k <= n:
        raise UsageError(f"k must lie in [1, {n}]")
    first = _lex_first(P, np.arange(n))
    idx = [first]
    mind = np.sqrt(((P - P[first]) ** 2).sum(axis=1))
    radii = []
    for _ in range(1, k):
        top = mind.max()
        radii.append(float(top))
        j = _lex_first(P, np.flatnonzero(mind >= top - 1e-12))
        idx.append(j)
        mind = np.minimum(mind, np.sqrt(((P - P[j]) ** 2).sum(axis=1)))
    radii.append(float(mind.max()))
    idx = np.array(idx)
    return GonzalezResult(P[idx].copy(), idx, np.array(radii))


def exact_extremal(P, v):
    """Point of ``P`` maximizing ``v . x``; ties go to the lexicographically smallest."""
    P, v = as_points(P), as_point(v)
    if len(P) == 0:
        raise UsageError("empty point set")
    s = P @ v
    return P[_lex_first(P, np.flatnonzero(s >= s.max() - 1e-12))].copy()


# Hull distance ---------------------------------------------------------------

def convex_hull_2d(P):
    """Monotone chain. Counter-clockwise hull vertices without repetition."""
    P = np.unique(as_points(P), axis=0)
    if len(P) <= 2:
        return P

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in P:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in P[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _seg_dist(q, a, b):
    ab = b - a
    L2 = float(ab @ ab)
    t = 0.0 if L2 == 0 else min(1.0, max(0.0, float((q - a) @ ab) / L2))
    return float(np.linalg.norm(q - (a + t * ab)))


def _polygon_boundary_distance(q, H):
    m = len(H)
    if m == 1:
        return float(np.linalg.norm(q - H[0]))
    return min(_seg_dist(q, H[i], H[(i + 1) % m]) for i in range(m))


def _inside_polygon(q, H, tol=1e-12):
    if len(H) < 3:
        return False
    for i in range(len(H)):
        a, b = H[i], H[(i + 1) % len(H)]
        if (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]) < -tol:
            return False
    return True


def _hull_distance_2d(q, P):
    H = convex_hull_2d(P)
    if _inside_polygon(q, H):
        return 0.0
    return _polygon_boundary_distance(q, H)


@dataclass
class MinNormResult:
    """Min-norm-point answer for ``hull(P)`` around ``q``.

    ``point = weights @ P`` is the hull point nearest to ``q`` (up to the
    tolerance). ``lower`` is a certified lower bound from the separating
    direction ``q - point``, so the true distance lies in ``[lower, distance]``.
    """

    distance: float
    lower: float
    point: np.ndarray
    weights: np.ndarray
    iterations: int


def min_norm_point(q, P, tol=1e-9, max_iter=10_000):
    """Wolfe's minimum-norm-point algorithm on ``hull(P - q)``.

    Runs until the duality gap ``|x| - min_y (x . y)/|x|`` is at most ``tol``.
    """
    P, q = as_points(P), as_point(q)
    if len(P) == 0:
        raise UsageError("empty point set")
    Y = P - q
    n = len(Y)
    norms = (Y ** 2).sum(axis=1)
    S = [int(np.argmin(norms))]
    w = np.array([1.0])
    x = Y[S[0]].copy()
    it = 0
    for it in range(1, max_iter + 1):
        xx = float(x @ x)
        if xx <= 1e-30:
            break
        dots = Y @ x
        j = int(np.argmin(dots))
        if (xx - dots[j]) / math.sqrt(xx) <= tol or j in S:
            break
        S.append(j)
        w = np.append(w, 0.0)
        while True:
            YS = Y[S]
            k = len(S)
            A = np.zeros((k + 1, k + 1))
            A[:k, :k] = YS @ YS.T
            A[:k, k] = 1.0
            A[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            alpha = np.linalg.lstsq(A, rhs, rcond=None)[0][:k]
            if np.all(alpha > 1e-14):
                w = alpha
                break
            neg = alpha <= 1e-14
            ratios = w[neg] / np.maximum(w[neg] - alpha[neg], 1e-300)
            theta = min(1.0, float(ratios.min()))
            w = theta * alpha + (1 - theta) * w
            keep = w > 1e-14
            if keep.all():
                keep[np.argmin(w)] = False
            S = [s for s, kp in zip(S, keep) if kp]
            w = w[keep]
            w = w / w.sum()
        x = w @ Y[S]
    weights = np.zeros(n)
    weights[S] = w
    xx = float(x @ x)
    dist_ub = math.sqrt(xx)
    lower = 0.0 if xx <= 1e-30 else max(0.0, float((Y @ x).min()) / dist_ub)
    return MinNormResult(dist_ub, lower, q + x, weights, it)


def exact_hull_distance(q, P, method=None):
    """Distance from ``q`` to ``hull(P)``; 0 when ``q`` is inside.

    Planar inputs use the monotone-chain polygon unless ``method="wolfe"``;
    higher dimensions use :func:`min_norm_point`.
    """
    P, q = as_points(P), as_point(q)
    if len(P) == 0:
        raise UsageError("empty point set")
    if P.shape[1] != len(q):
        raise UsageError("dimension mismatch")
    if method is None:
        method = "polygon" if len(q) == 2 else "wolfe"
    if method == "polygon":
        return _hull_distance_2d(q, P)
    r = min_norm_point(q, P)
    return 0.0 if r.distance <= 1e-9 else r.distance


def interior_margin_at_least(q, P, margin):
    """Certify that the ball of radius ``margin`` around ``q`` lies inside ``hull(P)``.

    Planar: exact distance to the hull boundary. Higher dimensions: the
    cross-polytope with vertices ``q +- margin*sqrt(d)*e_j`` (which contains the
    ball) must lie in the hull. ``False`` may be a false negative in d >= 3.
    """
    P, q = as_points(P), as_point(q)
    d = len(q)
    if d == 2:
        H = convex_hull_2d(P)
        return _inside_polygon(q, H) and _polygon_boundary_distance(q, H) > margin
    R = margin * math.sqrt(d)
    for j in range(d):
        for s in (-1.0, 1.0):
            v = q.copy()
            v[j] += s * R
            if min_norm_point(v, P).distance > 1e-9:
                return False
    return True
