"""Minimal SVG rendering of planar runs.

Exploration: live cells, carved balls, probes and centers. Hull: the point set,
its hull polygon and the iterate path. Density: points colored by cluster.
"""
from xml.sax.saxutils import escape

import numpy as np

from .geometry import UsageError, as_points

SIZE = 520
PAD = 10
PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


class _Canvas:
    def __init__(self, lo, hi, title):
        self.lo = np.asarray(lo, float)
        span = float(np.max(np.asarray(hi, float) - self.lo)) or 1.0
        self.scale = (SIZE - 2 * PAD) / span
        self.parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
                      f'viewBox="0 0 {SIZE} {SIZE}">',
                      f"<title>{escape(title)}</title>",
                      f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>']

    def xy(self, p):
        # flip y so the plot reads like a math figure
        x = PAD + (p[0] - self.lo[0]) * self.scale
        y = SIZE - PAD - (p[1] - self.lo[1]) * self.scale
        return f"{x:.3f}", f"{y:.3f}"

    def add(self, s):
        self.parts.append(s)

    def rect(self, low, side, **style):
        x, y = self.xy((low[0], low[1] + side))
        w = f"{side * self.scale:.3f}"
        self.add(f'<rect x="{x}" y="{y}" width="{w}" height="{w}" {_style(style)}/>')

    def circle(self, c, r, pixels=False, **style):
        x, y = self.xy(c)
        rr = r if pixels else r * self.scale
        self.add(f'<circle cx="{x}" cy="{y}" r="{rr:.3f}" {_style(style)}/>')

    def polyline(self, pts, closed=False, **style):
        coords = " ".join(",".join(self.xy(p)) for p in pts)
        tag = "polygon" if closed else "polyline"
        self.add(f'<{tag} points="{coords}" {_style(style)}/>')

    def text(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _style(style):
    return " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in style.items())


def _planar(P):
    P = as_points(P)
    if P.shape[1] != 2:
        raise UsageError("SVG output needs 2-D points")
    return P


def _bounds(*sets):
    allp = np.vstack([s for s in sets if len(s)])
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    m = 0.05 * max(float(np.max(hi - lo)), 1e-9)
    return lo - m, hi + m


def render_trace(trace, P=None):
    """SVG text for a planar exploration trace over the unit square."""
    dom = trace.domain
    if dom is None or dom.dim != 2:
        raise UsageError("SVG output needs a 2-D exploration")
    cv = _Canvas((0, 0), (1, 1), f"greedy exploration, {trace.probe_count} probes")
    cv.rect((0, 0), 1.0, fill="none", stroke="black", stroke_width="1")
    for lo, sd in zip(dom.lows, dom.sides):
        cv.rect(lo, sd, fill="#e8eef8", stroke="#b0c0e0", stroke_width="0.3")
    for c, r in zip(dom.ball_centers, dom.ball_radii):
        cv.circle(c, r, fill="none", stroke="#999999", stroke_width="0.6")
    if P is not None:
        for p in _planar(P):
            cv.circle(p, 1.6, pixels=True, fill="black")
    for s in trace.steps:
        cv.circle(s.q, 1.8, pixels=True, fill="#2ca02c")
    for c in trace.centers:
        cv.circle(c, 3.0, pixels=True, fill="none", stroke="#d62728", stroke_width="1.2")
    return cv.text()


def render_hull(run, P):
    """SVG text for a planar membership run: points, hull, iterate path and query."""
    from .reference import convex_hull_2d

    P = _planar(P)
    path = np.array([it.point for it in run.iterates])
    lo, hi = _bounds(P, path, run.query[None, :])
    cv = _Canvas(lo, hi, f"hull membership: {run.verdict}")
    H = convex_hull_2d(P)
    if len(H) >= 2:
        cv.polyline(H, closed=True, fill="#f2f2f2", stroke="#555555", stroke_width="1")
    for p in P:
        cv.circle(p, 1.8, pixels=True, fill="black")
    if len(path) > 1:
        cv.polyline(path, fill="none", stroke="#1f77b4", stroke_width="1.2")
    for p in path:
        cv.circle(p, 2.2, pixels=True, fill="#1f77b4")
    color = "#2ca02c" if run.verdict == "In" else "#d62728"
    cv.circle(run.query, 4.0, pixels=True, fill=color)
    return cv.text()


def render_density(clustering, P):
    """SVG text with points colored by Voronoi cluster and centers ringed."""
    P = _planar(P)
    lo, hi = _bounds(P)
    cv = _Canvas(lo, hi, f"k-density clustering, k={clustering.k}, "
                         f"{clustering.center_count} centers")
    for p, a in zip(P, clustering.assignment):
        cv.circle(p, 2.2, pixels=True, fill=PALETTE[int(a) % len(PALETTE)])
    for j, c in enumerate(clustering.centers):
        cv.circle(c, 4.5, pixels=True, fill="none",
                  stroke=PALETTE[j % len(PALETTE)], stroke_width="1.5")
    return cv.text()


def write(path, text):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
