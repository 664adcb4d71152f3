"""Exact planar helpers over rationals (Fraction or gmpy2 mpq): clipping, areas, lattice points."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

from gmpy2 import mpq


def clip_halfplane(poly: list, a, b, c) -> list:
    """Sutherland-Hodgman clip of a convex CCW polygon to a*x + b*y >= c."""
    if not poly:
        return poly
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = a * p[0] + b * p[1] - c
        fq = a * q[0] + b * q[1] - c
        if fp >= 0:
            out.append(p)
        if (fp > 0 and fq < 0) or (fp < 0 and fq > 0):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return _dedupe(out)


def _dedupe(poly: list) -> list:
    out = []
    for p in poly:
        if not out or out[-1] != p:
            out.append(p)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def area2(poly: list) -> Fraction:
    """Twice the signed area."""
    n = len(poly)
    if n < 3:
        return Fraction(0)
    return sum(poly[i][0] * poly[(i + 1) % n][1] - poly[i][1] * poly[(i + 1) % n][0] for i in range(n))


def centroid(poly: list):
    """Area centroid of a convex polygon with nonzero area."""
    n = len(poly)
    a2 = area2(poly)
    cx = cy = Fraction(0)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        cr = p[0] * q[1] - q[0] * p[1]
        cx += (p[0] + q[0]) * cr
        cy += (p[1] + q[1]) * cr
    return (cx / (3 * a2), cy / (3 * a2))


def convex_hull(points) -> list:
    """Andrew's monotone chain; CCW, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def lattice_points_in_hull(points) -> list:
    """Integer points of conv(points), for integer input points."""
    hull = convex_hull(points)
    if len(hull) == 1:
        return [tuple(hull[0])]
    if len(hull) == 2:
        (x0, y0), (x1, y1) = hull
        g = math.gcd(x1 - x0, y1 - y0)
        dx, dy = (x1 - x0) // g, (y1 - y0) // g
        return [(x0 + k * dx, y0 + k * dy) for k in range(g + 1)]
    halfplanes = []
    n = len(hull)
    for i in range(n):
        p, q = hull[i], hull[(i + 1) % n]
        # left of p->q: -(qy-py) x + (qx-px) y >= -(qy-py) px + (qx-px) py
        a, b = -(q[1] - p[1]), q[0] - p[0]
        halfplanes.append((a, b, a * p[0] + b * p[1]))
    ys = [p[1] for p in hull]
    out = []
    for y in range(min(ys), max(ys) + 1):
        lo, hi = _row_interval(halfplanes, y)
        out.extend((x, y) for x in range(lo, hi + 1))
    return out


def _row_interval(halfplanes, y):
    """Integer x range with a*x + b*y >= c for all (a, b, c)."""
    lo, hi = None, None
    for a, b, c in halfplanes:
        rhs = mpq(c) - b * y
        if a > 0:
            v = rhs / a
            lo = v if lo is None or v > lo else lo
        elif a < 0:
            v = rhs / a
            hi = v if hi is None or v < hi else hi
        elif rhs > 0:
            return 1, 0
    if lo is None or hi is None:
        raise ValueError("unbounded row")
    return int(math.ceil(lo)), int(math.floor(hi))


def lattice_points_in_region(halfplanes) -> list:
    """Integer points with a*x + b*y >= c for every (a, b, c); the set must be bounded."""
    halfplanes = [(mpq(a), mpq(b), mpq(c)) for a, b, c in halfplanes]
    verts = []
    for (a1, b1, c1), (a2, b2, c2) in combinations(halfplanes, 2):
        d = a1 * b2 - a2 * b1
        if d == 0:
            continue
        x = (c1 * b2 - c2 * b1) / d
        y = (a1 * c2 - a2 * c1) / d
        if all(a * x + b * y >= c for a, b, c in halfplanes):
            verts.append((x, y))
    if not verts:
        return []
    y0 = int(math.ceil(min(v[1] for v in verts)))
    y1 = int(math.floor(max(v[1] for v in verts)))
    out = []
    for y in range(y0, y1 + 1):
        lo, hi = _row_interval(halfplanes, y)
        out.extend((x, y) for x in range(lo, hi + 1))
    return out
