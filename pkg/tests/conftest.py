"""Shared brute-force oracles and the acceptance summary hook."""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from math import gcd

import numpy as np
import pytest

ACCEPTANCE = []  # (criterion, ok, detail), filled by test_acceptance.py

POLYGONS = {
    "square": [(0, 0), (2, 0), (2, 2), (0, 2)],
    "rectangle": [(0, 0), (3, 0), (3, 2), (0, 2)],
    "triangle": [(0, 0), (3, 0), (0, 3)],
    "nonsmooth": [(0, 0), (3, 0), (0, 2)],
    "hexagon": [(0, 0), (2, 0), (3, 1), (3, 3), (1, 3), (0, 2)],
    "kite": [(1, 0), (3, 1), (2, 3), (0, 2)],
    "septagon": [(0, 1), (1, 0), (3, 0), (4, 1), (4, 3), (2, 4), (0, 3)],
}


def polygon(name):
    from sandtrop.geometry import LatticePolygon

    return LatticePolygon(POLYGONS[name])


def random_point(poly, rnd, den=7):
    """Uniform rational interior point with denominator ``den``."""
    x0, y0, x1, y1 = poly.bbox
    while True:
        p = (Fraction(rnd.randint(int(x0 * den), int(x1 * den)), den),
             Fraction(rnd.randint(int(y0 * den), int(y1 * den)), den))
        if poly.contains_interior(p):
            return p


def random_points(poly, rnd, k, den=7):
    out = []
    while len(out) < k:
        p = random_point(poly, rnd, den)
        if p not in out:
            out.append(p)
    return out


def queue_relax(heights: dict, cells: set):
    """Reference relaxation: pop any unstable cell, topple it once, repeat.

    ``heights`` maps cell -> height. Returns (final heights, odometer, lost).
    """
    h = dict(heights)
    odo = {c: 0 for c in cells}
    lost = 0
    todo = deque(c for c in cells if h[c] >= 4)
    while todo:
        c = todo.popleft()
        if h[c] < 4:
            continue
        h[c] -= 4
        odo[c] += 1
        if h[c] >= 4:
            todo.append(c)
        x, y = c
        for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if n in cells:
                h[n] += 1
                if h[n] == 4:
                    todo.append(n)
            else:
                lost += 1
    return h, odo, lost


def state_dict(state) -> dict:
    return {c: state[c] for c in state.region.cells()}


def inside_polygon(vertices, x) -> bool:
    """Closed convex polygon membership by cross products, vertices in either orientation."""
    n = len(vertices)
    signs = set()
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        c = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])
        if c:
            signs.add(c > 0)
    return len(signs) <= 1


def raster_oracle(vertices, N) -> set:
    xs = [Fraction(v[0]) * N for v in vertices]
    ys = [Fraction(v[1]) * N for v in vertices]
    out = set()
    for x in range(int(min(xs)) - 1, int(max(xs)) + 2):
        for y in range(int(min(ys)) - 1, int(max(ys)) + 2):
            if inside_polygon(vertices, (Fraction(x, N), Fraction(y, N))):
                out.add((x, y))
    return out


def triangle_points(a, b, c) -> set:
    """Lattice points of a closed triangle by barycentric coordinates."""
    out = set()
    xs, ys = (a[0], b[0], c[0]), (a[1], b[1], c[1])
    d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            l1 = Fraction((x - a[0]) * (c[1] - a[1]) - (y - a[1]) * (c[0] - a[0]), d)
            l2 = Fraction((b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]), d)
            if l1 >= 0 and l2 >= 0 and l1 + l2 <= 1:
                out.add((x, y))
    return out


def primitive_in_triangles(pairs) -> set:
    out = set()
    for u, v in pairs:
        out |= {w for w in triangle_points((0, 0), u, v) if w != (0, 0) and gcd(*w) == 1}
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
