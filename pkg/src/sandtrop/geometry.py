"""Exact lattice-polygon geometry.

Points are pairs of ``Fraction``. Lattice vectors are pairs of ``int``.
Every predicate in this module is exact; floats are rejected on input.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError

Point = tuple  # (Fraction, Fraction)
Vec = tuple  # (int, int)


# ---------------------------------------------------------------- scalars

def as_rational(value) -> Fraction:
    """Exact conversion of int, Fraction or numeric string. Floats are refused."""
    if isinstance(value, bool):
        raise DomainError("boolean is not a coordinate")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse rational {value!r}") from exc
    raise DomainError(f"expected an exact rational, got {type(value).__name__}")


def as_point(p) -> Point:
    if len(p) != 2:
        raise DomainError(f"expected a 2D point, got {p!r}")
    return (as_rational(p[0]), as_rational(p[1]))


def det(a, b):
    return a[0] * b[1] - a[1] * b[0]


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


# ---------------------------------------------------------------- vectors

def primitive_vector(v) -> Vec:
    """Shortest integer vector in the direction of the integer vector ``v``."""
    x, y = int(v[0]), int(v[1])
    if (x, y) != (v[0], v[1]):
        raise DomainError(f"{v!r} is not an integer vector")
    g = math.gcd(x, y)
    if g == 0:
        raise DomainError("zero vector has no direction")
    return (x // g, y // g)


def primitive_direction(d) -> Vec:
    """Primitive integer vector along a nonzero rational vector."""
    dx, dy = Fraction(d[0]), Fraction(d[1])
    m = math.lcm(dx.denominator, dy.denominator)
    return primitive_vector((int(dx * m), int(dy * m)))


def is_primitive(v) -> bool:
    return math.gcd(int(v[0]), int(v[1])) == 1


def is_smooth_corner(w1, w2) -> bool:
    """True iff the two lattice vectors span a unimodular cone."""
    d = det(w1, w2)
    if d == 0:
        raise DomainError(f"{w1} and {w2} are parallel")
    return abs(d) == 1


def _angle_key(v):
    # exact angular order on [0, 2pi): half-plane index then cross product
    x, y = v
    upper = y > 0 or (y == 0 and x > 0)
    return 0 if upper else 1


def sort_by_angle(vectors: Iterable[Vec]) -> list:
    from functools import cmp_to_key

    def cmp(a, b):
        ha, hb = _angle_key(a), _angle_key(b)
        if ha != hb:
            return ha - hb
        c = det(a, b)
        return -1 if c > 0 else (1 if c < 0 else 0)

    return sorted(vectors, key=cmp_to_key(cmp))


def lattice_points_in_triangle(a, b, c) -> list:
    """All integer points of the closed triangle abc (integer vertices)."""
    xs = (a[0], b[0], c[0])
    ys = (a[1], b[1], c[1])
    orient = det((b[0] - a[0], b[1] - a[1]), (c[0] - a[0], c[1] - a[1]))
    if orient == 0:
        raise DomainError("degenerate triangle")
    s = 1 if orient > 0 else -1
    out = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            ok = True
            for p, q in ((a, b), (b, c), (c, a)):
                if s * det((q[0] - p[0], q[1] - p[1]), (x - p[0], y - p[1])) < 0:
                    ok = False
                    break
            if ok:
                out.append((x, y))
    return out


# -------------------------------------------------------------------- fan

@dataclass(frozen=True)
class Fan:
    """Rays through the origin; cones sit between angular neighbours closer than pi."""

    rays: tuple

    def __init__(self, rays: Iterable[Vec]):
        uniq = {primitive_vector(r) for r in rays}
        if not uniq:
            raise DomainError("a fan needs at least one ray")
        object.__setattr__(self, "rays", tuple(sort_by_angle(uniq)))

    def cones(self) -> list:
        """Consecutive ray pairs (CCW) spanning an angle strictly below pi."""
        r = self.rays
        if len(r) < 2:
            return []
        out = []
        for i in range(len(r)):
            a, b = r[i], r[(i + 1) % len(r)]
            if det(a, b) > 0:
                out.append((a, b))
        return out

    def is_smooth(self) -> bool:
        return all(abs(det(a, b)) == 1 for a, b in self.cones())


def smooth_refinement(fan: Fan) -> Fan:
    """Add every primitive vector of each cone triangle (0, r_i, r_i+1)."""
    rays = set(fan.rays)
    for a, b in fan.cones():
        for v in lattice_points_in_triangle((0, 0), a, b):
            if v != (0, 0) and is_primitive(v):
                rays.add(v)
    return Fan(rays)


# ---------------------------------------------------------------- polygon

@dataclass(frozen=True)
class Edge:
    start: Point
    end: Point
    direction: Vec  # primitive, along start -> end
    normal: Vec  # primitive, pointing into the polygon
    offset: Fraction  # normal . x == offset on the edge, >= offset inside

    def value(self, x) -> Fraction:
        return dot(self.normal, x) - self.offset

    def lattice_length(self) -> Fraction:
        d = (self.end[0] - self.start[0], self.end[1] - self.start[1])
        k = self.direction
        return d[0] / k[0] if k[0] else d[1] / k[1]

    def euclidean_length(self) -> float:
        return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])


def _normalize_vertices(pts: list) -> list:
    uniq = []
    for p in pts:
        if p not in uniq:
            uniq.append(p)
    if len(uniq) < 3:
        raise DomainError("a polygon needs three distinct vertices")
    area2 = sum(det(uniq[i], uniq[(i + 1) % len(uniq)]) for i in range(len(uniq)))
    if area2 == 0:
        raise DomainError("polygon has zero area")
    if area2 < 0:
        uniq.reverse()
    # drop collinear vertices, which merges consecutive parallel edges
    changed = True
    while changed and len(uniq) >= 3:
        changed = False
        n = len(uniq)
        for i in range(n):
            a, b, c = uniq[i - 1], uniq[i], uniq[(i + 1) % n]
            turn = det((b[0] - a[0], b[1] - a[1]), (c[0] - b[0], c[1] - b[1]))
            if turn == 0:
                del uniq[i]
                changed = True
                break
    n = len(uniq)
    for i in range(n):
        a, b, c = uniq[i - 1], uniq[i], uniq[(i + 1) % n]
        if det((b[0] - a[0], b[1] - a[1]), (c[0] - b[0], c[1] - b[1])) < 0:
            raise DomainError("polygon is not convex")
    # a convex CCW cycle must also wind exactly once
    total = sum(det(uniq[i], uniq[(i + 1) % n]) for i in range(n))
    if total <= 0:
        raise DomainError("polygon is not convex")
    return uniq


class LatticePolygon:
    """Convex polygon with rational vertices in counter-clockwise order."""

    __slots__ = ("vertices", "edges", "__dict__")

    def __init__(self, vertices: Sequence):
        pts = _normalize_vertices([as_point(v) for v in vertices])
        object.__setattr__(self, "vertices", tuple(pts))
        edges = []
        n = len(pts)
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            d = primitive_direction((b[0] - a[0], b[1] - a[1]))
            nrm = (-d[1], d[0])
            edges.append(Edge(a, b, d, nrm, dot(nrm, a)))
        object.__setattr__(self, "edges", tuple(edges))

    def __setattr__(self, name, value):
        raise AttributeError("LatticePolygon is immutable")

    def __eq__(self, other):
        return isinstance(other, LatticePolygon) and set(self.vertices) == set(other.vertices)

    def __hash__(self):
        return hash(frozenset(self.vertices))

    def __repr__(self):
        vs = ", ".join(f"({x}, {y})" for x, y in self.vertices)
        return f"LatticePolygon([{vs}])"

    # -- predicates
    def contains(self, x) -> bool:
        return all(e.value(x) >= 0 for e in self.edges)

    def contains_interior(self, x) -> bool:
        return all(e.value(x) > 0 for e in self.edges)

    def on_boundary(self, x) -> bool:
        return self.contains(x) and not self.contains_interior(x)

    # -- derived data
    @cached_property
    def normals(self) -> tuple:
        return tuple(e.normal for e in self.edges)

    @cached_property
    def area(self) -> Fraction:
        v = self.vertices
        return sum((det(v[i], v[(i + 1) % len(v)]) for i in range(len(v))), Fraction(0)) / 2

    @cached_property
    def bbox(self):
        xs = [p[0] for p in self.vertices]
        ys = [p[1] for p in self.vertices]
        return (min(xs), min(ys), max(xs), max(ys))

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        return max(math.hypot(a[0] - b[0], a[1] - b[1]) for a in v for b in v)

    def scaled(self, k) -> "LatticePolygon":
        k = as_rational(k)
        return LatticePolygon([(x * k, y * k) for x, y in self.vertices])

    def normal_fan(self) -> Fan:
        return Fan(self.normals)

    def is_smooth(self) -> bool:
        return self.normal_fan().is_smooth()

    # -- serialisation
    def to_json(self) -> dict:
        return {"vertices": [[_rat_str(x), _rat_str(y)] for x, y in self.vertices]}

    @classmethod
    def from_json(cls, obj) -> "LatticePolygon":
        if not isinstance(obj, dict) or "vertices" not in obj:
            raise DomainError('polygon JSON needs a "vertices" list')
        verts = obj["vertices"]
        if not isinstance(verts, list):
            raise DomainError('"vertices" must be a list')
        return cls(verts)


def _rat_str(q: Fraction) -> str:
    return str(q)


def _exact_float(text: str) -> Fraction:
    return Fraction(text)


def load_polygon(path) -> LatticePolygon:
    """Read a polygon file. JSON numbers are parsed exactly, never as floats."""
    with open(path) as fh:
        try:
            obj = json.load(fh, parse_float=_exact_float)
        except json.JSONDecodeError as exc:
            raise DomainError(f"{path}: {exc}") from exc
    return LatticePolygon.from_json(obj)


def support_set(poly: LatticePolygon) -> tuple:
    """P(poly): primitive vectors of the triangles (0, n(e1), n(e2)) over adjacent edges."""
    return smooth_refinement(poly.normal_fan()).rays


def edge_weighted_distance(poly: LatticePolygon, x) -> Fraction:
    """Minimum over edges of n(e).x - offset: lattice-normalised distance to the edge lines."""
    x = as_point(x)
    if not poly.contains(x):
        raise DomainError(f"{x} lies outside the polygon")
    return min(e.value(x) for e in poly.edges)


def support_offset(poly: LatticePolygon, w) -> Fraction:
    """min over the polygon of w.q, attained at a vertex."""
    return min(dot(w, v) for v in poly.vertices)


def weighted_distance(poly: LatticePolygon, x) -> Fraction:
    """min over w in P(poly) of w.x - min_q w.q."""
    x = as_point(x)
    if not poly.contains(x):
        raise DomainError(f"{x} lies outside the polygon")
    return min(dot(w, x) - support_offset(poly, w) for w in support_set(poly))


# ----------------------------------------------------------------- region

NEIGHBOURS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class Region:
    """Lattice points of a polygon. ``mask[i, j]`` is the cell (x0 + i, y0 + j).

    The array carries a one-cell margin so every boundary cell is addressable.
    """

    origin: tuple
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.mask.setflags(write=False)

    @property
    def shape(self):
        return self.mask.shape

    def __len__(self):
        return int(self.mask.sum())

    def __contains__(self, cell) -> bool:
        i, j = cell[0] - self.origin[0], cell[1] - self.origin[1]
        return 0 <= i < self.mask.shape[0] and 0 <= j < self.mask.shape[1] and bool(self.mask[i, j])

    def index(self, cell):
        return (int(cell[0]) - self.origin[0], int(cell[1]) - self.origin[1])

    def cell(self, i, j):
        return (self.origin[0] + int(i), self.origin[1] + int(j))

    def cells(self) -> list:
        return [self.cell(i, j) for i, j in zip(*np.nonzero(self.mask))]

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        m = self.mask
        grown = np.zeros_like(m)
        grown[1:, :] |= m[:-1, :]
        grown[:-1, :] |= m[1:, :]
        grown[:, 1:] |= m[:, :-1]
        grown[:, :-1] |= m[:, 1:]
        out = grown & ~m
        out.setflags(write=False)
        return out

    def boundary(self) -> list:
        return [self.cell(i, j) for i, j in zip(*np.nonzero(self.boundary_mask))]

    def is_connected(self) -> bool:
        from scipy.ndimage import label

        _, n = label(self.mask)
        return n == 1

    @classmethod
    def from_mask(cls, mask, origin=(0, 0)) -> "Region":
        """Wrap a boolean mask, padding it with a one-cell margin."""
        m = np.asarray(mask, dtype=bool)
        if not m.any():
            raise DomainError("empty region")
        padded = np.zeros((m.shape[0] + 2, m.shape[1] + 2), dtype=bool)
        padded[1:-1, 1:-1] = m
        reg = cls((int(origin[0]) - 1, int(origin[1]) - 1), padded)
        if not reg.is_connected():
            raise DomainError("region is not edge-connected")
        return reg

    @classmethod
    def rectangle(cls, width: int, height: int) -> "Region":
        return cls.from_mask(np.ones((width, height), dtype=bool))


def rasterize(poly: LatticePolygon, scale: int) -> Region:
    """Lattice points of scale * poly, exactly, minus any cells cut off from the largest piece."""
    if isinstance(scale, bool) or not isinstance(scale, (int, np.integer)) or scale < 1:
        raise DomainError(f"scale must be a positive integer, got {scale!r}")
    big = poly.scaled(int(scale))
    x0, y0, x1, y1 = big.bbox
    ix0, ix1 = math.ceil(x0), math.floor(x1)
    iy0, iy1 = math.ceil(y0), math.floor(y1)
    if ix0 > ix1 or iy0 > iy1:
        raise DomainError("polygon contains no lattice point at this scale")
    mask = np.zeros((ix1 - ix0 + 1, iy1 - iy0 + 1), dtype=bool)
    for y in range(iy0, iy1 + 1):
        lo, hi = Fraction(ix0), Fraction(ix1)
        for e in big.edges:
            a, b = e.normal
            rhs = e.offset - b * y  # a * x >= rhs
            if a > 0:
                lo = max(lo, rhs / a)
            elif a < 0:
                hi = min(hi, rhs / a)
            elif rhs > 0:
                lo, hi = Fraction(1), Fraction(0)
                break
        l, h = math.ceil(lo), math.floor(hi)
        if l <= h:
            mask[l - ix0:h - ix0 + 1, y - iy0] = True
    if not mask.any():
        raise DomainError("polygon contains no lattice point at this scale")
    return Region.from_mask(_largest_component(mask), (ix0, iy0))


def _largest_component(mask: np.ndarray) -> np.ndarray:
    """Acute lattice corners can be cut off from the rest; keep the main piece."""
    from scipy.ndimage import label

    lab, n = label(mask)
    if n <= 1:
        return mask
    sizes = np.bincount(lab.ravel())[1:]
    return lab == 1 + int(np.argmax(sizes))


def snap(point, scale: int) -> tuple:
    """Coordinate-wise floor of scale * point."""
    p = as_point(point)
    return (math.floor(p[0] * scale), math.floor(p[1] * scale))
