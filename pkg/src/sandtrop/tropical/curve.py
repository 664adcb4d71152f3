"""Corner loci of tropical polynomials as weighted, balanced graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import DomainError
from ..geometry import LatticePolygon, as_point, as_rational, dot, primitive_direction
from .polynomial import TropicalPolynomial


@dataclass(frozen=True)
class CurveEdge:
    a: int
    b: int | None  # None for a ray leaving vertex a
    primitive: tuple  # from a towards b (or along the ray)
    weight: int
    ray: tuple | None = None


@dataclass(frozen=True)
class TropicalCurve:
    vertices: tuple = ()
    edges: tuple = ()
    faces: tuple = ()  # (w, c) pairs of the affine pieces
    domain: LatticePolygon | None = field(default=None, compare=False)

    def is_empty(self) -> bool:
        return not self.edges

    def segment(self, e: CurveEdge):
        return self.vertices[e.a], self.vertices[e.b]

    def interior_vertices(self) -> list:
        if self.domain is None:
            return list(range(len(self.vertices)))
        return [i for i, v in enumerate(self.vertices) if self.domain.contains_interior(v)]

    def balancing_defects(self) -> dict:
        """Vertex index -> sum of weight * outgoing primitive, for interior vertices where it is nonzero."""
        sums = {i: [0, 0] for i in self.interior_vertices()}
        for e in self.edges:
            p = e.primitive
            if e.a in sums:
                sums[e.a][0] += e.weight * p[0]
                sums[e.a][1] += e.weight * p[1]
            if e.b is not None and e.b in sums:
                sums[e.b][0] -= e.weight * p[0]
                sums[e.b][1] -= e.weight * p[1]
        return {i: tuple(s) for i, s in sums.items() if s != [0, 0]}

    def is_balanced(self) -> bool:
        return not self.balancing_defects()

    def weights(self) -> list:
        return [e.weight for e in self.edges]

    # -- serialisation
    def to_json(self) -> dict:
        edges = []
        for e in self.edges:
            d = {"a": e.a}
            if e.b is None:
                d["ray"] = list(e.ray)
            else:
                d["b"] = e.b
            d["primitive"] = list(e.primitive)
            d["weight"] = e.weight
            edges.append(d)
        return {
            "vertices": [[str(x), str(y)] for x, y in self.vertices],
            "edges": edges,
            "faces": [{"w": list(w), "c": str(c)} for w, c in self.faces],
        }

    @classmethod
    def from_json(cls, obj, domain=None) -> "TropicalCurve":
        verts = tuple(as_point(v) for v in obj.get("vertices", []))
        edges = []
        for d in obj.get("edges", []):
            prim = (int(d["primitive"][0]), int(d["primitive"][1]))
            if "ray" in d:
                edges.append(CurveEdge(int(d["a"]), None, prim, int(d["weight"]), tuple(d["ray"])))
            else:
                edges.append(CurveEdge(int(d["a"]), int(d["b"]), prim, int(d["weight"])))
        faces = tuple(((int(f["w"][0]), int(f["w"][1])), as_rational(f["c"])) for f in obj.get("faces", []))
        return cls(verts, tuple(edges), faces, domain)


def extract_curve(F: TropicalPolynomial) -> TropicalCurve:
    """Non-smooth locus of F inside its domain, as clipped segments with weights."""
    doms = F.domains
    slopes = sorted(doms)
    faces = tuple((w, F.coeffs[w]) for w in slopes)
    segs = []
    for i, w in enumerate(slopes):
        cw = F.coeffs[w]
        for u in slopes[i + 1:]:
            cu = F.coeffs[u]
            tie = [v for v in doms[w] if cw + dot(w, v) == cu + dot(u, v)]
            tie = sorted(set(tie))
            if len(tie) < 2:
                continue
            a, b = tie[0], tie[-1]  # collinear points sorted lexicographically: extremes
            diff = (u[0] - w[0], u[1] - w[1])
            segs.append((a, b, math.gcd(*diff)))
    index = {}
    verts = []
    for a, b, _ in segs:
        for v in (a, b):
            if v not in index:
                index[v] = len(verts)
                verts.append(v)
    edges = []
    for a, b, m in segs:
        d = primitive_direction((b[0] - a[0], b[1] - a[1]))
        edges.append(CurveEdge(index[a], index[b], d, m))
    return TropicalCurve(tuple(verts), tuple(edges), faces, F.domain)


def _clip_param(p, d, poly: LatticePolygon, t0, t1):
    """Cyrus-Beck: parameter range of p + t d inside the polygon, intersected with [t0, t1]."""
    for e in poly.edges:
        num = e.value(p)  # n.p - off
        den = dot(e.normal, d)
        if den == 0:
            if num < 0:
                return None
            continue
        t = -num / den
        if den > 0:
            t0 = t if t0 is None or t > t0 else t0
        else:
            t1 = t if t1 is None or t < t1 else t1
    if t0 is None or t1 is None or t0 >= t1:
        return None
    return t0, t1


def symplectic_area(C: TropicalCurve, clip: LatticePolygon | None = None) -> Fraction:
    """Sum over edges of Euclidean length times |primitive| times weight, after clipping."""
    total = Fraction(0)
    for e in C.edges:
        p = C.vertices[e.a]
        v = e.primitive
        if e.b is None:
            d = tuple(as_rational(t) for t in e.ray)
            t0, t1 = Fraction(0), None
        else:
            q = C.vertices[e.b]
            d = (q[0] - p[0], q[1] - p[1])
            t0, t1 = Fraction(0), Fraction(1)
        if clip is not None:
            rng = _clip_param(p, d, clip, t0, t1)
            if rng is None:
                continue
            t0, t1 = rng
        elif t1 is None:
            raise DomainError("an unclipped ray has infinite area")
        # d = s * v with s > 0; segment vector (t1 - t0) d
        s = d[0] / v[0] if v[0] else d[1] / v[1]
        total += (t1 - t0) * s * (v[0] ** 2 + v[1] ** 2) * e.weight
    return total


def segment_curve(a, b, weight: int = 1) -> TropicalCurve:
    """A one-edge curve, handy for tests and area bookkeeping."""
    a, b = as_point(a), as_point(b)
    d = primitive_direction((b[0] - a[0], b[1] - a[1]))
    return TropicalCurve((a, b), (CurveEdge(0, 1, d, int(weight)),), ())


def sample_curve(C: TropicalCurve, step: float) -> list:
    """Float samples along every finite edge, spaced at most ``step`` apart."""
    out = []
    for e in C.edges:
        if e.b is None:
            continue
        (ax, ay), (bx, by) = C.vertices[e.a], C.vertices[e.b]
        ax, ay, bx, by = float(ax), float(ay), float(bx), float(by)
        k = max(1, int(math.ceil(math.hypot(bx - ax, by - ay) / step)))
        for i in range(k + 1):
            t = i / k
            out.append((ax + t * (bx - ax), ay + t * (by - ay)))
    return out
