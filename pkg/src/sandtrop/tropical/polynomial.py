"""Min-plus polynomials on a lattice polygon, with exact linearity complexes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from types import MappingProxyType
from typing import Mapping

from gmpy2 import mpq

from ..errors import ContractError, DomainError
from ..geometry import LatticePolygon, as_point, as_rational, dot, support_set
from . import _exact


class TropicalPolynomial:
    """F(x) = min over w of (c_w + w.x), restricted to the polygon ``domain``."""

    __slots__ = ("coeffs", "domain", "__dict__")

    def __init__(self, coeffs: Mapping, domain: LatticePolygon):
        if not coeffs:
            raise DomainError("a tropical polynomial needs a non-empty support")
        clean = {}
        for w, c in coeffs.items():
            if isinstance(w, str):
                w = tuple(int(t) for t in w.split(","))
            w = (int(w[0]), int(w[1]))
            clean[w] = as_rational(c)
        object.__setattr__(self, "coeffs", MappingProxyType(dict(sorted(clean.items()))))
        object.__setattr__(self, "domain", domain)

    def __setattr__(self, name, value):
        raise AttributeError("TropicalPolynomial is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, TropicalPolynomial)
            and dict(self.coeffs) == dict(other.coeffs)
            and self.domain == other.domain
        )

    def __hash__(self):
        return hash((tuple(self.coeffs.items()), self.domain))

    def __repr__(self):
        terms = ", ".join(f"{w}: {c}" for w, c in self.coeffs.items())
        return f"TropicalPolynomial({{{terms}}})"

    @property
    def support(self) -> tuple:
        return tuple(self.coeffs)

    # -- evaluation
    def value(self, x) -> Fraction:
        """Evaluate without the domain check."""
        return min(c + w[0] * x[0] + w[1] * x[1] for w, c in self.coeffs.items())

    def eval(self, x) -> Fraction:
        x = as_point(x)
        if not self.domain.contains(x):
            raise DomainError(f"{x} lies outside the domain")
        return self.value(x)

    __call__ = eval

    def argmin(self, x) -> list:
        vals = {w: c + w[0] * x[0] + w[1] * x[1] for w, c in self.coeffs.items()}
        m = min(vals.values())
        return [w for w, v in vals.items() if v == m]

    # -- linearity complex
    @cached_property
    def _domains_q(self) -> dict:
        """Linearity domains with gmpy2 rationals, which are much faster than Fraction."""
        base = [(mpq(x), mpq(y)) for x, y in self.domain.vertices]
        items = [(w, mpq(c)) for w, c in self.coeffs.items()]
        out = {}
        for w, cw in items:
            poly = base
            for u, cu in items:
                if u == w:
                    continue
                # c_w + w.x <= c_u + u.x
                poly = _exact.clip_halfplane(poly, u[0] - w[0], u[1] - w[1], cw - cu)
                if len(poly) < 3:
                    break
            if len(poly) >= 3 and _exact.area2(poly) > 0:
                out[w] = poly
        return out

    @cached_property
    def domains(self) -> dict:
        """Slope w -> CCW vertex list of {x in domain : monomial w attains the min}, positive area only."""
        return MappingProxyType({
            w: [(_frac(x), _frac(y)) for x, y in poly] for w, poly in self._domains_q.items()
        })

    @cached_property
    def _vertices_q(self) -> tuple:
        """(x, y, F(x, y)) as gmpy2 rationals over the vertices of the linearity complex."""
        pts = {(mpq(x), mpq(y)) for x, y in self.domain.vertices}
        for poly in self._domains_q.values():
            pts.update(poly)
        items = [(w, mpq(c)) for w, c in self.coeffs.items()]
        out = []
        for x, y in sorted(pts):
            out.append((x, y, min(c + w[0] * x + w[1] * y for w, c in items)))
        return tuple(out)

    @cached_property
    def complex_vertices(self) -> tuple:
        return tuple((_frac(x), _frac(y)) for x, y, _ in self._vertices_q)

    @cached_property
    def vertex_values(self) -> tuple:
        """(vertex, F(vertex)) over the vertices of the linearity complex."""
        return tuple(((_frac(x), _frac(y)), _frac(f)) for x, y, f in self._vertices_q)

    @property
    def active_slopes(self) -> tuple:
        return tuple(self.domains)

    def is_smooth_at(self, p) -> bool:
        """True iff exactly one 2D linearity domain contains p."""
        p = as_point(p)
        vals = {w: self.coeffs[w] + dot(w, p) for w in self.domains}
        m = min(vals.values())
        return sum(1 for v in vals.values() if v == m) == 1

    # -- canonical forms
    def canonical_coefficient(self, w) -> Fraction:
        """Smallest c with c + w.x >= F(x) on the domain."""
        return _frac(max(f - w[0] * x - w[1] * y for x, y, f in self._vertices_q))

    def canonicalize(self) -> "TropicalPolynomial":
        """Support filled to the lattice points of its Newton polygon; coefficients minimal."""
        support = _exact.lattice_points_in_hull(self.coeffs.keys())
        return TropicalPolynomial({w: self.canonical_coefficient(w) for w in support}, self.domain)

    def reduced(self) -> "TropicalPolynomial":
        """Canonical form built on the slopes that are actually active on the domain."""
        support = _exact.lattice_points_in_hull(self.domains.keys())
        return TropicalPolynomial({w: self.canonical_coefficient(w) for w in support}, self.domain)

    def is_canonical(self) -> bool:
        return self == self.canonicalize()

    def same_function(self, other: "TropicalPolynomial") -> bool:
        """Exact equality as functions on the common domain."""
        if self.domain != other.domain:
            return False
        pts = set(self.complex_vertices) | set(other.complex_vertices)
        if any(self.value(v) != other.value(v) for v in pts):
            return False
        # both are affine on the common refinement, whose vertices are covered
        # by the pairwise overlaps checked here
        for pa in self.domains.values():
            for pb in other.domains.values():
                cell = pa
                for e in _edges_as_halfplanes(pb):
                    cell = _exact.clip_halfplane(cell, *e)
                    if not cell:
                        break
                for v in cell:
                    if self.value(v) != other.value(v):
                        return False
        return True

    # -- boundary behaviour
    def boundary_points(self) -> list:
        return [v for v in self.complex_vertices if self.domain.on_boundary(v)]

    def vanishes_on_boundary(self) -> bool:
        return all(fv == 0 for v, fv in self.vertex_values if self.domain.on_boundary(v))

    def integral(self) -> Fraction:
        """Exact integral over the domain."""
        total = Fraction(0)
        for w, poly in self.domains.items():
            cx, cy = _exact.centroid(poly)
            total += _exact.area2(poly) / 2 * (self.coeffs[w] + w[0] * cx + w[1] * cy)
        return total

    # -- serialisation
    def to_json(self) -> dict:
        return {f"{w[0]},{w[1]}": str(c) for w, c in self.coeffs.items()}

    @classmethod
    def from_json(cls, obj, domain: LatticePolygon) -> "TropicalPolynomial":
        if not isinstance(obj, dict):
            raise DomainError("polynomial JSON must be an object")
        try:
            return cls({tuple(int(t) for t in k.split(",")): v for k, v in obj.items()}, domain)
        except ValueError as exc:
            raise DomainError(f"bad polynomial JSON: {exc}") from exc


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _edges_as_halfplanes(poly):
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        a, b = -(q[1] - p[1]), q[0] - p[0]
        yield (a, b, a * p[0] + b * p[1])


def zero(domain: LatticePolygon) -> TropicalPolynomial:
    return TropicalPolynomial({(0, 0): 0}, domain)


def eval_poly(F: TropicalPolynomial, x) -> Fraction:
    return F.eval(x)


def canonicalize(F: TropicalPolynomial) -> TropicalPolynomial:
    return F.canonicalize()


def integral(F: TropicalPolynomial) -> Fraction:
    return F.integral()


def weighted_distance_polynomial(domain: LatticePolygon) -> TropicalPolynomial:
    """l_Delta as a tropical polynomial with support P(Delta)."""
    return TropicalPolynomial(
        {w: -min(dot(w, v) for v in domain.vertices) for w in support_set(domain)}, domain
    )


# ------------------------------------------------------------ subdivision

@dataclass(frozen=True)
class NewtonSubdivision:
    """Regular subdivision of the Newton polygon induced by the lower hull of (w, c_w)."""

    polygon: tuple  # CCW hull vertices of the support
    cells: tuple  # each cell: CCW hull vertices
    cell_points: tuple  # each cell: every support point lying on its lower facet

    def edges(self) -> set:
        out = set()
        for cell in self.cells:
            n = len(cell)
            for i in range(n):
                out.add(frozenset((cell[i], cell[(i + 1) % n])))
        return out

    def area_sum(self) -> Fraction:
        return sum((_exact.area2(list(c)) for c in self.cells), Fraction(0)) / 2


def dual_subdivision(F: TropicalPolynomial) -> NewtonSubdivision:
    """Lower facets of the lifted support, found by exhaustive search over triples."""
    pts = list(F.coeffs.items())
    hull = tuple(_exact.convex_hull(F.coeffs.keys()))
    if len(hull) < 3:
        return _collinear_subdivision(hull, pts)
    facets = {}
    for (w1, c1), (w2, c2), (w3, c3) in combinations(pts, 3):
        d = (w2[0] - w1[0]) * (w3[1] - w1[1]) - (w2[1] - w1[1]) * (w3[0] - w1[0])
        if d == 0:
            continue
        # plane z = alpha*x + beta*y + gamma through the three lifts
        alpha = Fraction((c2 - c1) * (w3[1] - w1[1]) - (c3 - c1) * (w2[1] - w1[1])) / d
        beta = Fraction((w2[0] - w1[0]) * (c3 - c1) - (w3[0] - w1[0]) * (c2 - c1)) / d
        gamma = c1 - alpha * w1[0] - beta * w1[1]
        on, below = [], False
        for w, c in pts:
            h = c - (alpha * w[0] + beta * w[1] + gamma)
            if h < 0:
                below = True
                break
            if h == 0:
                on.append(w)
        if not below:
            facets[(alpha, beta, gamma)] = tuple(sorted(on))
    cells = []
    cell_points = []
    for on in sorted(set(facets.values())):
        cells.append(tuple(_exact.convex_hull(on)))
        cell_points.append(on)
    return NewtonSubdivision(hull, tuple(cells), tuple(cell_points))


def _collinear_subdivision(hull, pts) -> NewtonSubdivision:
    """Lower chain of the lifted support when it lies on a line: cells are segments."""
    if len(hull) < 2:
        return NewtonSubdivision(hull, (), ())
    a, b = hull
    d = (b[0] - a[0], b[1] - a[1])
    lifted = sorted(((w[0] - a[0]) * d[0] + (w[1] - a[1]) * d[1], w, c) for w, c in pts)
    chain = []
    for t, w, c in lifted:
        while len(chain) >= 2:
            (t1, _, c1), (t2, _, c2) = chain[-2], chain[-1]
            if (c2 - c1) * (t - t1) >= (c - c1) * (t2 - t1):
                chain.pop()
            else:
                break
        chain.append((t, w, c))
    cells, cell_points = [], []
    for (t1, w1, c1), (t2, w2, c2) in zip(chain, chain[1:]):
        cells.append((w1, w2))
        on = [w for t, w, c in lifted if t1 <= t <= t2 and (c - c1) * (t2 - t1) == (c2 - c1) * (t - t1)]
        cell_points.append(tuple(sorted(on)))
    return NewtonSubdivision(hull, tuple(cells), tuple(cell_points))


# ----------------------------------------------------------- quasi-degree

def quasi_degree(F: TropicalPolynomial) -> dict:
    """Edge index -> m(e), where m(e) n(e) is the slope active along that edge."""
    if not F.vanishes_on_boundary():
        raise ContractError("polynomial does not vanish on the polygon boundary")
    out = {}
    for k, e in enumerate(F.domain.edges):
        found = None
        for w, poly in F.domains.items():
            touching = [v for v in poly if e.value(v) == 0]
            if len(set(touching)) >= 2:
                found = w
                break
        if found is None:
            raise ContractError(f"no linearity domain meets edge {k}")
        n = e.normal
        m = found[0] // n[0] if n[0] else found[1] // n[1]
        if (m * n[0], m * n[1]) != found or m < 0:
            raise ContractError(f"slope {found} near edge {k} is not a multiple of its normal")
        out[k] = m
    return out


def edge_area(edge) -> Fraction:
    """Symplectic area of a polygon edge: lattice length times |primitive|^2."""
    k = edge.direction
    return edge.lattice_length() * (k[0] ** 2 + k[1] ** 2)


def lattice_length(v) -> int:
    return math.gcd(int(v[0]), int(v[1]))
