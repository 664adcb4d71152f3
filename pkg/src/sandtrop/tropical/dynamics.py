"""The G_p operators: raise a polynomial minimally until it breaks at given points.

For F vanishing on the boundary and smooth at p, let w* be the slope active
at p. Every competitor w carries its canonical coefficient c_w(F), and
phi(w) = c_w(F) + w.p. The minimal admissible lift raises c_w* by
t0 = min_{w != w*} phi(w) - F(p) and keeps every other coefficient. The
minimisation runs over all of Z^2, but the candidates are confined to a
bounded lattice polygon because p is interior, so an exact search suffices.
"""

from __future__ import annotations

from fractions import Fraction

from gmpy2 import mpq

from ..errors import BudgetExceeded, ContractError, DomainError
from ..geometry import as_point, dot
from . import _exact
from .polynomial import TropicalPolynomial, _frac

DEFAULT_GMULTI_BUDGET = 10_000


def _phi(vals, w, x) -> Fraction:
    """c_w(F) + w.x, with the canonical coefficient of F; ``vals`` holds (x, y, F) at complex vertices."""
    px, py = mpq(x[0]), mpq(x[1])
    return _frac(max(f + w[0] * (px - vx) + w[1] * (py - vy) for vx, vy, f in vals))


def _cheap_region(domain, x, bound):
    """Lattice w with w.(x - v) <= bound at every polygon vertex v; a superset of {phi(w) <= bound}."""
    x0, x1, b = mpq(x[0]), mpq(x[1]), mpq(bound)
    hps = [(v[0] - x0, v[1] - x1, -b) for v in domain.vertices]
    return _exact.lattice_points_in_region(hps)


def _check_admissible(F: TropicalPolynomial):
    if not F.vanishes_on_boundary():
        raise ContractError("polynomial must vanish on the polygon boundary")


def apply_Gp(F: TropicalPolynomial, p) -> TropicalPolynomial:
    """Pointwise-minimal polynomial above F, zero on the boundary, non-smooth at p."""
    p = as_point(p)
    dom = F.domain
    if not dom.contains_interior(p):
        raise DomainError(f"{p} is not an interior point of the domain")
    _check_admissible(F)
    if not F.is_smooth_at(p):
        return F.reduced()
    Fp = F.value(p)
    vals = F._vertices_q
    (wstar,) = [w for w in F.domains if F.coeffs[w] + dot(w, p) == Fp]

    # t0 by exact search over a bounded lattice polygon
    seeds = [w for w in F.domains if w != wstar]
    seeds += [(wstar[0] + dx, wstar[1] + dy) for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))]
    bound = min(_phi(vals, w, p) for w in seeds) - Fp
    gaps = {}
    for w in _cheap_region(dom, p, Fp + bound):
        if w != wstar:
            g = _phi(vals, w, p) - Fp
            if g <= bound:
                gaps[w] = g
    t0 = min(gaps.values())
    tight = [w for w, g in gaps.items() if g == t0]

    coeff = {}

    def c_of(w):
        if w not in coeff:
            coeff[w] = _phi(vals, w, (0, 0)) + (t0 if w == wstar else 0)
        return coeff[w]

    # boundary monomials that take over where w* met an edge
    extra = []
    for e in dom.edges:
        n = e.normal
        if wstar == (0, 0) or (n[0] * wstar[1] - n[1] * wstar[0] == 0 and dot(n, wstar) > 0):
            m = dot(n, wstar) // dot(n, n)
            extra.append(((m + 1) * n[0], (m + 1) * n[1]))
    W = set(_exact.lattice_points_in_hull(list(F.domains) + tight + extra))
    while True:
        G = TropicalPolynomial({w: c_of(w) for w in W}, dom)
        missing = set()
        for v in G.complex_vertices:
            if not dom.contains_interior(v):
                continue
            gv = G.value(v)
            for w in _cheap_region(dom, v, gv):
                if w not in W and c_of(w) + dot(w, v) < gv:
                    missing.add(w)
        if not missing:
            break
        W |= missing
    return G.reduced()


def _smooth_points(F, points):
    return [p for p in points if F.is_smooth_at(p)]


def apply_Gmulti(F: TropicalPolynomial, points, budget: int = DEFAULT_GMULTI_BUDGET) -> TropicalPolynomial:
    """Sweep apply_Gp over the points until every one is a corner point.

    The budget caps the number of single-point steps. Termination is
    guaranteed for rational data, but no explicit bound is known.
    """
    pts = [as_point(p) for p in points]
    if len(set(pts)) != len(pts):
        raise DomainError("points must be distinct")
    for p in pts:
        if not F.domain.contains_interior(p):
            raise DomainError(f"{p} is not an interior point of the domain")
    _check_admissible(F)
    steps = 0
    G = F.reduced()
    while True:
        pending = _smooth_points(G, pts)
        if not pending:
            return G
        for p in pending:
            if not G.is_smooth_at(p):
                continue
            if steps >= budget:
                raise BudgetExceeded(f"G-sweep exceeded {budget} steps", partial=G)
            G = apply_Gp(G, p)
            steps += 1
