"""Experiments tying the sandpile engine to its tropical limit."""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetExceeded, DomainError, PatternNotFound
from .geometry import LatticePolygon, as_point, rasterize, snap
from .sandpile import Cylinder, add_grains, grid_laplacian, max_stable, relax, smooth_linear_min
from .sandpile.state import DEFAULT_BUDGET
from .tropical import apply_Gmulti, extract_curve, sample_curve, zero


# --------------------------------------------------------------- distances

def hausdorff(A, B) -> float:
    """Symmetric Hausdorff distance between two finite planar point sets."""
    A = np.asarray(A, dtype=float).reshape(-1, 2)
    B = np.asarray(B, dtype=float).reshape(-1, 2)
    if len(A) == 0 or len(B) == 0:
        raise DomainError("Hausdorff distance needs two non-empty sets")
    dab, _ = cKDTree(B).query(A)
    dba, _ = cKDTree(A).query(B)
    return float(max(dab.max(), dba.max()))


def boundary_distance(poly: LatticePolygon, pts: np.ndarray) -> np.ndarray:
    """Euclidean distance from each point to the nearest edge line of the polygon."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    out = np.full(len(pts), np.inf)
    for e in poly.edges:
        n = np.array(e.normal, dtype=float)
        d = (pts @ n - float(e.offset)) / np.hypot(*n)
        out = np.minimum(out, d)
    return out


def sample_grid(poly: LatticePolygon, per_side: int = 40) -> list:
    """Rational points of a square grid covering the polygon, kept if inside it."""
    x0, y0, x1, y1 = poly.bbox
    step = max(x1 - x0, y1 - y0) / per_side
    out = []
    for i in range(per_side + 1):
        for j in range(per_side + 1):
            x = (x0 + i * step, y0 + j * step)
            if poly.contains(x):
                out.append(x)
    return out


# ------------------------------------------------------------ scaling run

@dataclass
class ScaleResult:
    scale: int
    sup_error: float
    hausdorff: float | None
    topplings: int
    lost: int
    wall_ms: float
    state: object = field(default=None, repr=False)
    odometer: object = field(default=None, repr=False)

    def report(self) -> dict:
        return {
            "sup_error": self.sup_error,
            "hausdorff": self.hausdorff,
            "topplings": self.topplings,
            "wall_ms": self.wall_ms,
        }


@dataclass
class ScalingRun:
    polygon: LatticePolygon
    points: list
    scales: list
    strip: float
    limit: object  # the tropical polynomial G_points(0)
    curve: object
    results: list = field(default_factory=list)

    def report(self) -> dict:
        return {str(r.scale): r.report() for r in self.results}

    def sup_errors(self) -> list:
        return [r.sup_error for r in self.results]

    def strictly_decreasing(self) -> bool:
        e = self.sup_errors()
        return all(b < a for a, b in zip(e, e[1:]))


def run_scale(poly, points, N, limit=None, curve=None, grid=None, strip=None,
              schedule="fifo", budget=DEFAULT_BUDGET, seed=0, keep=False) -> ScaleResult:
    """Relax phi_0 plus one grain at each floor(N p) and compare with the tropical limit."""
    if limit is None:
        limit = apply_Gmulti(zero(poly), points) if points else zero(poly)
    if curve is None:
        curve = extract_curve(limit)
    if grid is None:
        grid = [(x, float(limit.value(x))) for x in sample_grid(poly)]
    if strip is None:
        strip = 0.05 * poly.diameter
    region = rasterize(poly, N)
    seeds = [snap(p, N) for p in points]
    for s in seeds:
        if s not in region:
            raise DomainError(f"seed {s} falls outside the region at scale {N}")
    t = time.perf_counter()
    final, odo = relax(add_grains(max_stable(region), seeds), schedule, budget, seed)
    wall = (time.perf_counter() - t) * 1000.0
    err = 0.0
    for x, fx in grid:
        c = (math.floor(x[0] * N), math.floor(x[1] * N))
        err = max(err, abs(odo[c] / N - fx))
    hd = None
    if not curve.is_empty():
        mask = region.mask & (final.heights < 3)
        ii, jj = np.nonzero(mask)
        A = np.column_stack([ii + region.origin[0], jj + region.origin[1]]) / N
        B = np.array(sample_curve(curve, 0.5 / N))
        A = A[boundary_distance(poly, A) >= strip]
        B = B[boundary_distance(poly, B) >= strip]
        if len(A) and len(B):
            hd = hausdorff(A, B)
    res = ScaleResult(int(N), float(err), hd, odo.total(), final.lost, round(wall, 3))
    if keep:
        res.state, res.odometer = final, odo
    return res


def scaling_run(poly: LatticePolygon, points, scales, strip: float | None = None,
                schedule="fifo", budget=DEFAULT_BUDGET, seed=0, keep=False) -> ScalingRun:
    pts = [as_point(p) for p in points]
    for p in pts:
        if not poly.contains_interior(p):
            raise DomainError(f"{p} is not interior to the polygon")
    scales = [int(s) for s in scales]
    if any(s < 8 for s in scales):
        raise DomainError("scales must be at least 8")
    if any(b <= a for a, b in zip(scales, scales[1:])):
        raise DomainError("scales must be strictly increasing")
    limit = apply_Gmulti(zero(poly), pts) if pts else zero(poly)
    curve = extract_curve(limit)
    grid = [(x, float(limit.value(x))) for x in sample_grid(poly)]
    if strip is None:
        strip = 0.05 * poly.diameter
    run = ScalingRun(poly, pts, scales, strip, limit, curve)
    for N in scales:
        run.results.append(run_scale(poly, pts, N, limit, curve, grid, strip, schedule, budget, seed, keep))
    return run


# ---------------------------------------------------------------- solitons

def _clusters(levels: np.ndarray, gap: int) -> list:
    """Split sorted levels into runs whose consecutive gaps are at most ``gap``."""
    out = []
    for u in levels:
        if out and u - out[-1][-1] <= gap:
            out[-1].append(int(u))
        else:
            out.append([int(u)])
    return out


@dataclass
class SolitonSnapshot:
    lo: int  # lowest level of the moving pattern
    hi: int
    pattern: np.ndarray  # heights on levels lo..hi, shape (levels, period)
    boundary: np.ndarray  # heights on levels below the moving pattern's gap
    lowest_toppled: int


def _snapshot(cyl: Cylinder, wave_odo: np.ndarray, gap: int) -> SolitonSnapshot:
    g = cyl.grid(cyl.heights)
    levels = np.nonzero((g < 3).any(axis=1))[0]
    if len(levels) == 0:
        raise PatternNotFound("no defects on the cylinder")
    moving = _clusters(levels, gap)[-1]
    lo, hi = moving[0], moving[-1]
    if hi > cyl.depth - gap:
        raise PatternNotFound("moving pattern reached the top of the window; increase depth")
    toppled = np.nonzero(cyl.grid(wave_odo).any(axis=1))[0]
    low = int(toppled[0]) if len(toppled) else cyl.depth + 1
    return SolitonSnapshot(lo, hi, g[lo:hi + 1].copy(), g[:max(lo - gap, 0)].copy(), low)


@dataclass
class SolitonReport:
    p: int
    q: int
    depth: int
    period: int
    waves: int  # waves sent in total
    stabilized_at: int  # wave index after which the pattern self-reproduced
    pattern: np.ndarray = field(repr=False)  # moving pattern heights, (levels, period)
    pattern_level: int  # level of its lowest row after the last wave
    boundary: np.ndarray = field(repr=False)
    defect_counts: list = field(default_factory=list)
    shifts: list = field(default_factory=list)  # level shift of the moving pattern per confirming wave
    periodic: bool = True
    linear_offset: int | None = None
    linear_fraction: float | None = None
    heights: np.ndarray = field(default=None, repr=False)

    @property
    def displacement_per_wave(self) -> float:
        """Euclidean normal displacement per wave."""
        return float(np.mean(self.shifts)) / math.hypot(self.p, self.q) if self.shifts else float("nan")

    def cells(self) -> list:
        """Moving pattern as (level offset, k, height) for every defect cell."""
        lv, kk = np.nonzero(self.pattern < 3)
        return [(int(a), int(b), int(self.pattern[a, b])) for a, b in zip(lv, kk)]

    def to_json(self) -> dict:
        return {
            "direction": [self.p, self.q],
            "depth": self.depth,
            "period": self.period,
            "waves": self.waves,
            "stabilized_at": self.stabilized_at,
            "pattern_level": self.pattern_level,
            "displacement_per_wave": self.displacement_per_wave,
            "defect_counts": self.defect_counts,
            "periodic": self.periodic,
            "linear_offset": self.linear_offset,
            "linear_fraction": self.linear_fraction,
            "pattern": [{"du": a, "k": b, "height": h} for a, b, h in self.cells()],
        }


def linear_region_fit(cyl: Cylinder, lo: int, hi: int):
    """Fit h = u + k on levels lo..hi; returns (k, fraction of cells matching)."""
    if hi < lo:
        return None, None
    odo = cyl.grid(cyl.odometer)[lo:hi + 1]
    u = np.arange(lo, hi + 1)[:, None]
    diff = (odo - u).ravel()
    k, count = Counter(diff.tolist()).most_common(1)[0]
    return int(k), count / diff.size


def soliton_extract(p: int, q: int, depth: int | None = None, max_waves: int = 400,
                    confirm: int = 10, period: int = 2, min_waves: int = 0) -> SolitonReport:
    """Send waves down a (p, q) cylinder until the moving edge pattern self-reproduces.

    Stabilization requires ``confirm`` successive waves that shift the moving
    pattern by exactly one level without changing it, leave the boundary
    pattern untouched, and never topple at its levels.
    """
    if math.gcd(p, q) != 1:
        raise DomainError(f"({p}, {q}) is not primitive")
    gap = abs(p) + abs(q)
    if depth is None:
        depth = max_waves + 40 * gap
    cyl = Cylinder(p, q, depth, period)
    prev = None
    streak = 0
    counts, shifts = [], []
    for n in range(1, max_waves + 1):
        odo = cyl.wave()
        try:
            snap_ = _snapshot(cyl, odo, gap)
        except PatternNotFound:
            if n < 3 * gap:
                prev, streak = None, 0
                continue
            raise
        ok = (
            prev is not None
            and snap_.lo == prev.lo + 1
            and snap_.hi == prev.hi + 1
            and np.array_equal(snap_.pattern, prev.pattern)
            and snap_.boundary.shape[0] >= prev.boundary.shape[0]
            and np.array_equal(snap_.boundary[:prev.boundary.shape[0]], prev.boundary)
            and snap_.lowest_toppled >= prev.boundary.shape[0]
        )
        if ok:
            streak += 1
            counts.append(int((snap_.pattern < 3).sum()))
            shifts.append(snap_.lo - prev.lo)
        else:
            streak = 0
            counts, shifts = [], []
        prev = snap_
        if streak >= confirm and n >= min_waves:
            b_top = _boundary_top(cyl, snap_.lo, gap)
            k, frac = linear_region_fit(cyl, b_top + gap, snap_.lo - gap)
            return SolitonReport(
                p, q, depth, period, n, n - streak, snap_.pattern, snap_.lo, snap_.boundary,
                counts[-confirm:], shifts[-confirm:], cyl.is_periodic(), k, frac, cyl.heights.copy(),
            )
    raise PatternNotFound(f"no self-reproducing pattern for ({p}, {q}) within {max_waves} waves")


def _boundary_top(cyl: Cylinder, moving_lo: int, gap: int) -> int:
    """Highest defect level below the moving pattern, or -1 if there is none."""
    g = cyl.grid(cyl.heights)[:max(moving_lo - gap, 0)]
    levels = np.nonzero((g < 3).any(axis=1))[0]
    return int(levels[-1]) if len(levels) else -1


def measure_edge_speed(direction, waves: int, depth: int | None = None, period: int = 2) -> float:
    """Normal displacement of the moving edge over ``waves`` waves after it has formed."""
    a, b = int(direction[0]), int(direction[1])
    if waves < 1:
        raise DomainError("need at least one wave")
    gap = abs(a) + abs(b)
    rep = soliton_extract(a, b, depth=None if depth is None else depth, max_waves=200 + waves,
                          confirm=3)
    cyl_depth = max(rep.depth, rep.waves + waves + 40 * gap)
    cyl = Cylinder(a, b, cyl_depth, period)
    for _ in range(rep.waves):
        cyl.wave()
    before = _edge_offset(cyl, gap)
    for _ in range(waves):
        cyl.wave()
    after = _edge_offset(cyl, gap)
    return (after - before) / math.hypot(a, b)


def _edge_offset(cyl: Cylinder, gap: int) -> float:
    """Mean level of the moving pattern's defect cells: the offset of its best-fit parallel line."""
    g = cyl.grid(cyl.heights)
    levels = np.nonzero((g < 3).any(axis=1))[0]
    if len(levels) == 0:
        raise PatternNotFound("edge not detected")
    moving = _clusters(levels, gap)[-1]
    lo, hi = moving[0], moving[-1]
    lv, _ = np.nonzero(g[lo:hi + 1] < 3)
    return float(np.mean(lv + lo))


# --------------------------------------------------------- corner smoothing

DIRECTIONS = ((1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))


def corner_function(p0, q0, p1, q1, p2, q2, radius: int) -> np.ndarray:
    """min(0, p1 x + q1 y, p2 x + q2 y) + p0 x + q0 y on [-radius, radius]^2, indexed [x, y]."""
    r = np.arange(-radius, radius + 1)
    x, y = np.meshgrid(r, r, indexing="ij")
    return np.minimum(0, np.minimum(p1 * x + q1 * y, p2 * x + q2 * y)) + p0 * x + q0 * y


def is_monotone(f: np.ndarray, e) -> bool:
    """f(v + e) <= f(v) wherever both cells lie in the grid."""
    ex, ey = e
    W, H = f.shape
    xs = slice(max(0, -ex), W - max(0, ex))
    ys = slice(max(0, -ey), H - max(0, ey))
    xt = slice(xs.start + ex, xs.stop + ex)
    yt = slice(ys.start + ey, ys.stop + ey)
    a, b = f[xs, ys], f[xt, yt]
    return bool((b <= a).all())


@dataclass
class CornerReport:
    coefficients: tuple
    radius: int
    steps: int
    f0: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    drops_ok: bool
    superharmonic: bool
    monotone: dict  # direction -> (f0 monotone, every f_n monotone), away from the frame
    defects: np.ndarray = field(repr=False)  # cells with negative Laplacian in the limit

    def to_json(self) -> dict:
        ii, jj = np.nonzero(self.defects)
        r = self.radius
        return {
            "coefficients": list(self.coefficients),
            "radius": r,
            "stabilization_index": self.steps,
            "drops_ok": self.drops_ok,
            "superharmonic": self.superharmonic,
            "monotone": {f"{e[0]},{e[1]}": list(v) for e, v in self.monotone.items()},
            "defects": [[int(i) - r, int(j) - r] for i, j in zip(ii, jj)],
        }


def corner_smoothing_run(p0, q0, p1, q1, p2, q2, radius: int = 20, budget: int = 100_000) -> CornerReport:
    """Smooth the corner function on a square window whose outer ring stays fixed."""
    if p1 * q2 - p2 * q1 != 1:
        raise DomainError("corner vectors must satisfy p1 q2 - p2 q1 = 1")
    f0 = corner_function(p0, q0, p1, q1, p2, q2, radius)
    res = smooth_linear_min(f0, budget=budget, keep_history=True)
    hist = res.history
    drops_ok = all(
        ((a - b) >= 0).all() and ((a - b) <= 1).all() for a, b in zip(hist, hist[1:])
    )
    lap = grid_laplacian(res.f)
    # the fixed outer ring cuts the infinite edges; monotonicity is judged
    # on the window shrunk by the largest corner slope
    m = max(abs(p1), abs(q1), abs(p2), abs(q2), 1)
    if 2 * m >= f0.shape[0] - 2:
        raise DomainError("window too small for the corner slopes")
    core = (slice(m, -m), slice(m, -m))
    mono = {}
    for e in DIRECTIONS:
        m0 = is_monotone(f0[core], e)
        mono[e] = (m0, all(is_monotone(h[core], e) for h in hist) if m0 else False)
    return CornerReport(
        (p0, q0, p1, q1, p2, q2), radius, res.steps, f0, res.f, drops_ok,
        bool((lap <= 0).all()), mono, lap < 0,
    )
