"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 assertion failure,
4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .errors import BudgetExceeded, ContractError, DomainError, PatternNotFound
from .geometry import as_rational, load_polygon, rasterize, snap
from .sandpile import SCHEDULES, add_grains, max_stable, relax
from .sandpile.io import write_odometer_csv, write_pgm, write_pgm_array, write_state_csv
from .sandpile.state import DEFAULT_BUDGET

EXIT_OK, EXIT_CONFIG, EXIT_ASSERT, EXIT_BUDGET = 0, 2, 3, 4


class ConfigError(Exception):
    pass


class AssertionFailed(Exception):
    pass


# ---------------------------------------------------------------- parsing

def parse_points(text: str | None) -> list:
    """'x,y;x,y' with rational coordinates such as 2/5 or 0.4."""
    if text is None or not text.strip():
        return []
    pts = []
    for chunk in text.replace(" ", ";").split(";"):
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ConfigError(f"bad point {chunk!r}; expected x,y")
        try:
            pts.append((as_rational(parts[0]), as_rational(parts[1])))
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
    return pts


def parse_ints(text: str, name: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad {name} {text!r}") from exc


def _polygon(args):
    if not args.polygon:
        raise ConfigError("--polygon is required")
    try:
        return load_polygon(args.polygon)
    except OSError as exc:
        raise ConfigError(f"cannot read polygon: {exc}") from exc
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed polygon file: {exc}") from exc


def _interior_points(poly, pts):
    for p in pts:
        if not poly.contains_interior(p):
            raise ConfigError(f"point ({p[0]}, {p[1]}) is not interior to the polygon")
    if len(set(pts)) != len(pts):
        raise ConfigError("points must be distinct")
    return pts


def _outdir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _seed_for(args):
    return args.seed if args.schedule == "random" else 0


# --------------------------------------------------------------- commands

def cmd_relax(args) -> int:
    from .plotting import plot_state
    from .tropical import apply_Gmulti, extract_curve, zero

    poly = _polygon(args)
    pts = _interior_points(poly, parse_points(args.points))
    if args.scale is None or args.scale < 1:
        raise ConfigError("--scale must be a positive integer")
    N = args.scale
    region = rasterize(poly, N)
    seeds = [snap(p, N) for p in pts]
    for s in seeds:
        if s not in region:
            raise ConfigError(f"seed {s} falls outside the region")
    final, odo = relax(add_grains(max_stable(region), seeds), args.schedule, args.budget, _seed_for(args))
    out = _outdir(args)
    write_state_csv(os.path.join(out, "state.csv"), final)
    write_pgm(os.path.join(out, "state.pgm"), final)
    write_odometer_csv(os.path.join(out, "odometer.csv"), odo)
    _write_json(os.path.join(out, "summary.json"), {
        "scale": N,
        "seeds": [list(s) for s in seeds],
        "lost": final.lost,
        "topplings": odo.total(),
        "seed_heights": [final[s] for s in seeds],
    })
    curve = extract_curve(apply_Gmulti(zero(poly), pts)) if pts else None
    plot_state(final, os.path.join(out, "state.png"), poly, curve, N)
    print(f"lost {final.lost}")
    return EXIT_OK


def cmd_tropical(args) -> int:
    from .plotting import plot_curve
    from .tropical import (apply_Gmulti, edge_area, extract_curve, quasi_degree, symplectic_area, zero)

    poly = _polygon(args)
    pts = _interior_points(poly, parse_points(args.points))
    if not pts:
        raise ConfigError("tropical needs a non-empty point list")
    F = apply_Gmulti(zero(poly), pts, budget=args.gbudget)
    C = extract_curve(F)
    area = symplectic_area(C, poly)
    qd = quasi_degree(F)
    out = _outdir(args)
    _write_json(os.path.join(out, "curve.json"), C.to_json())
    _write_json(os.path.join(out, "polynomial.json"), F.to_json())
    _write_json(os.path.join(out, "summary.json"), {
        "symplectic_area": str(area),
        "symplectic_area_float": float(area),
        "integral": str(F.integral()),
        "quasi_degree": [qd[k] for k in range(len(poly.edges))],
        "boundary_area_sum": str(sum(qd[k] * edge_area(e) for k, e in enumerate(poly.edges))),
        "max_weight": max(C.weights(), default=0),
    })
    plot_curve(C, poly, os.path.join(out, "curve.png"))
    print(f"area {area}")
    return EXIT_OK


def cmd_compare(args) -> int:
    from .experiments import scaling_run
    from .plotting import plot_errors

    scales = parse_ints(args.scales, "scales") if args.scales else ([args.scale] if args.scale else [])
    if not scales:
        raise ConfigError("--scales is required")
    if args.assert_ and len(scales) < 2:
        raise ConfigError("--assert needs at least two scales")
    poly = _polygon(args)
    pts = _interior_points(poly, parse_points(args.points))
    try:
        run = scaling_run(poly, pts, scales, args.strip, args.schedule, args.budget, _seed_for(args))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    out = _outdir(args)
    _write_json(os.path.join(out, "report.json"), run.report())
    plot_errors(run, os.path.join(out, "errors.png"))
    for r in run.results:
        print(f"N={r.scale} sup_error={r.sup_error:.6g} hausdorff={r.hausdorff}")
    if args.assert_ and not run.strictly_decreasing():
        raise AssertionFailed("sup error is not strictly decreasing")
    return EXIT_OK


def _direction(args):
    d = parse_ints(args.direction, "direction")
    if len(d) != 2 or math.gcd(*d) != 1:
        raise ConfigError("--direction must be a primitive pair p,q")
    return d


def cmd_soliton(args) -> int:
    from .experiments import soliton_extract
    from .plotting import plot_cylinder

    p, q = _direction(args)
    rep = soliton_extract(p, q, depth=args.depth, max_waves=args.waves)
    out = _outdir(args)
    _write_json(os.path.join(out, "soliton.json"), rep.to_json())
    write_pgm_array(os.path.join(out, "soliton.pgm"), rep.pattern)
    plot_cylinder(rep, os.path.join(out, "soliton.png"))
    print(f"stabilized after {rep.stabilized_at} waves; {rep.defect_counts[-1]} defect cells per period")
    if args.assert_ and not (rep.periodic and len(set(rep.defect_counts)) == 1):
        raise AssertionFailed("pattern is not self-reproducing")
    return EXIT_OK


def cmd_smooth_corner(args) -> int:
    from .experiments import corner_smoothing_run
    from .plotting import plot_corner

    c = parse_ints(args.corner, "corner")
    if len(c) != 6:
        raise ConfigError("--corner needs p0,q0,p1,q1,p2,q2")
    rep = corner_smoothing_run(*c, radius=args.radius, budget=args.budget)
    out = _outdir(args)
    _write_json(os.path.join(out, "corner.json"), rep.to_json())
    plot_corner(rep, os.path.join(out, "corner.png"))
    print(f"stabilized after {rep.steps} steps")
    mono_ok = all(v[1] for v in rep.monotone.values() if v[0])
    if args.assert_ and not (rep.drops_ok and rep.superharmonic and mono_ok):
        raise AssertionFailed("corner smoothing violated a structural property")
    return EXIT_OK


def cmd_wave_speed(args) -> int:
    from .experiments import measure_edge_speed

    a, b = _direction(args)
    if args.waves < 1:
        raise ConfigError("--waves must be positive")
    d = measure_edge_speed((a, b), args.waves)
    predicted = args.waves / math.hypot(a, b)
    out = _outdir(args)
    _write_json(os.path.join(out, "speed.json"), {
        "direction": [a, b], "waves": args.waves, "displacement": d, "predicted": predicted,
    })
    print(f"displacement {d:.6g} predicted {predicted:.6g}")
    if args.assert_ and abs(d - predicted) > 2:
        raise AssertionFailed("displacement off by more than 2 lattice units")
    return EXIT_OK


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sandtrop", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, polygon=True):
        if polygon:
            p.add_argument("--polygon", help="polygon JSON file")
            p.add_argument("--points", help="rational points 'x,y;x,y'")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--assert", dest="assert_", action="store_true", help="fail with exit 3 on a broken check")
        p.add_argument("--seed", type=int, default=0, help="seed for the random schedule")

    def sched(p):
        p.add_argument("--schedule", choices=SCHEDULES, default="fifo")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="toppling budget")

    p = sub.add_parser("relax", help="relax phi_0 plus grains and export the state")
    common(p)
    sched(p)
    p.add_argument("--scale", type=int)
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("tropical", help="minimal tropical curve through the points")
    common(p)
    p.add_argument("--gbudget", type=int, default=10_000, help="G-operator step budget")
    p.set_defaults(func=cmd_tropical)

    p = sub.add_parser("compare", help="scaling run against the tropical limit")
    common(p)
    sched(p)
    p.add_argument("--scale", type=int)
    p.add_argument("--scales", help="comma-separated scales")
    p.add_argument("--strip", type=float, default=None, help="boundary strip width")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("soliton", help="self-reproducing edge pattern on a cylinder")
    common(p, polygon=False)
    p.add_argument("--direction", required=True, help="primitive p,q")
    p.add_argument("--waves", type=int, default=400, help="wave budget")
    p.add_argument("--depth", type=int, default=None)
    p.set_defaults(func=cmd_soliton)

    p = sub.add_parser("smooth-corner", help="smoothing of min(0, l1, l2) + l0")
    common(p, polygon=False)
    p.add_argument("--corner", required=True, help="p0,q0,p1,q1,p2,q2")
    p.add_argument("--radius", type=int, default=20)
    p.add_argument("--budget", type=int, default=100_000, help="step budget")
    p.set_defaults(func=cmd_smooth_corner)

    p = sub.add_parser("wave-speed", help="edge displacement after M waves")
    common(p, polygon=False)
    p.add_argument("--direction", required=True, help="primitive p,q")
    p.add_argument("--waves", type=int, default=10)
    p.set_defaults(func=cmd_wave_speed)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionFailed as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    except (BudgetExceeded, PatternNotFound) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
