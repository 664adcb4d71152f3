"""Matplotlib renderers used by the CLI report paths."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

HEIGHT_CMAP = ListedColormap(["#000000", "#1f77b4", "#ff7f0e", "#f7f7f7"])
PNG_META = {"Software": None}


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata=PNG_META)
    plt.close(fig)


def _polygon_xy(poly, scale=1):
    v = [(float(x) * scale, float(y) * scale) for x, y in poly.vertices]
    v.append(v[0])
    return np.array(v)


def plot_state(state, path, poly=None, curve=None, scale=1, title=None):
    """Heights 0..3 as four colours, with the rescaled tropical curve overlaid."""
    reg = state.region
    x0, y0 = reg.origin
    W, H = reg.shape
    img = np.ma.masked_where(~reg.mask, np.clip(state.heights, 0, 3))
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.imshow(img.T, origin="lower", cmap=HEIGHT_CMAP, vmin=0, vmax=3, interpolation="nearest",
              extent=(x0 - 0.5, x0 + W - 0.5, y0 - 0.5, y0 + H - 0.5))
    if poly is not None:
        xy = _polygon_xy(poly, scale)
        ax.plot(xy[:, 0], xy[:, 1], color="0.4", lw=0.8)
    if curve is not None:
        for e in curve.edges:
            (ax_, ay), (bx, by) = curve.segment(e)
            ax.plot([float(ax_) * scale, float(bx) * scale], [float(ay) * scale, float(by) * scale],
                    color="red", lw=0.6 * e.weight, alpha=0.6)
    ax.set_aspect("equal")
    ax.set_title(title or "final state")
    _save(fig, path)


def plot_curve(curve, poly, path, title=None):
    """Edges of a tropical curve; line width follows the weight."""
    fig, ax = plt.subplots(figsize=(6, 6))
    xy = _polygon_xy(poly)
    ax.plot(xy[:, 0], xy[:, 1], color="0.3", lw=1)
    for e in curve.edges:
        (ax_, ay), (bx, by) = curve.segment(e)
        ax.plot([float(ax_), float(bx)], [float(ay), float(by)], color="C0", lw=1.2 * e.weight)
        if e.weight > 1:
            ax.annotate(str(e.weight), ((float(ax_) + float(bx)) / 2, (float(ay) + float(by)) / 2),
                        color="C3", fontsize=8)
    ax.set_aspect("equal")
    ax.set_title(title or "tropical curve")
    _save(fig, path)


def plot_errors(run, path):
    """Sup error and Hausdorff distance against scale."""
    N = [r.scale for r in run.results]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(N, [r.sup_error for r in run.results], "o-", label="sup error")
    hd = [(r.scale, r.hausdorff) for r in run.results if r.hausdorff is not None]
    if hd:
        ax.loglog(*zip(*hd), "s--", label="Hausdorff")
    ax.set_xlabel("N")
    ax.legend()
    _save(fig, path)


def plot_cylinder(report, path, periods: int = 6):
    """Moving pattern drawn in lattice coordinates over a few translation periods."""
    from .sandpile.cylinder import bezout_pair

    a, b = bezout_pair(report.p, report.q)
    pat = report.pattern
    pts, vals = [], []
    for du in range(pat.shape[0]):
        for k in range(report.period * periods):
            h = pat[du, k % report.period]
            pts.append((du * a + k * report.p, du * b + k * report.q))
            vals.append(h)
    pts = np.array(pts)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.scatter(pts[:, 0], pts[:, 1], c=vals, cmap=HEIGHT_CMAP, vmin=0, vmax=3, marker="s", s=12)
    ax.set_aspect("equal")
    ax.set_title(f"soliton ({report.p}, {report.q})")
    _save(fig, path)


def plot_corner(report, path):
    """f0 - f_infinity with the negative-Laplacian cells marked."""
    r = report.radius
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.imshow((report.f0 - report.f).T, origin="lower", cmap="viridis",
              extent=(-r - 0.5, r + 0.5, -r - 0.5, r + 0.5))
    ii, jj = np.nonzero(report.defects)
    ax.scatter(ii - r, jj - r, s=4, color="red")
    ax.set_aspect("equal")
    ax.set_title(f"corner smoothing, {report.steps} steps")
    _save(fig, path)
