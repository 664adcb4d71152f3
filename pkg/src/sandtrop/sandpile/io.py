"""Plain-text exports: CSV cell tables and P2 greyscale images."""

from __future__ import annotations

import numpy as np

GREY = {0: 0, 1: 85, 2: 170, 3: 255}


def _rows(region, values):
    ii, jj = np.nonzero(region.mask)
    x0, y0 = region.origin
    return zip((ii + x0).tolist(), (jj + y0).tolist(), values[ii, jj].tolist())


def write_cell_csv(path, region, values, column: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"x,y,{column}\n")
        for x, y, v in _rows(region, values):
            fh.write(f"{x},{y},{v}\n")


def write_state_csv(path, state) -> None:
    write_cell_csv(path, state.region, state.heights, "height")


def write_odometer_csv(path, odometer) -> None:
    write_cell_csv(path, odometer.region, odometer.counts, "h")


def read_cell_csv(path) -> dict:
    out = {}
    with open(path) as fh:
        next(fh)
        for line in fh:
            x, y, v = line.strip().split(",")
            out[(int(x), int(y))] = int(v)
    return out


def pgm_lines(heights: np.ndarray, mask: np.ndarray) -> list:
    """P2 rows with y increasing upwards; cells off the mask are black."""
    w, h = heights.shape
    lines = ["P2", f"{w} {h}", "255"]
    lut = np.array([GREY[0], GREY[1], GREY[2], GREY[3]])
    grey = np.where(mask, lut[np.clip(heights, 0, 3)], 0)
    for j in range(h - 1, -1, -1):
        lines.append(" ".join(str(int(g)) for g in grey[:, j]))
    return lines


def write_pgm(path, state) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(pgm_lines(state.heights, state.region.mask)) + "\n")


def write_pgm_array(path, heights: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(pgm_lines(heights, np.ones(heights.shape, dtype=bool))) + "\n")


def read_pgm(path) -> np.ndarray:
    """Parse a P2 file into a (width, height) array indexed like the writer's input."""
    with open(path) as fh:
        tokens = fh.read().split()
    if tokens[0] != "P2":
        raise ValueError("not a P2 file")
    w, h = int(tokens[1]), int(tokens[2])
    vals = np.array([int(t) for t in tokens[4:4 + w * h]]).reshape(h, w)
    return vals[::-1, :].T.copy()
