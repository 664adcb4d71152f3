"""Smoothing of superharmonic integer functions by unit decrements.

Each step lowers f by one on the largest cell set S for which f - 1_S is
still superharmonic. The iteration stops when S is empty. The limit is the
least integer superharmonic function below f0 with the same values outside
the free cells, which on corner inputs is the smoothed corner f_infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import BudgetExceeded, ContractError
from . import _kernels as K

DEFAULT_SMOOTH_BUDGET = 100_000


@dataclass
class SmoothingResult:
    f: np.ndarray
    steps: int
    history: list = field(default_factory=list, repr=False)  # f_n snapshots when requested


def smooth_graph(f0, nbr, bsum, budget: int = DEFAULT_SMOOTH_BUDGET, keep_history: bool = False,
                 check: bool = True) -> SmoothingResult:
    """Smoothing on a flat graph; ``bsum`` holds the fixed-neighbour sum per free cell."""
    f = np.array(f0, dtype=np.int64)
    nbr = np.asarray(nbr, dtype=np.int64)
    bsum = np.asarray(bsum, dtype=np.int64)
    if check and (K.laplacian(f, nbr, bsum) > 0).any():
        raise ContractError("initial function is not superharmonic on the free cells")
    history = [f.copy()] if keep_history else []
    steps = 0
    while True:
        S = K.smoothing_set(f, nbr, bsum)
        if not S.any():
            return SmoothingResult(f, steps, history)
        if steps >= budget:
            raise BudgetExceeded(f"smoothing did not stabilize within {budget} steps",
                                 partial=SmoothingResult(f, steps, history))
        f = f - S
        steps += 1
        if keep_history:
            history.append(f.copy())


def grid_graph(free: np.ndarray, f: np.ndarray):
    """Neighbour table and fixed-neighbour sums for the True cells of ``free``.

    Cells off the array edge do not exist; a free cell must not touch the edge.
    """
    free = np.asarray(free, dtype=bool)
    if free[0, :].any() or free[-1, :].any() or free[:, 0].any() or free[:, -1].any():
        raise ContractError("free cells must not touch the array edge")
    ii, jj = np.nonzero(free)
    ids = -np.ones(free.shape, dtype=np.int64)
    ids[ii, jj] = np.arange(len(ii))
    nbr = np.empty((len(ii), 4), dtype=np.int64)
    bsum = np.zeros(len(ii), dtype=np.int64)
    for d, (di, dj) in enumerate(((1, 0), (-1, 0), (0, 1), (0, -1))):
        nb = ids[ii + di, jj + dj]
        nbr[:, d] = nb
        bsum += np.where(nb < 0, f[ii + di, jj + dj], 0)
    return ii, jj, nbr, bsum


def smooth_linear_min(f0: np.ndarray, free: np.ndarray | None = None,
                      budget: int = DEFAULT_SMOOTH_BUDGET, keep_history: bool = False) -> SmoothingResult:
    """Smooth an integer grid. By default every cell except the outer ring is free.

    The returned ``f`` is a full grid; fixed cells keep their f0 values.
    """
    f0 = np.asarray(f0, dtype=np.int64)
    if free is None:
        free = np.zeros(f0.shape, dtype=bool)
        free[1:-1, 1:-1] = True
    ii, jj, nbr, bsum = grid_graph(free, f0)
    res = smooth_graph(f0[ii, jj], nbr, bsum, budget, keep_history)

    def full(flat):
        g = f0.copy()
        g[ii, jj] = flat
        return g

    return SmoothingResult(full(res.f), res.steps, [full(h) for h in res.history])


def grid_laplacian(f: np.ndarray) -> np.ndarray:
    """Laplacian on the array interior; the outer ring is reported as 0."""
    f = np.asarray(f, dtype=np.int64)
    out = np.zeros_like(f)
    out[1:-1, 1:-1] = f[2:, 1:-1] + f[:-2, 1:-1] + f[1:-1, 2:] + f[1:-1, :-2] - 4 * f[1:-1, 1:-1]
    return out
