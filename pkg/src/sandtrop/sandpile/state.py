"""Sand states on rasterized regions: topplings, relaxation, waves, territories."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import ndimage

from ..errors import BudgetExceeded, ContractError, DomainError
from ..geometry import Region
from . import _kernels as K

DEFAULT_BUDGET = 10**10


@dataclass(frozen=True)
class CellGraph:
    """Flat view of a region: cell k sits at array index (ii[k], jj[k])."""

    ii: np.ndarray
    jj: np.ndarray
    ids: np.ndarray  # array-shaped; -1 off the region
    nbr: np.ndarray  # (n, 4), -1 for sinks


@lru_cache(maxsize=32)
def _graph_cached(key) -> CellGraph:
    shape, raw = key
    mask = np.frombuffer(raw, dtype=bool).reshape(shape)
    ii, jj = np.nonzero(mask)
    ids = -np.ones(shape, dtype=np.int64)
    ids[ii, jj] = np.arange(len(ii))
    nbr = np.empty((len(ii), 4), dtype=np.int64)
    for d, (di, dj) in enumerate(((1, 0), (-1, 0), (0, 1), (0, -1))):
        nbr[:, d] = ids[ii + di, jj + dj]  # the mask margin keeps indices in range
    for a in (ii, jj, ids, nbr):
        a.setflags(write=False)
    return CellGraph(ii, jj, ids, nbr)


def cell_graph(region: Region) -> CellGraph:
    return _graph_cached((region.mask.shape, region.mask.tobytes()))


@dataclass
class SandState:
    """Heights on the region's padded array; zero off the region."""

    region: Region
    heights: np.ndarray
    lost: int = 0

    def __post_init__(self):
        h = np.asarray(self.heights, dtype=np.int64)
        if h.shape != self.region.shape:
            raise ContractError("height grid does not match the region")
        if (h[~self.region.mask] != 0).any():
            raise ContractError("heights must vanish off the region")
        if (h < 0).any():
            raise ContractError("heights must be non-negative")
        self.heights = h
        self.lost = int(self.lost)

    def copy(self) -> "SandState":
        return SandState(self.region, self.heights.copy(), self.lost)

    def __getitem__(self, cell) -> int:
        if cell not in self.region:
            raise DomainError(f"{cell} is not in the region")
        return int(self.heights[self.region.index(cell)])

    def total(self) -> int:
        return int(self.heights.sum())

    def is_stable(self) -> bool:
        return bool((self.heights < 4).all())

    def flat(self) -> np.ndarray:
        g = cell_graph(self.region)
        return self.heights[g.ii, g.jj].copy()

    def equals(self, other: "SandState") -> bool:
        return self.lost == other.lost and np.array_equal(self.heights, other.heights)


@dataclass
class Odometer:
    region: Region
    counts: np.ndarray = field(repr=False)

    def __getitem__(self, cell) -> int:
        if cell not in self.region:
            return 0
        return int(self.counts[self.region.index(cell)])

    def total(self) -> int:
        return int(self.counts.sum())


def _scatter(region: Region, flat: np.ndarray) -> np.ndarray:
    g = cell_graph(region)
    out = np.zeros(region.shape, dtype=np.int64)
    out[g.ii, g.jj] = flat
    return out


def max_stable(region: Region) -> SandState:
    return SandState(region, np.where(region.mask, 3, 0).astype(np.int64))


def constant_state(region: Region, value: int) -> SandState:
    return SandState(region, np.where(region.mask, int(value), 0).astype(np.int64))


def add_grains(state: SandState, points) -> SandState:
    out = state.copy()
    for cell in points:
        if cell not in state.region:
            raise DomainError(f"{cell} is not in the region")
        out.heights[state.region.index(cell)] += 1
    return out


def topple(state: SandState, v) -> SandState:
    """One legal toppling at v."""
    if v not in state.region:
        raise DomainError(f"{v} is not in the region")
    i, j = state.region.index(v)
    if state.heights[i, j] < 4:
        raise ContractError(f"illegal toppling at {v}: height {state.heights[i, j]}")
    out = state.copy()
    out.heights[i, j] -= 4
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        if state.region.mask[i + di, j + dj]:
            out.heights[i + di, j + dj] += 1
        else:
            out.lost += 1
    return out


def _schedule_code(schedule) -> int:
    if isinstance(schedule, str):
        if schedule not in K.SCHEDULES:
            raise DomainError(f"unknown schedule {schedule!r}")
        return K.SCHEDULES[schedule]
    return int(schedule)


def relax(state: SandState, schedule="fifo", budget: int = DEFAULT_BUDGET, seed: int = 0):
    """Stabilize; returns (stable state, odometer). The result does not depend on the schedule."""
    g = cell_graph(state.region)
    h = state.heights[g.ii, g.jj].copy()
    odo = np.zeros(len(h), dtype=np.int64)
    frozen = np.zeros(len(h), dtype=np.bool_)
    lost, done, status = K.run_relax(h, g.nbr, odo, frozen, int(budget), _schedule_code(schedule), int(seed))
    out = SandState(state.region, _scatter(state.region, h), state.lost + lost)
    odometer = Odometer(state.region, _scatter(state.region, odo))
    if status != K.OK:
        raise BudgetExceeded(f"relaxation exceeded {budget} topplings", partial=(out, odometer))
    return out, odometer


def laplacian(region: Region, H: np.ndarray) -> np.ndarray:
    """-4 H(v) + sum of H over the four neighbours, with H taken as 0 off the region."""
    H = np.where(region.mask, H, 0)
    out = -4 * H
    out[1:, :] += H[:-1, :]
    out[:-1, :] += H[1:, :]
    out[:, 1:] += H[:, :-1]
    out[:, :-1] += H[:, 1:]
    return np.where(region.mask, out, 0)


def territories(state: SandState) -> list:
    """Connected components of height-3 cells with at least two cells."""
    if not state.is_stable():
        raise ContractError("territories are defined for stable states")
    lab, n = ndimage.label((state.heights == 3) & state.region.mask)
    out = []
    sinks = state.region.boundary_mask
    for k in range(1, n + 1):
        m = lab == k
        size = int(m.sum())
        if size < 2:
            continue
        grown = ndimage.binary_dilation(m)
        out.append(Territory(m, bool((grown & sinks).any()), size))
    return out


@dataclass(frozen=True)
class Territory:
    mask: np.ndarray = field(repr=False)
    touches_boundary: bool
    size: int

    def __contains__(self, index) -> bool:
        return bool(self.mask[index])


def in_territory(state: SandState, v) -> bool:
    i, j = state.region.index(v)
    if state.heights[i, j] != 3:
        return False
    h3 = (state.heights == 3) & state.region.mask
    return any(h3[i + di, j + dj] for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)))


def send_wave(state: SandState, v, budget: int = DEFAULT_BUDGET):
    """Add a grain at v, topple v, relax with v frozen, remove the grain.

    Returns (new state, per-cell toppling counts of this wave as an array).
    """
    if v not in state.region:
        raise DomainError(f"{v} is not in the region")
    if not state.is_stable():
        raise ContractError("waves start from a stable state")
    if not in_territory(state, v):
        raise DomainError(f"{v} is not inside a territory")
    g = cell_graph(state.region)
    k = int(g.ids[state.region.index(v)])
    h = state.heights[g.ii, g.jj].copy()
    odo = np.zeros(len(h), dtype=np.int64)
    frozen = np.zeros(len(h), dtype=np.bool_)
    h[k] += 1
    lost = K._topple(h, g.nbr, odo, k, 1)
    frozen[k] = True
    more, _, status = K.relax_fifo(h, g.nbr, odo, frozen, int(budget))
    if status != K.OK:
        raise BudgetExceeded("wave exceeded its budget")
    h[k] -= 1
    out = SandState(state.region, _scatter(state.region, h), state.lost + lost + more)
    return out, _scatter(state.region, odo)


def wave_decomposition(state: SandState, v, max_waves: int = 10**6):
    """Send waves from v until v leaves its territory, then add a grain and relax.

    Returns (final state, number of waves).
    """
    m = 0
    s = state
    while in_territory(s, v):
        if m >= max_waves:
            raise BudgetExceeded("wave decomposition did not finish", partial=s)
        s, _ = send_wave(s, v)
        m += 1
    final, _ = relax(add_grains(s, [v]))
    return final, m
