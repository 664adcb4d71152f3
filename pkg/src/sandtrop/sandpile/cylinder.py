"""Half-plane windows modulo a lattice translation, for edge and soliton experiments.

For a primitive (p, q), the level u = p*j - q*i labels lines parallel to
(p, q). Fix (a, b) with p*b - q*a = 1; then (i, j) = u*(a, b) + k*(p, q)
is a unimodular change of coordinates, and identifying k modulo ``period``
quotients the lattice by period*(p, q). Levels u < 0 are sinks. Levels
above ``depth`` are ghosts that fire once per wave, so a wave adds to every
window cell its number of ghost neighbours and relaxes. After n waves the
window odometer is the least toppling function with boundary values 0
below and n above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import BudgetExceeded, DomainError
from . import _kernels as K
from .state import DEFAULT_BUDGET


def bezout_pair(p: int, q: int) -> tuple:
    """(a, b) with p*b - q*a = 1."""
    if math.gcd(p, q) != 1:
        raise DomainError(f"({p}, {q}) is not primitive")
    # extended Euclid on (p, -q): find b, a with p*b + (-q)*a = 1
    old_r, r = p, -q
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    b, a = old_s, old_t
    assert p * b - q * a == 1
    return a, b


@dataclass
class Cylinder:
    """Window of levels 0..depth, each holding ``period`` cells."""

    p: int
    q: int
    depth: int
    period: int = 2
    a: int = field(init=False)
    b: int = field(init=False)

    def __post_init__(self):
        self.a, self.b = bezout_pair(self.p, self.q)
        if self.depth < 1 or self.period < 1:
            raise DomainError("depth and period must be positive")
        L, N = self.depth + 1, self.period
        n = L * N
        steps = [(-self.q, self.b), (self.q, -self.b), (self.p, -self.a), (-self.p, self.a)]
        nbr = np.empty((n, 4), dtype=np.int64)
        ghosts = np.zeros(n, dtype=np.int64)
        for u in range(L):
            for k in range(N):
                v = u * N + k
                for d, (du, dk) in enumerate(steps):
                    uu = u + du
                    if uu < 0:
                        nbr[v, d] = -1
                    elif uu > self.depth:
                        nbr[v, d] = -1
                        ghosts[v] += 1
                    else:
                        nbr[v, d] = uu * N + (k + dk) % N
        self.nbr = nbr
        self.ghosts = ghosts
        self.levels = np.repeat(np.arange(L), N)
        self.heights = np.full(n, 3, dtype=np.int64)
        self.odometer = np.zeros(n, dtype=np.int64)
        self.waves = 0
        self.lost = 0

    @property
    def size(self) -> int:
        return self.nbr.shape[0]

    @property
    def norm(self) -> float:
        return math.hypot(self.p, self.q)

    def cell_ij(self, v: int) -> tuple:
        u, k = divmod(int(v), self.period)
        return (u * self.a + k * self.p, u * self.b + k * self.q)

    def grid(self, arr: np.ndarray) -> np.ndarray:
        """Reshape a flat per-cell array to (level, k)."""
        return arr.reshape(self.depth + 1, self.period)

    def wave(self, budget: int = DEFAULT_BUDGET) -> np.ndarray:
        """One wave from the ghost levels; returns this wave's toppling counts."""
        self.heights += self.ghosts
        odo = np.zeros(self.size, dtype=np.int64)
        frozen = np.zeros(self.size, dtype=np.bool_)
        lost, _, status = K.relax_fifo(self.heights, self.nbr, odo, frozen, int(budget))
        if status != K.OK:
            raise BudgetExceeded("cylinder wave exceeded its budget")
        self.lost += lost
        self.odometer += odo
        self.waves += 1
        return odo

    def defects(self) -> np.ndarray:
        return np.nonzero(self.heights < 3)[0]

    def level_profile(self) -> np.ndarray:
        """Per-level count of cells below height 3."""
        return (self.grid(self.heights) < 3).sum(axis=1)

    def is_periodic(self, arr=None) -> bool:
        """Bit-equal under the (p, q) translation, i.e. invariant in k."""
        g = self.grid(self.heights if arr is None else arr)
        return bool((g == g[:, :1]).all())

    def laplacian(self, f: np.ndarray, top_value: int) -> np.ndarray:
        return K.laplacian(f.astype(np.int64), self.nbr, self.ghosts * int(top_value))
