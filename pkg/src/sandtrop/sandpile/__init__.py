"""Abelian sandpile engine: relaxations, odometers, waves, cylinders, smoothing."""

from .cylinder import Cylinder, bezout_pair
from .smoothing import SmoothingResult, grid_laplacian, smooth_graph, smooth_linear_min
from .state import (
    DEFAULT_BUDGET,
    Odometer,
    SandState,
    Territory,
    add_grains,
    cell_graph,
    constant_state,
    in_territory,
    laplacian,
    max_stable,
    relax,
    send_wave,
    territories,
    topple,
    wave_decomposition,
)

SCHEDULES = ("fifo", "lifo", "random", "generations")

__all__ = [
    "Cylinder",
    "DEFAULT_BUDGET",
    "Odometer",
    "SCHEDULES",
    "SandState",
    "SmoothingResult",
    "Territory",
    "add_grains",
    "bezout_pair",
    "cell_graph",
    "constant_state",
    "grid_laplacian",
    "in_territory",
    "laplacian",
    "max_stable",
    "relax",
    "send_wave",
    "smooth_graph",
    "smooth_linear_min",
    "territories",
    "topple",
    "wave_decomposition",
]
