"""Advection-diffusion solver on the box (Dirichlet) and the torus."""

from scalarlab.solver.boundary import BoundaryData
from scalarlab.solver.core import (
    RunRecord,
    SolverConfig,
    advance,
    energy_dissipation_series,
    heat_convolve,
    norms,
)

__all__ = [
    "BoundaryData",
    "SolverConfig",
    "RunRecord",
    "advance",
    "heat_convolve",
    "norms",
    "energy_dissipation_series",
]
