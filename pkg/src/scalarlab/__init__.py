"""Desk-scale laboratory for self-similar mixing flows and drift-diffusion experiments.

The package is organized around five layers:

* :mod:`scalarlab.geometry` -- the self-similar box, its factor-5 and
  factor-sqrt(2) tilings, box averages and piecewise-constant projections.
* :mod:`scalarlab.flow` -- schedules and the explicit incompressible
  velocity fields (building-block mixer, two-cell dissipator, universal
  dissipator, forward-backward field) plus the exact grid-permutation
  mixing oracle.
* :mod:`scalarlab.solver` -- semi-Lagrangian / spectral advection-diffusion
  solver on the box (Dirichlet data) and the torus.
* :mod:`scalarlab.characteristics` -- Monte Carlo backward stochastic
  characteristics, exit times and Feynman-Kac evaluation.
* :mod:`scalarlab.experiments` -- orchestrated dissipation sweeps, averaging
  checks, stability-constant fits and rate-exponent diagnostics.

A FastAPI service (:mod:`scalarlab.service`) exposes the operations to
multiple clients; the command line (:mod:`scalarlab.cli`) is a thin client
of the same handler layer.
"""

__version__ = "0.1.0"

from scalarlab.errors import NumericalBlowupError, ResolutionError

__all__ = ["NumericalBlowupError", "ResolutionError", "__version__"]
