"""Plane-strain elasticity with a restoration force: Neumann-to-Dirichlet
operators, monotonicity comparisons, localized potentials, probing loads and
Lipschitz-ratio sweeps on structured unit-square meshes."""

from elastntd._core import *  # noqa: F401,F403
from elastntd._core import __version__  # noqa: F401
