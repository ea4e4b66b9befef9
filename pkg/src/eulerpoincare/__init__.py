"""Discrete exterior calculus, discrete connections and Euler-Poincare reduction
for lattice field theories with values in SO(n), with a harmonic-map solver."""
from . import connections, forms, harmonic, liegroup, mesh, noether, variational
from .connections import (DiscreteField, ReducedField, curvature, curvature_field, holonomy,
                          is_flat, reconstruct, reduce)
from .errors import *  # noqa: F401,F403
from .forms import Cochain, codifferential, coboundary, hodge, pair
from .harmonic import (HarmonicProblem, HarmonicSolution, Momenta, conservation_checks,
                       fe_residual, momenta, preset_problem, solve)
from .mesh import Chain, DualMesh, Edge, Face, Mesh, Region, Vertex, boundary, dual_cell
from .noether import NoetherCurrents, noether_currents, noether_residual, theta_L, theta_l
from .variational import (LagrangianPair, action_sum, el_residual, ep_residual,
                          harmonic_lagrangian, reduced_action_sum)

__version__ = "0.1.0"
