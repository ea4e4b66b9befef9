"""Reduce a vertex field to a flat connection and integrate it back.

Run with ``python3 demos/reduction_roundtrip.py``.
"""
import numpy as np

from eulerpoincare import liegroup as lg
from eulerpoincare.connections import (DiscreteField, ReducedField, flatness_defect, holonomy,
                                       reconstruct, reduce, staircase_path)
from eulerpoincare.errors import NotFlat
from eulerpoincare.mesh import Mesh, Vertex

rng = np.random.default_rng(5)
mesh = Mesh(8, 6)
phi = DiscreteField.random(mesh, 3, rng)

# u = phi_i^T phi_{i+1}, v = phi_j^T phi_{j+1}: the plaquettes telescope.
omega = reduce(phi)
print("curvature defect of reduce(phi):", flatness_defect(omega))

# Holonomy along two different staircases between the same corners agrees.
a = holonomy(omega, staircase_path(Vertex(0, 0), "EEEEEEENNNNN"))
b = holonomy(omega, staircase_path(Vertex(0, 0), "NENENENENEEE"))
print("path dependence:", np.abs(a - b).max())

# Integration recovers phi, up to one global rotation fixed by g0.
back = reconstruct(omega, g0=phi[0, 0])
print("round trip error:", np.abs(back.values - phi.values).max())
h = lg.random_rotation(3, rng)
shifted = reconstruct(omega, g0=h @ phi[0, 0])
print("other base value gives h * phi:", np.abs(shifted.values - h @ phi.values).max())

# A constant connection with non-commuting East and North values is curved.
x = lg.exp(lg.random_algebra(3, rng))
y = lg.exp(lg.random_algebra(3, rng))
try:
    reconstruct(ReducedField.constant(mesh, x, y))
except NotFlat as exc:
    print("rejected:", exc)
