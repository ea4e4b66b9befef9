"""Noether currents of the trace Lagrangian, on and off a solution.

Run with ``python3 demos/noether_currents.py``.
"""
import numpy as np

from eulerpoincare import harmonic as hm
from eulerpoincare import liegroup as lg
from eulerpoincare import noether as no
from eulerpoincare import variational as va
from eulerpoincare.connections import DiscreteField

lag = va.harmonic_lagrangian()
sol = hm.solve(hm.preset_problem("random-smooth", 3, 8, 8, seed=1), tol=1e-12)
phi = sol.field

cur = no.noether_currents(lag, phi)
print("J1 + J2 + J3, worst face:", np.abs(cur.redundancy).max())
print("divergence at the solution:", va.sup_norm(no.noether_residual_field(cur)))

# Kick one vertex.  The divergence lights up on the dual vertices whose
# lower-left corner sits in the stencil of the kicked vertex, and it is
# exactly minus the Euler-Lagrange residual there.
p = phi.values.copy()
p[4, 3] = lg.exp(lg.random_algebra(3, np.random.default_rng(0), 0.1)) @ p[4, 3]
bent = DiscreteField(phi.mesh, p)
res = no.noether_residual_field(no.noether_currents(lag, bent))
el = va.el_residual_field(lag, bent)
size = np.nan_to_num(np.abs(res)).max(axis=(-1, -2))
print("dual vertices with divergence > 1e-6:", np.argwhere(size > 1e-6).tolist())
print("|div + EL|:", np.nanmax(np.abs(res[1:, 1:] + el[1:-1, 1:-1])))
