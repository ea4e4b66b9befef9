"""Poincare-Cartan forms, Noether currents and the discrete conservation law.

Slots of the Lagrangians are numbered 1, 2, 3 here, following the current
names ``J1, J2, J3``.  A face with base ``(a, b)`` carries the triple
``(phi[a,b], phi[a+1,b], phi[a,b+1])`` and its currents are stored on the dual
vertex ``(a, b)`` at the face centre.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import liegroup as lg
from .connections import DiscreteField
from .errors import StencilOverflow
from .mesh import Mesh, Vertex
from .variational import LagrangianPair


def _side(side: str) -> str:
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return side


def theta_L(lag: LagrangianPair, slot: int, base, xis, side: str = "left") -> float:
    """Poincare-Cartan form of ``L`` in ``slot`` (1..3) on a tangent triple.

    The tangent at ``g_k`` is given by an algebra element ``xis[k]``:
    ``xi g`` for ``side="left"`` and ``g xi`` for ``side="right"``.  Only the
    component in ``slot`` contributes.
    """
    k = slot - 1
    return float(lg.pair(lag.L_covector(tuple(base), k, _side(side)), xis[k]))


def theta_l(lag: LagrangianPair, slot: int, base, xis, form: str = "pairing") -> float:
    """Poincare-Cartan forms of the reduced Lagrangian at ``(u, v)``.

    Slot 1 is ``-<dl(., v), xi1 u> - <dl(u, .), xi1 v>``, or equivalently
    (``form="curve"``) the derivative of ``l(h^-1 u, h^-1 v)`` along
    ``h = exp(t xi1)``.  Slots 2 and 3 are ``<dl(., v), u xi2>`` and
    ``<dl(u, .), v xi3>``.
    """
    u, v = base
    if slot == 1:
        xi = xis[0]
        if form == "curve":
            step = lag.fd_step
            hp, hm = lg.exp(-step * xi), lg.exp(step * xi)
            return float((lag.l(hp @ u, hp @ v) - lag.l(hm @ u, hm @ v)) / (2 * step))
        return float(-lg.pair(lag.l_covector((u, v), 0, "left"), xi)
                     - lg.pair(lag.l_covector((u, v), 1, "left"), xi))
    if slot == 2:
        return float(lg.pair(lag.l_covector((u, v), 0, "right"), xis[1]))
    if slot == 3:
        return float(lg.pair(lag.l_covector((u, v), 1, "right"), xis[2]))
    raise ValueError(f"slot must be 1, 2 or 3, got {slot}")


def psi_hat(g1, g2, g3) -> tuple[np.ndarray, np.ndarray]:
    """``(g1^-1 g2, g1^-1 g3)``."""
    return g1.T @ g2, g1.T @ g3


def currents(lag: LagrangianPair, g1, g2, g3) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(J1, J2, J3)`` at a triple: contractions of the Poincare-Cartan forms of
    ``L`` with the fundamental vector field ``g -> xi g``, as so(n)* elements."""
    args = (g1, g2, g3)
    return tuple(lag.L_covector(args, k, "left") for k in range(3))


@dataclass
class NoetherCurrents:
    """``eta_x[a, b]`` and ``eta_y[a, b]`` on the dual vertices of ``mesh``."""

    mesh: Mesh
    eta_x: np.ndarray
    eta_y: np.ndarray
    redundancy: np.ndarray  # J1 + J2 + J3 per face

    @property
    def n(self) -> int:
        return self.eta_x.shape[-1]


def noether_currents(lag: LagrangianPair, phi: DiscreteField) -> NoetherCurrents:
    mesh, n, p = phi.mesh, phi.n, phi.values
    shape = mesh.face_shape + (n, n)
    eta_x, eta_y, red = np.empty(shape), np.empty(shape), np.empty(shape)
    for a in range(mesh.nx - 1):
        for b in range(mesh.ny - 1):
            j1, j2, j3 = currents(lag, p[a, b], p[a + 1, b], p[a, b + 1])
            eta_x[a, b], eta_y[a, b], red[a, b] = j2, j3, j1 + j2 + j3
    return NoetherCurrents(mesh, eta_x, eta_y, red)


def noether_residual(c: NoetherCurrents, at) -> np.ndarray:
    """``(eta_x(r) - eta_x(west of r)) + (eta_y(r) - eta_y(south of r))``.

    ``at`` is a dual vertex; it must have west and south neighbours, which
    makes its lower-left corner an interior primal vertex.
    """
    a, b = (at.i, at.j) if isinstance(at, Vertex) else at
    nxd, nyd = c.mesh.face_shape
    if not (1 <= a < nxd and 1 <= b < nyd):
        raise StencilOverflow(f"dual vertex ({a}, {b}) lacks a west or south neighbour")
    return (c.eta_x[a, b] - c.eta_x[a - 1, b]) + (c.eta_y[a, b] - c.eta_y[a, b - 1])


def noether_residual_field(c: NoetherCurrents) -> np.ndarray:
    """Backward-difference divergence on all dual vertices (NaN where undefined)."""
    out = np.full(c.eta_x.shape, np.nan)
    out[1:, 1:] = (c.eta_x[1:, 1:] - c.eta_x[:-1, 1:]) + (c.eta_y[1:, 1:] - c.eta_y[1:, :-1])
    return out
