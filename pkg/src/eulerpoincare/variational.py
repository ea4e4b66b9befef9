"""Discrete Lagrangians on G^3, their reductions to G^2, and field equations.

Residuals of the Euler-Lagrange and Euler-Poincare equations are so(n)*
elements (antisymmetric matrices, see :mod:`eulerpoincare.liegroup`) obtained by
differentiating along exponential curves.  Residual fields are returned as
arrays of shape ``(width, height, n, n)`` indexed by vertex, with NaN where the
stencil does not fit in the mesh.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import liegroup as lg
from .connections import DiscreteField, ReducedField
from .errors import BoundaryViolation, RegionOverflow, StencilOverflow
from .mesh import Mesh, Region, Vertex


@dataclass(frozen=True)
class LagrangianPair:
    """A left-invariant ``L(g1, g2, g3)`` together with ``l(u, v)``.

    The two are tied by ``L(g1, g2, g3) = l(g1^-1 g2, g1^-1 g3)``.  Optional
    ``grad_L`` / ``grad_l`` return Euclidean (matrix-entry) gradients per slot;
    when given they replace finite differences.
    """

    L: Callable[..., float]
    l: Callable[..., float]
    grad_L: Callable | None = None
    grad_l: Callable | None = None
    fd_step: float = lg.FD_STEP
    name: str = "custom"

    @property
    def analytic_gradients(self) -> bool:
        return self.grad_L is not None and self.grad_l is not None

    def finite_differences(self, fd_step: float | None = None) -> "LagrangianPair":
        """Same Lagrangian with analytic gradients switched off."""
        return replace(self, grad_L=None, grad_l=None,
                       fd_step=self.fd_step if fd_step is None else fd_step)

    def L_covector(self, args, slot: int, side: str = "left") -> np.ndarray:
        if self.grad_L is not None:
            return lg.gradient_covector(self.grad_L(*args)[slot], args[slot], side)
        return lg.slot_covector(self.L, args, slot, side, self.fd_step)

    def l_covector(self, args, slot: int, side: str = "left") -> np.ndarray:
        if self.grad_l is not None:
            return lg.gradient_covector(self.grad_l(*args)[slot], args[slot], side)
        return lg.slot_covector(self.l, args, slot, side, self.fd_step)


def harmonic_lagrangian(spacing: float = 1.0, analytic: bool = True) -> LagrangianPair:
    """``L = -(tr(g1^T g2) + tr(g1^T g3)) / h^2`` and ``l = -(tr u + tr v) / h^2``.

    This is the trace discretisation of the harmonic-map energy with lattice
    spacing ``h``.
    """
    c = 1.0 / spacing**2

    def L(g1, g2, g3):
        return -c * (np.trace(g1.T @ g2) + np.trace(g1.T @ g3))

    def l(u, v):
        return -c * (np.trace(u) + np.trace(v))

    def grad_L(g1, g2, g3):
        return (-c * (g2 + g3), -c * g1, -c * g1)

    def grad_l(u, v):
        eye = np.eye(u.shape[-1])
        return (-c * eye, -c * eye)

    return LagrangianPair(L, l, grad_L if analytic else None, grad_l if analytic else None,
                          name="harmonic")


def from_reduced(l: Callable, grad_l: Callable | None = None,
                 name: str = "custom") -> LagrangianPair:
    """Build the invariant ``L = l o Psi`` from a reduced Lagrangian."""

    def L(g1, g2, g3):
        return l(g1.T @ g2, g1.T @ g3)

    grad_L = None
    if grad_l is not None:
        def grad_L(g1, g2, g3):
            gu, gv = grad_l(g1.T @ g2, g1.T @ g3)
            return (g2 @ gu.T + g3 @ gv.T, g1 @ gu, g1 @ gv)

    return LagrangianPair(L, l, grad_L, grad_l, name=name)


def pair_defects(lag: LagrangianPair, n: int, rng: np.random.Generator,
                 trials: int = 20) -> tuple[float, float]:
    """Max violations of ``L = l o Psi`` and of left invariance on random samples."""
    compat = invariance = 0.0
    for _ in range(trials):
        g1, g2, g3, g = (lg.random_rotation(n, rng) for _ in range(4))
        val = lag.L(g1, g2, g3)
        compat = max(compat, abs(val - lag.l(g1.T @ g2, g1.T @ g3)))
        invariance = max(invariance, abs(val - lag.L(g @ g1, g @ g2, g @ g3)))
    return compat, invariance


# -- action sums ----------------------------------------------------------------


def _region(mesh: Mesh, region: Region | None) -> Region:
    region = Region.full(mesh) if region is None else region
    if not region.fits(mesh):
        raise RegionOverflow(f"{region} needs vertices outside {mesh}")
    return region


def action_sum(lag: LagrangianPair, phi: DiscreteField, region: Region | None = None) -> float:
    """``sum over (i, j) in U of L(phi[i,j], phi[i+1,j], phi[i,j+1])``."""
    p = phi.values
    return float(sum(lag.L(p[b.i, b.j], p[b.i + 1, b.j], p[b.i, b.j + 1])
                     for b in _region(phi.mesh, region).bases()))


def reduced_action_sum(lag: LagrangianPair, omega: ReducedField,
                       region: Region | None = None) -> float:
    """``sum over (i, j) in U of l(u[i,j], v[i,j])``."""
    return float(sum(lag.l(omega.u[b.i, b.j], omega.v[b.i, b.j])
                     for b in _region(omega.mesh, region).bases()))


# -- residuals --------------------------------------------------------------------


def _check_stencil(mesh: Mesh, at) -> tuple[int, int]:
    i, j = (at.i, at.j) if isinstance(at, Vertex) else at
    if not (1 <= i <= mesh.nx - 2 and 1 <= j <= mesh.ny - 2):
        raise StencilOverflow(f"stencil at ({i}, {j}) leaves {mesh}")
    return i, j


def el_residual(lag: LagrangianPair, phi: DiscreteField, at) -> np.ndarray:
    """Discrete Euler-Lagrange residual at an interior vertex.

    Pairs with ``xi`` to the derivative of the three terms of the action that
    contain ``phi[i,j]`` along ``phi[i,j] -> exp(t xi) phi[i,j]``.
    """
    i, j = _check_stencil(phi.mesh, at)
    p = phi.values
    return (lag.L_covector((p[i, j], p[i + 1, j], p[i, j + 1]), 0)
            + lag.L_covector((p[i - 1, j], p[i, j], p[i - 1, j + 1]), 1)
            + lag.L_covector((p[i, j - 1], p[i + 1, j - 1], p[i, j]), 2))


def ep_residual(lag: LagrangianPair, omega: ReducedField, at) -> np.ndarray:
    """Discrete Euler-Poincare residual at an interior vertex.

    ``[R*_u dl(., v) at (i,j) - L*_u dl(., v) at (i-1,j)]
    + [R*_v dl(u, .) at (i,j) - L*_v dl(u, .) at (i,j-1)]``, where ``R*``
    differentiates along ``exp(t xi) u`` and ``L*`` along ``u exp(t xi)``.
    """
    i, j = _check_stencil(omega.mesh, at)
    u, v = omega.u, omega.v
    here = (u[i, j], v[i, j])
    west = (u[i - 1, j], v[i - 1, j])
    south = (u[i, j - 1], v[i, j - 1])
    return ((lag.l_covector(here, 0, "left") - lag.l_covector(west, 0, "right"))
            + (lag.l_covector(here, 1, "left") - lag.l_covector(south, 1, "right")))


def _residual_field(fn, mesh: Mesh, n: int) -> np.ndarray:
    out = np.full(mesh.vertex_shape + (n, n), np.nan)
    for v in mesh.interior_vertices():
        out[v.i, v.j] = fn(v)
    return out


def el_residual_field(lag: LagrangianPair, phi: DiscreteField) -> np.ndarray:
    return _residual_field(lambda v: el_residual(lag, phi, v), phi.mesh, phi.n)


def ep_residual_field(lag: LagrangianPair, omega: ReducedField) -> np.ndarray:
    return _residual_field(lambda v: ep_residual(lag, omega, v), omega.mesh, omega.n)


def sup_norm(field: np.ndarray) -> float:
    """Largest absolute entry, ignoring NaN padding (0 for an empty field)."""
    a = np.asarray(field)
    if a.size == 0 or np.all(np.isnan(a)):
        return 0.0
    return float(np.nanmax(np.abs(a)))


# -- variations -----------------------------------------------------------------


def induced_variations(omega: ReducedField, theta: np.ndarray,
                       region: Region | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Edge variations induced by body variations ``theta`` at the vertices.

    ``du[i,j] = u[i,j] theta[i+1,j] - theta[i,j] u[i,j]`` and
    ``dv[i,j] = v[i,j] theta[i,j+1] - theta[i,j] v[i,j]``, i.e. the tangent
    vectors of ``reduce(phi exp(t theta))`` at ``t = 0``.

    Raises:
        BoundaryViolation: if ``theta`` is nonzero on the boundary of the
            action region.
    """
    mesh = omega.mesh
    region = _region(mesh, region)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != mesh.vertex_shape + (omega.n, omega.n):
        raise ValueError(f"theta has shape {theta.shape}")
    for b in region.boundary_vertices():
        if np.any(theta[b.i, b.j] != 0):
            raise BoundaryViolation(f"variation is nonzero at boundary vertex ({b.i}, {b.j})")
    u, v = omega.u, omega.v
    du = u @ theta[1:, :] - theta[:-1, :] @ u
    dv = v @ theta[:, 1:] - theta[:, :-1] @ v
    return du, dv
