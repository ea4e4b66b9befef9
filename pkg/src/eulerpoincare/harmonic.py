"""Discrete harmonic maps into SO(n) with symmetric Lagrange multipliers.

The field equations at an interior vertex read

    phi[i+1,j] + phi[i-1,j] + phi[i,j+1] + phi[i,j-1] = phi[i,j] Lam[i,j]

with ``Lam`` symmetric.  :func:`solve` relaxes them by Gauss-Seidel sweeps in
which each vertex is replaced by the polar (SO(n)) factor of its neighbour sum.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging

import numpy as np

from . import liegroup as lg
from .connections import DiscreteField, ReducedField, curvature_field, reduce
from .errors import DimensionMismatch, NoConvergence, StencilOverflow
from .forms import codifferential
from .mesh import Mesh, Vertex
from .variational import LagrangianPair, harmonic_lagrangian

log = logging.getLogger(__name__)

SWEEP_ORDERS = ("row-major", "red-black")
PRESETS = ("constant", "twist", "random-smooth")


@dataclass
class HarmonicProblem:
    """Dirichlet data for the harmonic-map problem.

    Attributes:
        mesh: The vertex grid.
        boundary: Array ``(width, height, n, n)``; only boundary vertices are
            read, interior entries are ignored.
        spacing: Lattice spacing ``h``.  It only rescales the multipliers and is
            kept for bookkeeping.
    """

    mesh: Mesh
    boundary: np.ndarray
    spacing: float = 1.0

    def __post_init__(self):
        b = np.array(self.boundary, dtype=float)
        if b.ndim != 4 or b.shape[:2] != self.mesh.vertex_shape:
            raise DimensionMismatch(f"boundary array {b.shape} does not fit {self.mesh}")
        lg.check_rotation(b[self.boundary_mask])
        self.boundary = b

    @property
    def n(self) -> int:
        return self.boundary.shape[-1]

    @property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.mesh.vertex_shape, dtype=bool)
        mask[[0, -1], :] = True
        mask[:, [0, -1]] = True
        return mask

    def left_translate(self, g: np.ndarray) -> "HarmonicProblem":
        return HarmonicProblem(self.mesh, np.asarray(g) @ self.boundary, self.spacing)


def perimeter(mesh: Mesh) -> list[tuple[int, int]]:
    """Boundary vertices in counter-clockwise order starting at ``(0, 0)``."""
    w, h = mesh.nx, mesh.ny
    path = [(i, 0) for i in range(w - 1)]
    path += [(w - 1, j) for j in range(h - 1)]
    path += [(i, h - 1) for i in range(w - 1, 0, -1)]
    path += [(0, j) for j in range(h - 1, 0, -1)]
    return path


def _geodesic(a: np.ndarray, b: np.ndarray, s: float) -> np.ndarray:
    return a @ lg.exp(s * lg.log(a.T @ b))


def preset_problem(name: str, n: int, width: int, height: int, seed: int | None = 0,
                   twist: float = 1.0, spread: float = 1.0) -> HarmonicProblem:
    """Seedable boundary data.

    ``"constant"`` is a single rotation (the identity when ``seed`` is None);
    ``"twist"`` rotates in the first coordinate plane by
    ``twist * sin(2 pi s)`` with ``s`` the arclength fraction along the
    perimeter; ``"random-smooth"`` interpolates four random corner rotations
    along geodesics.
    """
    mesh = Mesh(width, height)
    vals = np.broadcast_to(np.eye(n), mesh.vertex_shape + (n, n)).copy()
    rng = np.random.default_rng(seed)
    if name == "constant":
        if seed is not None:
            vals[:] = lg.random_rotation(n, rng)
    elif name == "twist":
        if n < 2:
            raise ValueError("the twist preset needs n >= 2")
        ring = perimeter(mesh)
        for k, (i, j) in enumerate(ring):
            vals[i, j] = lg.embed(lg.rotation_2d(twist * np.sin(2 * np.pi * k / len(ring))), n)
    elif name == "random-smooth":
        c00, c10, c11, c01 = (lg.exp(lg.random_algebra(n, rng, spread)) for _ in range(4))
        w, h = width - 1, height - 1
        for i in range(width):
            vals[i, 0] = _geodesic(c00, c10, i / w)
            vals[i, -1] = _geodesic(c01, c11, i / w)
        for j in range(height):
            vals[0, j] = _geodesic(c00, c01, j / h)
            vals[-1, j] = _geodesic(c10, c11, j / h)
    else:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")
    return HarmonicProblem(mesh, vals)


def initial_guess(problem: HarmonicProblem) -> np.ndarray:
    """Polar projection of the bilinearly blended (Coons) boundary.

    The blend is linear in the boundary data, so the guess commutes with
    global left translations.
    """
    b = problem.boundary
    w, h = problem.mesh.vertex_shape
    s = np.linspace(0.0, 1.0, w)[:, None, None, None]
    t = np.linspace(0.0, 1.0, h)[None, :, None, None]
    left, right = b[0][None], b[-1][None]
    bottom, top = b[:, 0][:, None], b[:, -1][:, None]
    corners = ((1 - s) * (1 - t) * b[0, 0] + s * (1 - t) * b[-1, 0]
               + (1 - s) * t * b[0, -1] + s * t * b[-1, -1])
    blend = (1 - s) * left + s * right + (1 - t) * bottom + t * top - corners
    guess = lg.polar_project(blend, min_singular_value=0.0)
    mask = problem.boundary_mask
    guess[mask] = b[mask]
    return guess


# -- field equations ------------------------------------------------------------


def neighbor_sums(values: np.ndarray) -> np.ndarray:
    """``W[i,j]`` for the interior vertices, shape ``(width-2, height-2, n, n)``."""
    p = values
    return p[2:, 1:-1] + p[:-2, 1:-1] + p[1:-1, 2:] + p[1:-1, :-2]


def multipliers(phi: DiscreteField) -> np.ndarray:
    """``sym(phi^T W)`` on interior vertices, NaN on the boundary."""
    p = phi.values
    out = np.full(p.shape, np.nan)
    out[1:-1, 1:-1] = lg.sym(np.swapaxes(p[1:-1, 1:-1], -1, -2) @ neighbor_sums(p))
    return out


def _interior(mesh: Mesh, at) -> tuple[int, int]:
    i, j = (at.i, at.j) if isinstance(at, Vertex) else at
    if not (1 <= i <= mesh.nx - 2 and 1 <= j <= mesh.ny - 2):
        raise StencilOverflow(f"({i}, {j}) is not an interior vertex of {mesh}")
    return i, j


def fe_residual(phi: DiscreteField, lam: np.ndarray, at) -> np.ndarray:
    """Neighbour sum minus ``phi[i,j] Lam[i,j]`` at an interior vertex."""
    i, j = _interior(phi.mesh, at)
    p = phi.values
    w = p[i + 1, j] + p[i - 1, j] + p[i, j + 1] + p[i, j - 1]
    return w - p[i, j] @ lam[i, j]


def fe_residual_field(phi: DiscreteField, lam: np.ndarray | None = None) -> np.ndarray:
    p = phi.values
    lam = multipliers(phi) if lam is None else lam
    out = np.full(p.shape, np.nan)
    out[1:-1, 1:-1] = neighbor_sums(p) - p[1:-1, 1:-1] @ lam[1:-1, 1:-1]
    return out


def _sup(a: np.ndarray) -> float:
    if a.size == 0 or np.all(np.isnan(a)):
        return 0.0
    return float(np.nanmax(np.abs(a)))


def hm_action(phi: DiscreteField, lam: np.ndarray) -> float:
    """``sum tr(phi^T phi_E) + tr(phi^T phi_N) - 1/2 sum tr(Lam (phi^T phi - I))``.

    The first sum runs over all faces; the multiplier term over interior
    vertices.  Entries of ``phi`` need not be orthogonal.
    """
    p = phi.values
    pt = np.swapaxes(p, -1, -2)
    tr = lambda a: np.trace(a, axis1=-2, axis2=-1).sum()
    kinetic = tr(pt[:-1, :-1] @ p[1:, :-1]) + tr(pt[:-1, :-1] @ p[:-1, 1:])
    q = pt[1:-1, 1:-1] @ p[1:-1, 1:-1] - np.eye(phi.n)
    constraint = tr(lam[1:-1, 1:-1] @ q)
    return float(kinetic - 0.5 * constraint)


# -- solver -----------------------------------------------------------------------


@dataclass
class HarmonicSolution:
    field: DiscreteField
    multipliers: np.ndarray
    sweeps: int
    residual: float
    history: list = field(default_factory=list, repr=False)


def _sweep_row_major(p: np.ndarray):
    w, h = p.shape[:2]
    for j in range(1, h - 1):
        for i in range(1, w - 1):
            p[i, j] = lg.polar_project(p[i + 1, j] + p[i - 1, j] + p[i, j + 1] + p[i, j - 1])


def _sweep_red_black(p: np.ndarray, masks):
    for mask in masks:
        w = neighbor_sums(p)
        inner = p[1:-1, 1:-1]
        inner[mask] = lg.polar_project(w[mask])


def solve(problem: HarmonicProblem, tol: float = 1e-10, max_sweeps: int = 10000,
          sweep_order: str = "row-major", initial: np.ndarray | None = None) -> HarmonicSolution:
    """Relax the field equations until their residual sup-norm is at most ``tol``.

    At least one sweep is always performed.

    Raises:
        DegenerateNeighborSum: if a neighbour sum is (near) singular.
        NoConvergence: after ``max_sweeps`` sweeps; carries the last iterate.
    """
    if sweep_order not in SWEEP_ORDERS:
        raise ValueError(f"sweep_order must be one of {SWEEP_ORDERS}")
    mesh = problem.mesh
    p = initial_guess(problem) if initial is None else np.array(initial, dtype=float)
    p[problem.boundary_mask] = problem.boundary[problem.boundary_mask]
    ii, jj = np.meshgrid(np.arange(1, mesh.nx - 1), np.arange(1, mesh.ny - 1), indexing="ij")
    masks = [(ii + jj) % 2 == 0, (ii + jj) % 2 == 1]

    history = []
    residual = np.inf
    for sweep in range(1, max_sweeps + 1):
        if sweep_order == "row-major":
            _sweep_row_major(p)
        else:
            _sweep_red_black(p, masks)
        phi = DiscreteField(mesh, p, validate=False)
        residual = _sup(fe_residual_field(phi))
        history.append(residual)
        if residual <= tol:
            log.debug("converged after %d sweeps, residual %.3e", sweep, residual)
            return HarmonicSolution(phi.copy(), multipliers(phi), sweep, residual, history)
    raise NoConvergence(f"residual {residual:.3e} > {tol:.1e} after {max_sweeps} sweeps",
                        sweeps=max_sweeps, residual=residual,
                        state=DiscreteField(mesh, p.copy(), validate=False))


# -- momenta and conservation checks ------------------------------------------------


@dataclass
class Momenta:
    """Spatial momenta ``m``, ``n`` and body momenta ``M``, ``N`` on edges.

    ``m[a, b]`` lives on the East edge leaving ``(a, b)`` and ``n[a, b]`` on
    the North edge leaving it; ``M = phi^T m phi`` and ``N = phi^T n phi`` are
    translated back by the tail value.
    """

    m: np.ndarray
    n: np.ndarray
    M: np.ndarray
    N: np.ndarray


def momenta(phi: DiscreteField) -> Momenta:
    p = phi.values
    t = lambda a: np.swapaxes(a, -1, -2)
    east, north = p[1:, :] @ t(p[:-1, :]), p[:, 1:] @ t(p[:, :-1])
    m = east - t(east)
    n = north - t(north)
    M = lg.ad_action(p[:-1, :], m)
    N = lg.ad_action(p[:, :-1], n)
    return Momenta(m, n, M, N)


def legendre_momenta(omega: ReducedField, lag: LagrangianPair | None = None):
    """Body momenta from the reduced Lagrangian: derivatives of ``l`` along
    ``exp(t xi) u`` and ``exp(t xi) v``.

    Returns arrays of the face shape, ``(M, N)``, where ``M[a, b]`` belongs to
    the East edge and ``N[a, b]`` to the North edge leaving ``(a, b)``.
    """
    lag = harmonic_lagrangian() if lag is None else lag
    shape = omega.mesh.face_shape + (omega.n, omega.n)
    M, N = np.empty(shape), np.empty(shape)
    for a in range(shape[0]):
        for b in range(shape[1]):
            args = (omega.u[a, b], omega.v[a, b])
            M[a, b] = lag.l_covector(args, 0, "left")
            N[a, b] = lag.l_covector(args, 1, "left")
    return M, N


def conservation_fields(phi: DiscreteField) -> dict[str, np.ndarray]:
    """Pointwise residuals of the conservation laws and structure identities.

    Vertex quantities come as ``(width, height, n, n)`` arrays padded with NaN
    off the interior; ``integrability`` is indexed by face.
    """
    mesh = phi.mesh
    if mesh.nx < 3 or mesh.ny < 3:
        raise StencilOverflow(f"{mesh} has no interior vertices")
    mo = momenta(phi)
    om = reduce(phi)
    u, v = om.u, om.v
    pad = lambda a: np.pad(a, ((1, 1), (1, 1), (0, 0), (0, 0)), constant_values=np.nan)

    conslaw = mo.m[1:, 1:-1] + mo.n[1:-1, 1:] - mo.m[:-1, 1:-1] - mo.n[1:-1, :-1]
    alpha, beta = u[:-1, 1:-1], v[1:-1, :-1]
    mv2 = (mo.M[1:, 1:-1] + mo.N[1:-1, 1:]
           - lg.ad_action(alpha, mo.M[:-1, 1:-1]) - lg.ad_action(beta, mo.N[1:-1, :-1]))
    epharm = lg.antisym(u[1:, 1:-1] + v[1:-1, 1:] - u[:-1, 1:-1] - v[1:-1, :-1])
    codiff = lg.antisym(codifferential(om.as_one_form()).parts["V"])
    return {
        "conslaw": pad(conslaw),
        "mv2": pad(mv2),
        "epharm": pad(epharm),
        "codiff": codiff,
        "integrability": curvature_field(om) - np.eye(phi.n),
    }


def conservation_checks(phi: DiscreteField) -> dict[str, float]:
    """Sup-norms of :func:`conservation_fields`, keyed ``<name>_residual``."""
    return {f"{k}_residual": _sup(a) for k, a in conservation_fields(phi).items()}


def mv1_defect(phi: DiscreteField) -> float:
    """Largest deviation of ``M`` from ``u - u^T`` and of ``N`` from ``v - v^T``."""
    mo = momenta(phi)
    om = reduce(phi)
    t = lambda a: np.swapaxes(a, -1, -2)
    return max(_sup(mo.M - (om.u - t(om.u))), _sup(mo.N - (om.v - t(om.v))))
