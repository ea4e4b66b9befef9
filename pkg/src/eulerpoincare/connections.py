"""Vertex fields, edge fields (discrete connections), curvature and holonomy."""
from __future__ import annotations

from typing import Iterable

import numpy as np

from . import liegroup as lg
from .errors import BrokenPath, DimensionMismatch, NotFlat
from .forms import Cochain
from .mesh import Edge, Face, Mesh, Vertex

FLAT_TOL = 1e-8


def _index(v) -> tuple[int, int]:
    return (v.i, v.j) if isinstance(v, Vertex) else tuple(v)


class DiscreteField:
    """A map from the vertices of ``mesh`` into SO(n), stored as ``values[i, j]``."""

    def __init__(self, mesh: Mesh, values, validate: bool = True):
        values = np.array(values, dtype=float)
        if values.shape[:2] != mesh.vertex_shape or values.ndim != 4:
            raise DimensionMismatch(
                f"field array has shape {values.shape}, mesh needs {mesh.vertex_shape} + (n, n)")
        if validate:
            lg.check_rotation(values)
        self.mesh = mesh
        self.values = values

    @property
    def n(self) -> int:
        return self.values.shape[-1]

    def __getitem__(self, v) -> np.ndarray:
        return self.values[_index(v)]

    def left_translate(self, g: np.ndarray) -> "DiscreteField":
        return DiscreteField(self.mesh, np.asarray(g) @ self.values, validate=False)

    def copy(self) -> "DiscreteField":
        return DiscreteField(self.mesh, self.values.copy(), validate=False)

    @classmethod
    def constant(cls, mesh: Mesh, g: np.ndarray) -> "DiscreteField":
        g = lg.check_rotation(g)
        return cls(mesh, np.broadcast_to(g, mesh.vertex_shape + g.shape), validate=False)

    @classmethod
    def random(cls, mesh: Mesh, n: int, rng: np.random.Generator,
               scale: float | None = None) -> "DiscreteField":
        vals = np.array([[lg.random_rotation(n, rng, scale) for _ in range(mesh.ny)]
                         for _ in range(mesh.nx)])
        return cls(mesh, vals, validate=False)


class ReducedField:
    """A discrete connection: ``u[i, j]`` on East edges, ``v[i, j]`` on North edges.

    Reversed edges evaluate to the group inverse.
    """

    def __init__(self, mesh: Mesh, u, v, validate: bool = True):
        u = np.array(u, dtype=float)
        v = np.array(v, dtype=float)
        if u.shape[:2] != mesh.east_shape or v.shape[:2] != mesh.north_shape:
            raise DimensionMismatch(
                f"edge arrays {u.shape[:2]}, {v.shape[:2]} do not fit {mesh}")
        if u.shape[2:] != v.shape[2:]:
            raise DimensionMismatch("u and v carry different group dimensions")
        if validate:
            lg.check_rotation(u)
            lg.check_rotation(v)
        self.mesh = mesh
        self.u = u
        self.v = v

    @property
    def n(self) -> int:
        return self.u.shape[-1]

    def edge_value(self, edge: Edge) -> np.ndarray:
        if not self.mesh.contains(edge):
            raise BrokenPath(f"{edge} is not an edge of {self.mesh}")
        c = edge.canonical
        idx = (c.tail.i, c.tail.j)
        g = self.u[idx] if c.kind == "E" else self.v[idx]
        return g if edge.sign > 0 else g.T

    __call__ = edge_value

    def as_one_form(self) -> Cochain:
        """The same edge values viewed as a gl(n)-valued (additive) 1-form."""
        return Cochain(self.mesh, 1, {"E": self.u, "N": self.v}, (self.n, self.n))

    @classmethod
    def constant(cls, mesh: Mesh, a: np.ndarray, b: np.ndarray) -> "ReducedField":
        a, b = np.asarray(a, float), np.asarray(b, float)
        return cls(mesh, np.broadcast_to(a, mesh.east_shape + a.shape),
                   np.broadcast_to(b, mesh.north_shape + b.shape))

    @classmethod
    def random(cls, mesh: Mesh, n: int, rng: np.random.Generator,
               scale: float | None = None) -> "ReducedField":
        u = [[lg.random_rotation(n, rng, scale) for _ in range(mesh.east_shape[1])]
             for _ in range(mesh.east_shape[0])]
        v = [[lg.random_rotation(n, rng, scale) for _ in range(mesh.north_shape[1])]
             for _ in range(mesh.north_shape[0])]
        return cls(mesh, np.array(u), np.array(v), validate=False)


def reduce(phi: DiscreteField) -> ReducedField:
    """``u[i,j] = phi[i,j]^-1 phi[i+1,j]`` and ``v[i,j] = phi[i,j]^-1 phi[i,j+1]``."""
    p = phi.values
    pt = np.swapaxes(p, -1, -2)
    u = pt[:-1, :] @ p[1:, :]
    v = pt[:, :-1] @ p[:, 1:]
    return ReducedField(phi.mesh, u, v, validate=False)


def curvature(omega: ReducedField, face: Face) -> np.ndarray:
    """Ordered product of the four boundary edge values, starting at the base."""
    out = np.eye(omega.n)
    for e in face.edges():
        out = out @ omega.edge_value(e)
    return out


def curvature_field(omega: ReducedField) -> np.ndarray:
    """Curvature of every CCW face, ``u[i,j] v[i+1,j] u[i,j+1]^-1 v[i,j]^-1``."""
    u, v = omega.u, omega.v
    t = lambda a: np.swapaxes(a, -1, -2)
    return u[:, :-1] @ v[1:, :] @ t(u[:, 1:]) @ t(v[:-1, :])


def flatness_defect(omega: ReducedField) -> float:
    if omega.mesh.n_faces == 0:
        return 0.0
    return float(np.max(np.abs(curvature_field(omega) - np.eye(omega.n))))


def is_flat(omega: ReducedField, tol: float = FLAT_TOL) -> bool:
    return flatness_defect(omega) <= tol


def holonomy(omega: ReducedField, path: Iterable[Edge]) -> np.ndarray:
    """Product of connection values along a path of composable edges."""
    out = np.eye(omega.n)
    prev = None
    for e in path:
        if prev is not None and prev.head != e.tail:
            raise BrokenPath(f"{prev} ends at {prev.head} but {e} starts at {e.tail}")
        out = out @ omega.edge_value(e)
        prev = e
    return out


def staircase_path(start: Vertex, moves: str) -> list[Edge]:
    """Path from ``start`` following a string of ``E/W/N/S`` steps."""
    steps = {"E": (1, 0), "W": (-1, 0), "N": (0, 1), "S": (0, -1)}
    path, cur = [], start
    for m in moves:
        nxt = cur.shifted(*steps[m])
        path.append(Edge(cur, nxt))
        cur = nxt
    return path


def reconstruct(omega: ReducedField, x0: Vertex | tuple = (0, 0), g0: np.ndarray | None = None,
                tol: float = FLAT_TOL) -> DiscreteField:
    """Integrate a flat connection to a vertex field with ``phi(x0) = g0``.

    The holonomy is accumulated along row ``j = 0`` and then up each column;
    flatness makes the result independent of that choice.

    Raises:
        NotFlat: if some face has curvature further than ``tol`` from the
            identity; no vertex field reduces to such a connection.
    """
    defect = flatness_defect(omega)
    if defect > tol:
        raise NotFlat(f"connection is not flat: max curvature defect {defect:.3e}",
                      max_defect=defect)
    mesh, n = omega.mesh, omega.n
    psi = np.empty(mesh.vertex_shape + (n, n))
    psi[0, 0] = np.eye(n)
    for i in range(mesh.nx - 1):
        psi[i + 1, 0] = psi[i, 0] @ omega.u[i, 0]
    for j in range(mesh.ny - 1):
        psi[:, j + 1] = psi[:, j] @ omega.v[:, j]
    i0, j0 = _index(x0)
    g0 = np.eye(n) if g0 is None else lg.check_rotation(g0)
    values = (g0 @ psi[i0, j0].T) @ psi
    values[i0, j0] = g0
    return DiscreteField(mesh, values, validate=False)

