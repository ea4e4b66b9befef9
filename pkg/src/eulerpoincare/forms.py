"""Discrete differential forms (cochains) on a mesh or its dual.

Cochains store one dense array per kind of canonical cell, indexed by the
cell's integer coordinates ``[i, j]`` and followed by the value shape (``()``
for real forms, ``(n, n)`` for matrix-valued forms).  Entries that are not
defined, such as the Hodge dual of a form on cells whose dual is clipped by
the rectangle, hold NaN and raise :class:`NoDualCell` when queried.
"""
from __future__ import annotations

import numpy as np

from .errors import DegreeUnderflow, NoDualCell, PairingMismatch
from .mesh import Chain, DualMesh, Edge, Face, Grid, Mesh, Vertex, canonical_with_sign

_KINDS = {0: ("V",), 1: ("E", "N"), 2: ("F",), 3: ()}


def _shape(grid: Grid, kind: str) -> tuple[int, int]:
    return {"V": grid.vertex_shape, "E": grid.east_shape,
            "N": grid.north_shape, "F": grid.face_shape}[kind]


class Cochain:
    """A discrete ``degree``-form with real or matrix coefficients."""

    def __init__(self, grid: Grid, degree: int, parts: dict, value_shape=()):
        if degree not in _KINDS:
            raise ValueError(f"no {degree}-forms on a 2D mesh")
        self.grid = grid
        self.degree = degree
        self.value_shape = tuple(value_shape)
        self.parts = {}
        for k in _KINDS[degree]:
            a = np.asarray(parts[k], dtype=float)
            expected = _shape(grid, k) + self.value_shape
            if a.shape != expected:
                raise ValueError(f"part {k} has shape {a.shape}, expected {expected}")
            self.parts[k] = a

    @classmethod
    def zeros(cls, grid: Grid, degree: int, value_shape=()) -> "Cochain":
        value_shape = tuple(value_shape)
        return cls(grid, degree,
                   {k: np.zeros(_shape(grid, k) + value_shape) for k in _KINDS[degree]},
                   value_shape)

    @classmethod
    def random(cls, grid: Grid, degree: int, rng: np.random.Generator,
               value_shape=()) -> "Cochain":
        value_shape = tuple(value_shape)
        return cls(grid, degree,
                   {k: rng.standard_normal(_shape(grid, k) + value_shape)
                    for k in _KINDS[degree]},
                   value_shape)

    @classmethod
    def from_function(cls, grid: Grid, degree: int, fn, value_shape=()) -> "Cochain":
        """Evaluate ``fn(cell)`` on every canonical cell."""
        f = cls.zeros(grid, degree, value_shape)
        for cell in grid.cells(degree):
            f._set(cell, fn(cell))
        return f

    @property
    def dual(self) -> bool:
        return self.grid.is_dual

    # -- element access ---------------------------------------------------

    def _locate(self, cell) -> tuple[int, str, tuple[int, int]]:
        if not self.grid.contains(cell):
            raise NoDualCell(f"{cell} is not a cell of {self.grid}")
        s, c = canonical_with_sign(cell)
        if isinstance(c, Vertex):
            return s, "V", (c.i, c.j)
        if isinstance(c, Edge):
            return s, c.kind, (c.tail.i, c.tail.j)
        return s, "F", (c.base.i, c.base.j)

    def _set(self, cell, value):
        s, k, idx = self._locate(cell)
        self.parts[k][idx] = s * np.asarray(value, dtype=float)

    def at(self, cell):
        """Value on a (possibly reversed) cell; orientation flips the sign."""
        s, k, idx = self._locate(cell)
        val = self.parts[k][idx]
        if np.any(np.isnan(val)):
            raise NoDualCell(f"form is not defined on {cell}")
        return s * val

    def __call__(self, cell):
        return self.at(cell)

    def defined(self, kind: str) -> np.ndarray:
        a = self.parts[kind]
        axes = tuple(range(2, a.ndim))
        return ~np.any(np.isnan(a), axis=axes) if axes else ~np.isnan(a)

    def max_abs(self) -> float:
        vals = [np.nanmax(np.abs(a)) for a in self.parts.values() if a.size and
                not np.all(np.isnan(a))]
        return float(max(vals)) if vals else 0.0

    # -- arithmetic ---------------------------------------------------------

    def _like(self, parts) -> "Cochain":
        return Cochain(self.grid, self.degree, parts, self.value_shape)

    def _check(self, other: "Cochain"):
        if (other.grid != self.grid or other.degree != self.degree
                or other.value_shape != self.value_shape):
            raise PairingMismatch("cochains live in different spaces")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return self._like({k: a + other.parts[k] for k, a in self.parts.items()})

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return self._like({k: a - other.parts[k] for k, a in self.parts.items()})

    def __neg__(self) -> "Cochain":
        return self._like({k: -a for k, a in self.parts.items()})

    def __mul__(self, s: float) -> "Cochain":
        return self._like({k: s * a for k, a in self.parts.items()})

    __rmul__ = __mul__

    def map_values(self, fn) -> "Cochain":
        """Apply ``fn`` to every stored array (e.g. a batched matrix map)."""
        parts = {k: fn(a) for k, a in self.parts.items()}
        vs = next(iter(parts.values())).shape[2:] if parts else self.value_shape
        return Cochain(self.grid, self.degree, parts, vs)

    def allclose(self, other: "Cochain", atol: float = 0.0) -> bool:
        """Compare on cells where both forms are defined."""
        self._check(other)
        for k, a in self.parts.items():
            b = other.parts[k]
            mask = self.defined(k) & other.defined(k)
            if np.any(self.defined(k) != other.defined(k)):
                return False
            if mask.any() and np.max(np.abs(a[mask] - b[mask])) > atol:
                return False
        return True

    def __repr__(self):
        side = "dual" if self.dual else "primal"
        return f"Cochain({side}, degree={self.degree}, value_shape={self.value_shape})"


def pair(f: Cochain, c: Chain):
    """Natural pairing of a cochain with a chain of the same degree and side."""
    if f.degree != c.degree or f.dual != c.dual:
        raise PairingMismatch(
            f"cannot pair a {f.degree}-form ({'dual' if f.dual else 'primal'}) with a "
            f"{c.degree}-chain ({'dual' if c.dual else 'primal'})")
    total = np.zeros(f.value_shape)
    for cell, a in c.coeffs.items():
        total = total + a * f.at(cell)
    return float(total) if f.value_shape == () else total


def coboundary(f: Cochain) -> Cochain:
    """Discrete exterior derivative; a 2-form maps to the (empty) zero 3-form."""
    if f.degree == 0:
        phi = f.parts["V"]
        return Cochain(f.grid, 1, {"E": phi[1:, :] - phi[:-1, :],
                                   "N": phi[:, 1:] - phi[:, :-1]}, f.value_shape)
    if f.degree == 1:
        e, n = f.parts["E"], f.parts["N"]
        return Cochain(f.grid, 2, {"F": e[:, :-1] + n[1:, :] - e[:, 1:] - n[:-1, :]},
                       f.value_shape)
    return Cochain(f.grid, 3, {}, f.value_shape)


def _nan(shape) -> np.ndarray:
    return np.full(shape, np.nan)


def hodge(f: Cochain, mesh: Mesh | None = None) -> Cochain:
    """Discrete Hodge star, ``(star f)(dual of v) = f(v)``.

    Maps primal k-forms to dual (2-k)-forms and back.  Primal cells on the
    rectangle boundary have no dual, so the image of a dual form is NaN there.
    """
    if f.degree > 2:
        raise ValueError("no Hodge star for forms of degree > 2")
    vs = f.value_shape
    if not f.dual:
        mesh = f.grid if mesh is None else mesh
        d = mesh.dual
        if f.degree == 0:
            return Cochain(d, 2, {"F": f.parts["V"][1:-1, 1:-1]}, vs)
        if f.degree == 1:
            return Cochain(d, 1, {"E": f.parts["N"][1:-1, :],
                                  "N": -f.parts["E"][:, 1:-1]}, vs)
        return Cochain(d, 0, {"V": f.parts["F"]}, vs)
    m = f.grid.primal if mesh is None else mesh
    if f.degree == 0:
        return Cochain(m, 2, {"F": f.parts["V"]}, vs)
    if f.degree == 1:
        e = _nan(m.east_shape + vs)
        n = _nan(m.north_shape + vs)
        e[:, 1:-1] = f.parts["N"]
        n[1:-1, :] = -f.parts["E"]
        return Cochain(m, 1, {"E": e, "N": n}, vs)
    v = _nan(m.vertex_shape + vs)
    v[1:-1, 1:-1] = f.parts["F"]
    return Cochain(m, 0, {"V": v}, vs)


def codifferential(f: Cochain) -> Cochain:
    """Discrete codifferential ``star d star``, lowering the degree by one.

    On a primal 1-form this is the sum of the values on the four edges
    pointing into each interior vertex; on a primal 2-form it is the
    difference of the two faces adjacent to each interior edge.
    """
    if f.degree == 0:
        raise DegreeUnderflow("the codifferential of a 0-form is not defined")
    return hodge(coboundary(hodge(f)))


def one_form_from_edges(mesh: Grid, east: np.ndarray, north: np.ndarray) -> Cochain:
    """Wrap East/North edge arrays as a (possibly matrix-valued) 1-form."""
    east = np.asarray(east, dtype=float)
    return Cochain(mesh, 1, {"E": east, "N": north}, east.shape[2:])
