"""Finite square meshes, their duals, chains and the boundary operator.

A :class:`Mesh` is the window ``{0..width-1} x {0..height-1}`` of the integer
lattice.  Canonical cells are

* vertices ``(i, j)``,
* East edges ``(i, j) -> (i+1, j)`` and North edges ``(i, j) -> (i, j+1)``,
* counter-clockwise faces keyed by their bottom-left vertex.

Every other orientation is stored as a sign on a canonical cell.  The dual
mesh has one vertex per face (at the face centre), one edge per interior
primal edge and one face per interior primal vertex; it is itself a square
lattice window and is indexed with its own integer coordinates, so dual vertex
``(a, b)`` sits at ``(a + 1/2, b + 1/2)`` in primal coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import DegreeUnderflow, InvalidDimensions, NoDualCell, PairingMismatch

CCW = 1
CW = -1


@dataclass(frozen=True, order=True)
class Vertex:
    i: int
    j: int
    dual: bool = False

    def shifted(self, di: int, dj: int) -> "Vertex":
        return Vertex(self.i + di, self.j + dj, self.dual)


@dataclass(frozen=True)
class Edge:
    """Oriented edge between lattice neighbours."""

    tail: Vertex
    head: Vertex

    def __post_init__(self):
        if self.tail.dual != self.head.dual:
            raise ValueError("edge joins a primal and a dual vertex")
        di = self.head.i - self.tail.i
        dj = self.head.j - self.tail.j
        if abs(di) + abs(dj) != 1:
            raise ValueError(f"{self.tail} and {self.head} are not lattice neighbours")

    @classmethod
    def east(cls, i: int, j: int, dual: bool = False) -> "Edge":
        return cls(Vertex(i, j, dual), Vertex(i + 1, j, dual))

    @classmethod
    def north(cls, i: int, j: int, dual: bool = False) -> "Edge":
        return cls(Vertex(i, j, dual), Vertex(i, j + 1, dual))

    @property
    def dual(self) -> bool:
        return self.tail.dual

    @property
    def kind(self) -> str:
        """``"E"`` for horizontal edges, ``"N"`` for vertical ones."""
        return "E" if self.head.j == self.tail.j else "N"

    @property
    def sign(self) -> int:
        d = (self.head.i - self.tail.i) + (self.head.j - self.tail.j)
        return 1 if d > 0 else -1

    @property
    def canonical(self) -> "Edge":
        return self if self.sign > 0 else self.reversed()

    def reversed(self) -> "Edge":
        return Edge(self.head, self.tail)


@dataclass(frozen=True)
class Face:
    base: Vertex
    orientation: int = CCW

    def __post_init__(self):
        if self.orientation not in (CCW, CW):
            raise ValueError("orientation must be +1 (CCW) or -1 (CW)")

    @property
    def dual(self) -> bool:
        return self.base.dual

    @property
    def canonical(self) -> "Face":
        return Face(self.base, CCW)

    @property
    def sign(self) -> int:
        return self.orientation

    def reversed(self) -> "Face":
        return Face(self.base, -self.orientation)

    def vertices(self) -> tuple[Vertex, Vertex, Vertex, Vertex]:
        """Corners in traversal order, starting at the base vertex."""
        b = self.base
        ccw = (b, b.shifted(1, 0), b.shifted(1, 1), b.shifted(0, 1))
        if self.orientation == CCW:
            return ccw
        return (ccw[0], ccw[3], ccw[2], ccw[1])

    def edges(self) -> tuple[Edge, Edge, Edge, Edge]:
        """The closed boundary path, starting at the base vertex."""
        vs = self.vertices()
        return tuple(Edge(vs[k], vs[(k + 1) % 4]) for k in range(4))


Cell = Vertex | Edge | Face


def cell_degree(cell: Cell) -> int:
    if isinstance(cell, Vertex):
        return 0
    if isinstance(cell, Edge):
        return 1
    if isinstance(cell, Face):
        return 2
    raise TypeError(f"not a mesh cell: {cell!r}")


def canonical_with_sign(cell: Cell) -> tuple[int, Cell]:
    if isinstance(cell, Vertex):
        return 1, cell
    return cell.sign, cell.canonical


class Grid:
    """A rectangular window of a square lattice with ``nx * ny`` vertices."""

    is_dual = False

    def __init__(self, nx: int, ny: int):
        self.nx = int(nx)
        self.ny = int(ny)

    def __repr__(self):
        return f"{type(self).__name__}({self.nx}, {self.ny})"

    @property
    def vertex_shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def east_shape(self) -> tuple[int, int]:
        return (self.nx - 1, self.ny)

    @property
    def north_shape(self) -> tuple[int, int]:
        return (self.nx, self.ny - 1)

    @property
    def face_shape(self) -> tuple[int, int]:
        return (self.nx - 1, self.ny - 1)

    @property
    def n_vertices(self) -> int:
        return self.nx * self.ny

    @property
    def n_edges(self) -> int:
        return (self.nx - 1) * self.ny + self.nx * (self.ny - 1)

    @property
    def n_faces(self) -> int:
        return max(self.nx - 1, 0) * max(self.ny - 1, 0)

    def vertices(self) -> Iterator[Vertex]:
        for j in range(self.ny):
            for i in range(self.nx):
                yield Vertex(i, j, self.is_dual)

    def east_edges(self) -> Iterator[Edge]:
        for j in range(self.ny):
            for i in range(self.nx - 1):
                yield Edge.east(i, j, self.is_dual)

    def north_edges(self) -> Iterator[Edge]:
        for j in range(self.ny - 1):
            for i in range(self.nx):
                yield Edge.north(i, j, self.is_dual)

    def edges(self) -> Iterator[Edge]:
        yield from self.east_edges()
        yield from self.north_edges()

    def faces(self) -> Iterator[Face]:
        for j in range(self.ny - 1):
            for i in range(self.nx - 1):
                yield Face(Vertex(i, j, self.is_dual))

    def cells(self, degree: int) -> Iterator[Cell]:
        return {0: self.vertices, 1: self.edges, 2: self.faces}[degree]()

    def contains(self, cell: Cell) -> bool:
        if cell.dual != self.is_dual:
            return False
        if isinstance(cell, Vertex):
            return 0 <= cell.i < self.nx and 0 <= cell.j < self.ny
        if isinstance(cell, Edge):
            return self.contains(cell.tail) and self.contains(cell.head)
        b = cell.base
        return 0 <= b.i < self.nx - 1 and 0 <= b.j < self.ny - 1

    def is_interior_vertex(self, v: Vertex) -> bool:
        return 0 < v.i < self.nx - 1 and 0 < v.j < self.ny - 1

    def interior_vertices(self) -> Iterator[Vertex]:
        for j in range(1, self.ny - 1):
            for i in range(1, self.nx - 1):
                yield Vertex(i, j, self.is_dual)


class Mesh(Grid):
    """Primal mesh with ``width * height`` vertices."""

    def __init__(self, width: int, height: int):
        if int(width) < 2 or int(height) < 2:
            raise InvalidDimensions(
                f"mesh needs at least 2 vertices per side, got {width}x{height}")
        super().__init__(width, height)
        self._dual = DualMesh(self)

    @property
    def width(self) -> int:
        return self.nx

    @property
    def height(self) -> int:
        return self.ny

    @property
    def dual(self) -> "DualMesh":
        return self._dual

    def __eq__(self, other):
        return isinstance(other, Mesh) and self.vertex_shape == other.vertex_shape

    def __hash__(self):
        return hash(("Mesh", self.nx, self.ny))


class DualMesh(Grid):
    """Circumcentric dual of a :class:`Mesh`; vertices sit at face centres."""

    is_dual = True

    def __init__(self, primal: Mesh):
        super().__init__(primal.nx - 1, primal.ny - 1)
        self.primal = primal

    def position(self, v: Vertex) -> tuple[float, float]:
        return (v.i + 0.5, v.j + 0.5)

    def __eq__(self, other):
        return isinstance(other, DualMesh) and self.vertex_shape == other.vertex_shape

    def __hash__(self):
        return hash(("DualMesh", self.nx, self.ny))


def build_mesh(width: int, height: int) -> Mesh:
    return Mesh(width, height)


def grid_for(cell: Cell, mesh: Mesh) -> Grid:
    return mesh.dual if cell.dual else mesh


# -- chains ---------------------------------------------------------------


@dataclass(frozen=True)
class Chain:
    """Sparse real linear combination of canonical cells of one degree."""

    degree: int
    dual: bool = False
    coeffs: dict = field(default_factory=dict)

    @classmethod
    def from_cells(cls, terms: Iterable[tuple[float, Cell]] | Iterable[Cell],
                   degree: int | None = None, dual: bool | None = None) -> "Chain":
        """Build a chain from ``(coefficient, cell)`` pairs or bare cells.

        Reversed edges and clockwise faces are folded onto the canonical cell
        with a sign flip.
        """
        coeffs: dict = {}
        for term in terms:
            if isinstance(term, tuple):
                a, cell = term
            else:
                a, cell = 1.0, term
            d = cell_degree(cell)
            if degree is None:
                degree = d
            if dual is None:
                dual = cell.dual
            if d != degree or cell.dual != dual:
                raise PairingMismatch("chain terms must share degree and side")
            s, c = canonical_with_sign(cell)
            coeffs[c] = coeffs.get(c, 0.0) + s * float(a)
        if degree is None:
            raise ValueError("degree is required for an empty chain")
        coeffs = {c: a for c, a in coeffs.items() if a != 0.0}
        return cls(degree, bool(dual), coeffs)

    @classmethod
    def zero(cls, degree: int, dual: bool = False) -> "Chain":
        return cls(degree, dual, {})

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(a) <= tol for a in self.coeffs.values())

    def coefficient(self, cell: Cell) -> float:
        s, c = canonical_with_sign(cell)
        return s * self.coeffs.get(c, 0.0)

    def _check(self, other: "Chain"):
        if (self.degree, self.dual) != (other.degree, other.dual):
            raise PairingMismatch("chains of different degree or side")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        out = dict(self.coeffs)
        for c, a in other.coeffs.items():
            out[c] = out.get(c, 0.0) + a
        return Chain(self.degree, self.dual, {c: a for c, a in out.items() if a != 0.0})

    def __neg__(self) -> "Chain":
        return Chain(self.degree, self.dual, {c: -a for c, a in self.coeffs.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, s: float) -> "Chain":
        if s == 0:
            return Chain.zero(self.degree, self.dual)
        return Chain(self.degree, self.dual, {c: s * a for c, a in self.coeffs.items()})

    __rmul__ = __mul__

    def __iter__(self):
        return iter(self.coeffs.items())

    def __len__(self):
        return len(self.coeffs)


def boundary(c: Chain) -> Chain:
    """Boundary operator: edge -> head - tail, face -> its four signed edges."""
    if c.degree == 0:
        raise DegreeUnderflow("vertices have no boundary")
    terms: list[tuple[float, Cell]] = []
    for cell, a in c.coeffs.items():
        if c.degree == 1:
            terms.append((a, cell.head))
            terms.append((-a, cell.tail))
        else:
            terms.extend((a, e) for e in cell.edges())
    return Chain.from_cells(terms, degree=c.degree - 1, dual=c.dual)


# -- cell duality -----------------------------------------------------------


def dual_cell(cell: Cell, mesh: Mesh) -> tuple[int, Cell]:
    """Return ``(sign, canonical cell)`` for the dual of ``cell``.

    Primal cells map into ``mesh.dual`` and dual cells back into ``mesh``.
    Faces go to the vertex at their centre (sign = orientation), vertices to
    the counter-clockwise face around them, and edges to the crossing edge
    obtained by a clockwise quarter turn, so that ``**`` equals
    ``(-1)**(k*(2-k))`` on k-cells.

    Raises:
        NoDualCell: for boundary primal vertices and edges, whose dual cells
            would be clipped by the rectangle.
    """
    grid = grid_for(cell, mesh)
    if not grid.contains(cell):
        raise NoDualCell(f"{cell} is not a cell of {grid}")
    if isinstance(cell, Face):
        b = cell.base
        if cell.dual:
            return cell.orientation, Vertex(b.i + 1, b.j + 1)
        return cell.orientation, Vertex(b.i, b.j, True)
    if isinstance(cell, Vertex):
        if cell.dual:
            return 1, Face(Vertex(cell.i, cell.j))
        if not mesh.is_interior_vertex(cell):
            raise NoDualCell(f"boundary vertex {cell} has no complete dual face")
        return 1, Face(Vertex(cell.i - 1, cell.j - 1, True))
    s, e = cell.sign, cell.canonical
    i, j = e.tail.i, e.tail.j
    if e.dual:
        if e.kind == "N":
            return s, Edge.east(i, j + 1)
        return -s, Edge.north(i + 1, j)
    if e.kind == "E":
        if not 0 < j < mesh.ny - 1:
            raise NoDualCell(f"boundary edge {cell} has no dual edge")
        return -s, Edge.north(i, j - 1, True)
    if not 0 < i < mesh.nx - 1:
        raise NoDualCell(f"boundary edge {cell} has no dual edge")
    return s, Edge.east(i - 1, j, True)


def star_chain(c: Chain, mesh: Mesh) -> Chain:
    """Apply the cell duality linearly to a chain."""
    terms = []
    for cell, a in c.coeffs.items():
        s, d = dual_cell(cell, mesh)
        terms.append((s * a, d))
    return Chain.from_cells(terms, degree=2 - c.degree, dual=not c.dual)


# -- action regions -----------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """Rectangle of face base vertices ``[i0, i1) x [j0, j1)``.

    This is the summation set of an action sum: each member ``(i, j)``
    contributes the term built on ``(i, j), (i+1, j), (i, j+1)``.
    """

    i0: int
    j0: int
    i1: int
    j1: int

    @classmethod
    def full(cls, mesh: Mesh) -> "Region":
        return cls(0, 0, mesh.nx - 1, mesh.ny - 1)

    def __contains__(self, v) -> bool:
        i, j = (v.i, v.j) if isinstance(v, Vertex) else v
        return self.i0 <= i < self.i1 and self.j0 <= j < self.j1

    def bases(self) -> Iterator[Vertex]:
        for j in range(self.j0, self.j1):
            for i in range(self.i0, self.i1):
                yield Vertex(i, j)

    def __len__(self) -> int:
        return max(self.i1 - self.i0, 0) * max(self.j1 - self.j0, 0)

    def fits(self, mesh: Mesh) -> bool:
        return (0 <= self.i0 <= self.i1 <= mesh.nx - 1
                and 0 <= self.j0 <= self.j1 <= mesh.ny - 1)

    def is_boundary(self, v: Vertex) -> bool:
        """Vertex touching both a face in the region and a face outside it."""
        touches = self.i0 <= v.i <= self.i1 and self.j0 <= v.j <= self.j1
        return touches and (v.i in (self.i0, self.i1) or v.j in (self.j0, self.j1))

    def boundary_vertices(self) -> Iterator[Vertex]:
        for j in range(self.j0, self.j1 + 1):
            for i in range(self.i0, self.i1 + 1):
                v = Vertex(i, j)
                if self.is_boundary(v):
                    yield v

    def interior_vertices(self) -> Iterator[Vertex]:
        for j in range(self.j0 + 1, self.j1):
            for i in range(self.i0 + 1, self.i1):
                yield Vertex(i, j)
