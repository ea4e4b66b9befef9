"""The rotation group SO(n) and its Lie algebra so(n), as numpy matrices.

Group elements are orthogonal ``(n, n)`` arrays with determinant +1, algebra
elements are antisymmetric arrays.  The dual so(n)* is identified with so(n)
through the pairing ``<mu, xi> = tr(mu^T xi) / 2``, under which the standard
basis ``e_a e_b^T - e_b e_a^T`` (a < b) is orthonormal.  For n = 3 this is the
usual dot product of the hat-map vectors.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import DegenerateNeighborSum, DimensionMismatch, NotInGroup

ORTHO_TOL = 1e-10
FD_STEP = 1e-5
MIN_SINGULAR_VALUE = 1e-12


def identity(n: int) -> np.ndarray:
    return np.eye(n)


def orthogonality_defect(g: np.ndarray) -> float:
    g = np.asarray(g)
    return float(np.max(np.abs(np.swapaxes(g, -1, -2) @ g - np.eye(g.shape[-1]))))


def is_rotation(g, tol: float = ORTHO_TOL) -> bool:
    g = np.asarray(g, dtype=float)
    if g.ndim < 2 or g.shape[-1] != g.shape[-2]:
        return False
    return orthogonality_defect(g) <= tol and bool(np.all(np.linalg.det(g) > 0))


def check_rotation(g, tol: float = ORTHO_TOL) -> np.ndarray:
    """Return ``g`` as a float array, raising NotInGroup if it is not in SO(n)."""
    g = np.asarray(g, dtype=float)
    if g.ndim < 2 or g.shape[-1] != g.shape[-2]:
        raise NotInGroup(f"expected square matrices, got shape {g.shape}")
    defect = orthogonality_defect(g)
    if defect > tol:
        raise NotInGroup(f"orthogonality defect {defect:.3e} exceeds {tol:.1e}")
    if np.any(np.linalg.det(g) <= 0):
        raise NotInGroup("determinant is not positive")
    return g


def _same_dim(*mats):
    dims = {np.shape(m)[-1] for m in mats}
    if len(dims) != 1:
        raise DimensionMismatch(f"matrix dimensions differ: {sorted(dims)}")


def multiply(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    _same_dim(g, h)
    return np.asarray(g) @ np.asarray(h)


def inverse(g: np.ndarray) -> np.ndarray:
    return np.swapaxes(np.asarray(g), -1, -2).copy()


def antisym(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    return 0.5 * (a - np.swapaxes(a, -1, -2))


def sym(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def algebra_dim(n: int) -> int:
    return n * (n - 1) // 2


def so_basis(n: int) -> np.ndarray:
    """Standard basis of so(n), shape ``(n(n-1)/2, n, n)``."""
    basis = []
    for a in range(n):
        for b in range(a + 1, n):
            e = np.zeros((n, n))
            e[a, b], e[b, a] = -1.0, 1.0
            basis.append(e)
    return np.array(basis).reshape(-1, n, n)


def pair(mu: np.ndarray, xi: np.ndarray):
    """``<mu, xi> = tr(mu^T xi) / 2`` (batched over leading axes)."""
    _same_dim(mu, xi)
    return 0.5 * np.einsum("...ab,...ab->...", mu, xi)


def random_algebra(n: int, rng: np.random.Generator, scale: float = 1.0,
                   size: tuple = ()) -> np.ndarray:
    a = rng.standard_normal(tuple(size) + (n, n))
    return scale * (a - np.swapaxes(a, -1, -2)) / np.sqrt(2.0)


def covector(functional: Callable[[np.ndarray], float], n: int) -> np.ndarray:
    """Represent a linear functional on so(n) as an antisymmetric matrix."""
    return sum(functional(e) * e for e in so_basis(n))


# -- exponential -------------------------------------------------------------


def rotation_2d(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def rodrigues(xi: np.ndarray) -> np.ndarray:
    """Closed-form exponential on so(3)."""
    w = np.array([xi[2, 1], xi[0, 2], xi[1, 0]])
    theta = np.linalg.norm(w)
    if theta < 1e-8:
        a = 1.0 - theta**2 / 6.0
        b = 0.5 - theta**2 / 24.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta**2
    return np.eye(3) + a * xi + b * (xi @ xi)


def expm(xi: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring (any n)."""
    return scipy.linalg.expm(np.asarray(xi, dtype=float))


def exp(xi: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    n = xi.shape[-1]
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        return rotation_2d(xi[1, 0])
    if n == 3:
        return rodrigues(xi)
    return expm(xi)


def log(g: np.ndarray) -> np.ndarray:
    """Principal logarithm, projected onto so(n)."""
    return antisym(np.real(scipy.linalg.logm(np.asarray(g, dtype=float))))


def random_rotation(n: int, rng: np.random.Generator, scale: float | None = None) -> np.ndarray:
    """Haar-random rotation, or ``exp`` of a random algebra element of given scale."""
    if scale is not None:
        return exp(random_algebra(n, rng, scale))
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def embed(g: np.ndarray, n: int) -> np.ndarray:
    """Place a k x k block in the top-left corner of an n x n identity."""
    k = g.shape[-1]
    out = np.eye(n)
    out[:k, :k] = g
    return out


# -- projection and actions ---------------------------------------------------


def polar_project(w: np.ndarray, min_singular_value: float = MIN_SINGULAR_VALUE) -> np.ndarray:
    """Orthogonal factor of ``w`` with determinant +1.

    Uses the SVD ``w = U S V^T`` and returns ``U D V^T`` where ``D`` flips the
    last singular direction when ``det(U V^T) < 0``.  The result ``R`` makes
    ``R^T w`` symmetric; it is positive definite unless ``det(w) < 0``, in
    which case it has exactly one negative eigenvalue.  Works on stacks of
    matrices.

    Raises:
        DegenerateNeighborSum: if any smallest singular value is below
            ``min_singular_value``.
    """
    w = np.asarray(w, dtype=float)
    u, s, vt = np.linalg.svd(w)
    if np.any(s[..., -1] < min_singular_value):
        raise DegenerateNeighborSum(
            f"smallest singular value {np.min(s[..., -1]):.3e} below {min_singular_value:.1e}")
    d = np.sign(np.linalg.det(u @ vt))
    u = u.copy()
    u[..., :, -1] *= d[..., None]
    return u @ vt


def ad_action(g: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """``g^T mu g``: the covector with ``<result, xi> = <mu, g xi g^-1>``."""
    _same_dim(g, mu)
    g = np.asarray(g)
    return np.swapaxes(g, -1, -2) @ mu @ g


def conjugate(g: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Adjoint action ``g xi g^-1``."""
    _same_dim(g, xi)
    g = np.asarray(g)
    return g @ xi @ np.swapaxes(g, -1, -2)


# -- derivatives ----------------------------------------------------------------


def _moved(base: Sequence[np.ndarray], slot: int, xi: np.ndarray, t: float, side: str):
    args = list(base)
    step = exp(t * xi)
    if side == "left":
        args[slot] = step @ args[slot]
    elif side == "right":
        args[slot] = args[slot] @ step
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return args


def directional_derivative(f: Callable[..., float], base: Sequence[np.ndarray], slot: int,
                           xi: np.ndarray, side: str = "left",
                           step: float = FD_STEP) -> float:
    """Central difference of ``f`` along an exponential curve in one slot.

    ``side="left"`` differentiates ``t -> f(..., exp(t xi) g, ...)``, i.e. along
    the right-translated tangent ``xi g``; ``side="right"`` uses
    ``g exp(t xi)``, the left-translated tangent ``g xi``.
    """
    fp = f(*_moved(base, slot, xi, step, side))
    fm = f(*_moved(base, slot, xi, -step, side))
    return (fp - fm) / (2.0 * step)


def slot_covector(f: Callable[..., float], base: Sequence[np.ndarray], slot: int,
                  side: str = "left", step: float = FD_STEP) -> np.ndarray:
    """so(n)* element ``xi -> directional_derivative(f, base, slot, xi, side)``."""
    n = np.shape(base[slot])[-1]
    return covector(lambda e: directional_derivative(f, base, slot, e, side, step), n)


def gradient_covector(grad: np.ndarray, g: np.ndarray, side: str = "left") -> np.ndarray:
    """Covector of a Euclidean gradient ``grad`` of f at ``g`` along exp-curves.

    For ``side="left"`` this is ``grad g^T - g grad^T``; for ``"right"``,
    ``g^T grad - grad^T g``.
    """
    gt = np.swapaxes(g, -1, -2)
    grad_t = np.swapaxes(grad, -1, -2)
    if side == "left":
        return grad @ gt - g @ grad_t
    if side == "right":
        return gt @ grad - grad_t @ g
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")
