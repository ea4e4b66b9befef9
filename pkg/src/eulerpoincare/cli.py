"""Command-line driver: ``solve``, ``reduce``, ``reconstruct`` and ``check``.

Fields and connections are stored as JSON documents::

    {"format": "field", "version": 1, "n": 3, "width": 8, "height": 6,
     "matrices": [[...n*n floats...], ...]}

    {"format": "connection", "version": 1, "n": 3, "width": 8, "height": 6,
     "east": [...], "north": [...]}

Matrices are listed in row-major vertex (or edge tail) order, ``i`` running
fastest, and each matrix is flattened row by row.  Reports go to stdout as
JSON.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import harmonic as hm
from . import liegroup as lg
from . import noether as no
from . import variational as va
from .connections import DiscreteField, ReducedField, curvature_field, reconstruct, reduce
from .errors import (DegenerateNeighborSum, MalformedFile, NoConvergence, NotFlat,
                     NotInGroup)
from .mesh import Mesh

FORMAT_VERSION = 1
EXIT_OK, EXIT_CHECK, EXIT_NO_CONVERGENCE, EXIT_MALFORMED, EXIT_NOT_FLAT = 0, 1, 2, 3, 4

# Tolerances used by ``check``.  Residuals built from finite differences get
# the looser bound.
CHECK_TOL = {
    "flatness": 1e-10,
    "fe": 1e-9,
    "el": 1e-6,
    "ep": 1e-6,
    "noether": 1e-9,
    "mv1": 1e-12,
    "mv2": 1e-9,
    "conslaw": 1e-9,
    "epharm": 1e-9,
    "codiff": 1e-9,
}
MAX_LISTED = 20


# -- file I/O ------------------------------------------------------------------------


def _matrices_to_list(a: np.ndarray) -> list:
    """``(nx, ny, n, n)`` -> list in row-major cell order (``i`` fastest)."""
    a = np.asarray(a, dtype=float)
    return [[float(x) for x in a[i, j].ravel()]
            for j in range(a.shape[1]) for i in range(a.shape[0])]


def _list_to_matrices(items, shape: tuple[int, int], n: int, name: str) -> np.ndarray:
    nx, ny = shape
    if not isinstance(items, list):
        raise MalformedFile(f"'{name}' must be a list of matrices", field=name)
    if len(items) != nx * ny:
        raise MalformedFile(f"'{name}' holds {len(items)} matrices, expected {nx * ny}",
                            field=name)
    out = np.empty((nx, ny, n, n))
    for k, m in enumerate(items):
        where = f"{name}[{k}]"
        if not isinstance(m, list) or len(m) != n * n:
            raise MalformedFile(f"'{where}' must list {n * n} numbers", field=where)
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                   and math.isfinite(x) for x in m):
            raise MalformedFile(f"'{where}' contains a non-finite or non-numeric entry",
                                field=where)
        g = np.array(m, dtype=float).reshape(n, n)
        if not lg.is_rotation(g):
            raise MalformedFile(f"'{where}' is not a rotation matrix", field=where)
        i, j = k % nx, k // nx
        out[i, j] = g
    return out


def _header(doc, kind: str) -> tuple[int, int, int]:
    if not isinstance(doc, dict):
        raise MalformedFile("top level must be a JSON object", field="<root>")
    if doc.get("format") != kind:
        raise MalformedFile(f"'format' must be {kind!r}, got {doc.get('format')!r}",
                            field="format")
    if doc.get("version") != FORMAT_VERSION:
        raise MalformedFile(f"unsupported 'version' {doc.get('version')!r}", field="version")
    vals = []
    for key, low in (("n", 1), ("width", 2), ("height", 2)):
        v = doc.get(key)
        if not isinstance(v, int) or isinstance(v, bool) or v < low:
            raise MalformedFile(f"'{key}' must be an integer >= {low}, got {v!r}", field=key)
        vals.append(v)
    return tuple(vals)


def field_to_doc(phi: DiscreteField) -> dict:
    return {"format": "field", "version": FORMAT_VERSION, "n": phi.n,
            "width": phi.mesh.nx, "height": phi.mesh.ny,
            "matrices": _matrices_to_list(phi.values)}


def connection_to_doc(omega: ReducedField) -> dict:
    return {"format": "connection", "version": FORMAT_VERSION, "n": omega.n,
            "width": omega.mesh.nx, "height": omega.mesh.ny,
            "east": _matrices_to_list(omega.u), "north": _matrices_to_list(omega.v)}


def field_from_doc(doc) -> DiscreteField:
    n, w, h = _header(doc, "field")
    mesh = Mesh(w, h)
    return DiscreteField(mesh, _list_to_matrices(doc.get("matrices"), mesh.vertex_shape, n,
                                                 "matrices"), validate=False)


def connection_from_doc(doc) -> ReducedField:
    n, w, h = _header(doc, "connection")
    mesh = Mesh(w, h)
    u = _list_to_matrices(doc.get("east"), mesh.east_shape, n, "east")
    v = _list_to_matrices(doc.get("north"), mesh.north_shape, n, "north")
    return ReducedField(mesh, u, v, validate=False)


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"{path}: not valid JSON ({exc})", field="<json>") from exc


def write_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc))


def load(path):
    """Read a field or a connection file, dispatching on ``format``."""
    doc = read_json(path)
    kind = doc.get("format") if isinstance(doc, dict) else None
    if kind == "connection":
        return connection_from_doc(doc)
    if kind == "field":
        return field_from_doc(doc)
    raise MalformedFile(f"'format' must be 'field' or 'connection', got {kind!r}",
                        field="format")


def parse_matrix(text: str, name: str = "base-g0") -> np.ndarray:
    """A rotation given inline as JSON or as a path to a JSON file.

    Accepts a nested ``[[...], ...]`` matrix or a flat row-major list.
    """
    try:
        path = Path(text)
        raw = json.loads(path.read_text()) if path.is_file() else json.loads(text)
        g = np.array(raw, dtype=float)
    except (ValueError, TypeError, OSError) as exc:
        raise MalformedFile(f"'{name}' is not a JSON matrix", field=name) from exc
    if g.ndim == 1:
        n = math.isqrt(g.size)
        if n * n != g.size:
            raise MalformedFile(f"'{name}' has {g.size} entries, not a square count", field=name)
        g = g.reshape(n, n)
    if not lg.is_rotation(g):
        raise MalformedFile(f"'{name}' is not a rotation matrix", field=name)
    return g


# -- reports ---------------------------------------------------------------------------


def _flagged(field: np.ndarray, tol: float) -> list[list[int]]:
    """Cells whose matrix entries exceed ``tol`` in absolute value, worst first."""
    a = np.abs(np.nan_to_num(np.asarray(field), nan=0.0))
    norms = a.reshape(a.shape[:2] + (-1,)).max(axis=-1)
    idx = np.argwhere(norms > tol)
    order = np.argsort(-norms[tuple(idx.T)], kind="stable")
    return [[int(i), int(j)] for i, j in idx[order][:MAX_LISTED]]


def _entry(field: np.ndarray, key: str) -> dict:
    tol = CHECK_TOL[key]
    value = va.sup_norm(field)
    return {"value": value, "tol": tol, "ok": bool(value <= tol), "at": _flagged(field, tol)}


def _scalar_entry(value: float, key: str) -> dict:
    tol = CHECK_TOL[key]
    return {"value": float(value), "tol": tol, "ok": bool(value <= tol), "at": []}


def connection_report(omega: ReducedField, lag: va.LagrangianPair) -> dict:
    curv = curvature_field(omega) - np.eye(omega.n)
    return {"flatness": _entry(curv, "flatness"),
            "ep": _entry(va.ep_residual_field(lag, omega), "ep")}


def field_report(phi: DiscreteField, lag: va.LagrangianPair) -> dict:
    omega = reduce(phi)
    report = connection_report(omega, lag)
    report["el"] = _entry(va.el_residual_field(lag, phi), "el")
    report["fe"] = _entry(hm.fe_residual_field(phi), "fe")
    report["noether"] = _entry(no.noether_residual_field(no.noether_currents(lag, phi)),
                               "noether")
    report["mv1"] = _scalar_entry(hm.mv1_defect(phi), "mv1")
    fields = hm.conservation_fields(phi)
    for key in ("conslaw", "mv2", "epharm", "codiff"):
        report[key] = _entry(fields[key], key)
    return report


def _ok(report: dict) -> bool:
    return all(v["ok"] for v in report.values())


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


# -- commands -------------------------------------------------------------------------


def cmd_solve(args) -> int:
    if args.input:
        boundary = field_from_doc(read_json(args.input))
        problem = hm.HarmonicProblem(boundary.mesh, boundary.values)
    else:
        problem = hm.preset_problem(args.preset, args.n, args.width, args.height,
                                    seed=args.seed, twist=args.twist, spread=args.spread)
    try:
        sol = hm.solve(problem, tol=args.tol, max_sweeps=args.max_sweeps,
                       sweep_order=args.sweep_order)
    except NoConvergence as exc:
        print(f"error: no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except DegenerateNeighborSum as exc:
        print(f"error: no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    doc = field_to_doc(sol.field)
    if args.out:
        write_json(doc, args.out)
    # Numbers are recomputed from the serialized payload.
    phi = field_from_doc(json.loads(json.dumps(doc)))
    report = field_report(phi, _lagrangian(args))
    _emit({"command": "solve", "sweeps": sol.sweeps, "solver_residual": sol.residual,
           "ok": _ok(report), "checks": report})
    return EXIT_OK


def cmd_reduce(args) -> int:
    phi = field_from_doc(read_json(args.input))
    doc = connection_to_doc(reduce(phi))
    if args.out:
        write_json(doc, args.out)
    else:
        print(json.dumps(doc))
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    omega = connection_from_doc(read_json(args.input))
    g0 = parse_matrix(args.base_g0) if args.base_g0 else None
    if g0 is not None and g0.shape[-1] != omega.n:
        raise MalformedFile(f"'base-g0' is {g0.shape[-1]}x{g0.shape[-1]}, expected n = {omega.n}",
                            field="base-g0")
    try:
        phi = reconstruct(omega, g0=g0)
    except NotFlat as exc:
        print(f"error: connection is not flat; max curvature defect {exc.max_defect:.6e}",
              file=sys.stderr)
        return EXIT_NOT_FLAT
    doc = field_to_doc(phi)
    if args.out:
        write_json(doc, args.out)
    else:
        print(json.dumps(doc))
    return EXIT_OK


def cmd_check(args) -> int:
    obj = load(args.input)
    lag = _lagrangian(args)
    if isinstance(obj, ReducedField):
        report, kind = connection_report(obj, lag), "connection"
    else:
        report, kind = field_report(obj, lag), "field"
    ok = _ok(report)
    _emit({"command": "check", "kind": kind, "ok": ok, "checks": report})
    return EXIT_OK if ok else EXIT_CHECK


def _lagrangian(args) -> va.LagrangianPair:
    # Residuals are taken along exponential curves by central differences.
    return va.harmonic_lagrangian().finite_differences(args.fd_step)


# -- argument parsing -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eulerpoincare",
        description="Discrete harmonic maps into SO(n) and their reduction.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", help="input JSON file")
    common.add_argument("--out", help="output JSON file (stdout if omitted)")
    common.add_argument("--fd-step", type=float, default=lg.FD_STEP,
                        help="finite-difference step for residuals (default 1e-5)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve a boundary-value problem")
    p.add_argument("--preset", choices=hm.PRESETS, default="random-smooth")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--width", type=int, default=16)
    p.add_argument("--height", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-sweeps", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweep-order", choices=hm.SWEEP_ORDERS, default="row-major")
    p.add_argument("--twist", type=float, default=1.0, help="amplitude of the twist preset")
    p.add_argument("--spread", type=float, default=1.0,
                   help="corner spread of the random-smooth preset")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reduce", parents=[common], help="field file -> connection file")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("reconstruct", parents=[common], help="connection file -> field file")
    p.add_argument("--base-g0", help="value at vertex (0, 0): inline JSON or a JSON file")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("check", parents=[common], help="verify a field or connection file")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in ("reduce", "reconstruct", "check") and not args.input:
        print(f"error: {args.command} needs --in", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        return args.func(args)
    except MalformedFile as exc:
        print(f"error: malformed input in field '{exc.field}': {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (NotInGroup, ValueError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
