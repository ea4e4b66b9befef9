"""Acceptance criteria 1-7.  Each test prints one PASS/FAIL line."""
import importlib.util
import time
from pathlib import Path

import numpy as np
import pytest

from eulerpoincare import harmonic as hm
from eulerpoincare import liegroup as lg
from eulerpoincare import noether as no
from eulerpoincare import variational as va
from eulerpoincare.connections import (DiscreteField, ReducedField, flatness_defect, is_flat,
                                       reconstruct, reduce)
from eulerpoincare.errors import NotFlat
from eulerpoincare.forms import Cochain, coboundary, codifferential, hodge, pair
from eulerpoincare.mesh import Chain, Mesh, boundary

HARMONIC_FD = va.harmonic_lagrangian().finite_differences(1e-5)


class Criterion:
    """Collects named measurements and prints a single verdict line."""

    def __init__(self, number, budget):
        self.number, self.budget = number, budget
        self.items = []
        self.start = time.perf_counter()

    def le(self, name, value, bound):
        self.items.append((name, value, "<=", bound, value <= bound))

    def ge(self, name, value, bound):
        self.items.append((name, value, ">=", bound, value >= bound))

    def true(self, name, flag):
        self.items.append((name, float(flag), "==", 1.0, bool(flag)))

    def finish(self, capsys):
        elapsed = time.perf_counter() - self.start
        self.le("runtime_s", elapsed, self.budget)
        ok = all(item[-1] for item in self.items)
        detail = ", ".join(f"{n}={v:.2e}{op}{b:.0e}" + ("" if good else " (!)")
                           for n, v, op, b, good in self.items)
        with capsys.disabled():
            print(f"\ncriterion {self.number}: {'PASS' if ok else 'FAIL'} [{detail}]")
        assert ok, detail


def random_chain(grid, degree, rng, k=8):
    cells = list(grid.cells(degree))
    picks = rng.choice(len(cells), size=k, replace=False)
    return Chain.from_cells([(float(rng.standard_normal()), cells[p]) for p in picks],
                            degree=degree, dual=grid.is_dual)


def explicit_delta(f):
    """Codifferential from the four-edge and two-face formulas, by slicing."""
    if f.degree == 1:
        e, n = f.parts["E"], f.parts["N"]
        return {"V": e[:-1, 1:-1] + n[1:-1, :-1] - e[1:, 1:-1] - n[1:-1, 1:]}
    psi = f.parts["F"]
    return {"E": psi[:, 1:] - psi[:, :-1], "N": psi[:-1, :] - psi[1:, :]}


def delta_mismatch(f):
    d, ref = codifferential(f), explicit_delta(f)
    if f.degree == 1:
        return float(np.abs(d.parts["V"][1:-1, 1:-1] - ref["V"]).max())
    return max(float(np.abs(d.parts["E"][:, 1:-1] - ref["E"]).max()),
               float(np.abs(d.parts["N"][1:-1, :] - ref["N"]).max()))


@pytest.fixture(scope="module")
def big_solution():
    problem = hm.preset_problem("random-smooth", 3, 16, 16, seed=0)
    t = time.perf_counter()
    sol = hm.solve(problem, tol=1e-10, max_sweeps=10000)
    return problem, sol, time.perf_counter() - t


@pytest.fixture(scope="module")
def small_solutions():
    return [hm.solve(hm.preset_problem("random-smooth", 3, 6, 6, seed=s), tol=1e-12).field
            for s in range(3)]


def test_criterion_1_dec_algebra(capsys):
    c = Criterion(1, 5.0)
    rng = np.random.default_rng(1)
    m = Mesh(12, 12)
    dd = stokes = starstar = delta = 0.0
    for k in range(1000):
        degree = k % 3
        grid = m.dual if k % 6 >= 3 and degree < 2 else m
        f = Cochain.random(grid, degree, rng)
        if degree == 0:
            dd = max(dd, coboundary(coboundary(f)).max_abs())
        if degree < 2:
            ch = random_chain(grid, degree + 1, rng)
            stokes = max(stokes, abs(pair(coboundary(f), ch) - pair(f, boundary(ch))))
        sign = -1.0 if degree == 1 else 1.0
        ss = hodge(hodge(f))
        for kind, a in ss.parts.items():
            mask = ss.defined(kind)
            starstar = max(starstar, float(np.abs(a[mask] - sign * f.parts[kind][mask]).max()))
        if degree > 0 and not f.dual:
            delta = max(delta, delta_mismatch(f))
    c.le("dd", dd, 1e-12)
    c.le("stokes", stokes, 1e-12)
    c.le("starstar", starstar, 1e-12)
    c.le("delta_vs_explicit", delta, 1e-12)
    c.finish(capsys)


def test_criterion_2_connections(capsys):
    c = Criterion(2, 5.0)
    rng = np.random.default_rng(2)
    m = Mesh(8, 8)
    flat = roundtrip = constancy = 0.0
    for _ in range(200):
        phi = DiscreteField.random(m, 3, rng)
        om = reduce(phi)
        flat = max(flat, flatness_defect(om))
        roundtrip = max(roundtrip, float(np.abs(reconstruct(om, g0=phi[0, 0]).values
                                                - phi.values).max()))
        a = reconstruct(om, g0=lg.random_rotation(3, rng)).values
        b = reconstruct(om, g0=lg.random_rotation(3, rng)).values
        shift = b @ np.swapaxes(a, -1, -2)
        constancy = max(constancy, float(np.abs(shift - shift[0, 0]).max()))
    x = lg.embed(lg.rotation_2d(0.6), 3)
    z = lg.embed(lg.rotation_2d(0.4), 3)[[2, 0, 1]][:, [2, 0, 1]]
    try:
        reconstruct(ReducedField.constant(m, x, z))
        rejected = False
    except NotFlat:
        rejected = True
    c.le("flatness", flat, 1e-12)
    c.le("roundtrip", roundtrip, 1e-12)
    c.le("left_translation_constancy", constancy, 1e-12)
    c.true("nonflat_rejected", rejected)
    c.finish(capsys)


def test_criterion_3_reduction(capsys, small_solutions):
    c = Criterion(3, 30.0)
    rng = np.random.default_rng(3)
    m = Mesh(6, 6)
    transport = 0.0
    for _ in range(20):
        phi = DiscreteField.random(m, 3, rng)
        el = va.el_residual_field(HARMONIC_FD, phi)
        ep = va.ep_residual_field(HARMONIC_FD, reduce(phi))
        moved = -lg.conjugate(phi.values[1:-1, 1:-1], ep[1:-1, 1:-1])
        transport = max(transport, float(np.abs(el[1:-1, 1:-1] - moved).max()))
    el_sol = ep_sol = 0.0
    el_bent = ep_bent = np.inf
    for phi in small_solutions:
        el_sol = max(el_sol, va.sup_norm(va.el_residual_field(HARMONIC_FD, phi)))
        ep_sol = max(ep_sol, va.sup_norm(va.ep_residual_field(HARMONIC_FD, reduce(phi))))
        p = phi.values.copy()
        p[2, 3] = lg.exp(lg.random_algebra(3, rng, 0.05)) @ p[2, 3]
        bent = DiscreteField(m, p)
        el_bent = min(el_bent, va.sup_norm(va.el_residual_field(HARMONIC_FD, bent)))
        ep_bent = min(ep_bent, va.sup_norm(va.ep_residual_field(HARMONIC_FD, reduce(bent))))
    c.le("el_vs_transported_ep", transport, 2e-6)
    c.le("el_at_solution", el_sol, 1e-6)
    c.le("ep_at_solution", ep_sol, 1e-6)
    c.ge("el_perturbed", el_bent, 1e-3)
    c.ge("ep_perturbed", ep_bent, 1e-3)
    c.finish(capsys)


def test_criterion_4_noether(capsys, small_solutions):
    c = Criterion(4, 30.0)
    rng = np.random.default_rng(4)
    m = Mesh(6, 6)
    redundancy = vs_el = 0.0
    for _ in range(10):
        phi = DiscreteField.random(m, 3, rng)
        cur = no.noether_currents(HARMONIC_FD, phi)
        redundancy = max(redundancy, float(np.abs(cur.redundancy).max()))
        res = no.noether_residual_field(cur)[1:, 1:]
        el = va.el_residual_field(HARMONIC_FD, phi)[1:-1, 1:-1]
        vs_el = max(vs_el, float(np.abs(res + el).max()))
    at_sol = max(va.sup_norm(no.noether_residual_field(no.noether_currents(HARMONIC_FD, phi)))
                 for phi in small_solutions)
    lag = va.from_reduced(lambda u, v: np.trace(u @ v) + np.sin(u[0, 1]) * v[2, 0]
                          - np.trace(u) * v[1, 1])
    pullback = 0.0
    for _ in range(50):
        g = tuple(lg.random_rotation(3, rng) for _ in range(3))
        theta = tuple(lg.random_algebra(3, rng) for _ in range(3))
        for slot in (1, 2, 3):
            pullback = max(pullback, abs(no.theta_L(lag, slot, g, theta, side="right")
                                         - no.theta_l(lag, slot, no.psi_hat(*g), theta)))
    c.le("redundancy", redundancy, 1e-8)
    c.le("conservation_at_solution", at_sol, 1e-8)
    c.le("conservation_vs_minus_el", vs_el, 2e-6)
    c.le("pullback", pullback, 1e-6)
    c.finish(capsys)


def test_criterion_5_harmonic_solver(capsys, big_solution):
    c = Criterion(5, 60.0)
    problem, sol, solve_time = big_solution
    c.start -= solve_time
    phi, lam = sol.field, sol.multipliers
    checks = hm.conservation_checks(phi)
    inner = lam[1:-1, 1:-1]
    mo = hm.momenta(phi)
    M, N = hm.legendre_momenta(reduce(phi), HARMONIC_FD)
    legendre = max(float(np.abs(M - mo.M[:, :-1]).max()), float(np.abs(N - mo.N[:-1]).max()))
    c.le("fe_residual", va.sup_norm(hm.fe_residual_field(phi, lam)), 1e-10)
    c.le("lambda_asymmetry", float(np.abs(inner - np.swapaxes(inner, -1, -2)).max()), 1e-12)
    for key in ("conslaw", "mv2", "epharm", "codiff"):
        c.le(key, checks[f"{key}_residual"], 1e-9)
    c.le("mv1", hm.mv1_defect(phi), 1e-12)
    c.le("legendre", legendre, 2e-6)
    c.finish(capsys)


def load_oracle():
    path = Path(__file__).parent / "fixtures" / "make_fixtures.py"
    loader_spec = importlib.util.spec_from_file_location("make_fixtures", path)
    mod = importlib.util.module_from_spec(loader_spec)
    loader_spec.loader.exec_module(mod)
    return mod


def test_criterion_6_so2_oracle(capsys):
    c = Criterion(6, 10.0)
    oracle = load_oracle()
    theta, newton_res = oracle.angle_newton(oracle.twist_boundary(10, 10))
    sol = hm.solve(hm.preset_problem("twist", 2, 10, 10, twist=oracle.TWIST), tol=1e-12)
    expected = np.array([[lg.rotation_2d(t) for t in row] for row in theta])
    deviation = float(np.abs(sol.field.values - expected).max())
    rng = np.random.default_rng(6)
    flat = is_flat(reduce(sol.field), 1e-12)
    for _ in range(20):
        om = ReducedField.constant(Mesh(10, 10), lg.random_rotation(2, rng),
                                   lg.random_rotation(2, rng))
        flat &= is_flat(om, 1e-12)
    c.le("oracle_newton_residual", newton_res, 1e-12)
    c.le("field_deviation", deviation, 1e-8)
    c.true("so2_connections_flat", flat)
    c.finish(capsys)


def test_criterion_7_stationarity(capsys, big_solution):
    c = Criterion(7, 60.0)
    problem, sol, _ = big_solution
    phi = sol.field
    m = phi.mesh
    rng = np.random.default_rng(7)
    lag = va.harmonic_lagrangian()
    h = 1e-5

    def action(values):
        return va.action_sum(lag, DiscreteField(m, values, validate=False))

    worst = 0.0
    for _ in range(100):
        xi = np.zeros(m.vertex_shape + (3, 3))
        xi[1:-1, 1:-1] = lg.random_algebra(3, rng, size=(m.nx - 2, m.ny - 2))
        step = lambda t: np.array([[lg.exp(t * xi[i, j]) for j in range(m.ny)]
                                   for i in range(m.nx)])
        d = (action(step(h) @ phi.values) - action(step(-h) @ phi.values)) / (2 * h)
        worst = max(worst, abs(d))
    g = lg.random_rotation(3, rng)
    moved = hm.solve(problem.left_translate(g), tol=1e-10)
    gauge = float(np.abs(g @ phi.values - moved.field.values).max())
    c.le("max_action_derivative", worst, 1e-6)
    c.le("gauge_covariance", gauge, 1e-9)
    c.finish(capsys)
