"""Acceptance gate: the eight release criteria.

Each test covers one criterion with its stated tolerances and runtime
budget and prints a single summary line; the pytest -v verdict for each
test is the pass/fail line of the corresponding criterion.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from torusjack.jackpoly import LaurentVPoly
from torusjack.localseries import (FaceChart, alpha0_solve, alpha_recurrence,
                                   beta_stream, coefficient_bounds, eval_L1,
                                   expand, matching_constant, rho, x0_chart)
from torusjack.odeflow import (Path, TorusPoint, base_point, extend_L,
                               integrate_L, mixed_partial_residual,
                               permute_point)
from torusjack.symgroup import (build_irrep, commutation_system_sizes,
                                cycle_perm, stembridge_profile,
                                transposition_perm)
from torusjack.torusquad import (FourierK, Pairing, QuadratureGrid,
                                 TwoGridPairing, adjointness_residual,
                                 constant_khat, fcrec_error_estimate,
                                 fcrec_residual, gram_matrix,
                                 isometry_residual, laurent_labels,
                                 nsjp_basis)
from torusjack.weightsolve import (boundary_odd_norms, face_residuals,
                                   loglog_slope, solve_H)

REPR_SHAPES = [(2, 1), (3, 1), (2, 2), (2, 1, 1), (4, 2)]
FLOW_KAPPAS = [0.1, -0.1, 0.25, -0.25]
SOLVE_KAPPAS = [0.05, 0.1, 0.25, -0.25]


def report(name, elapsed, budget, detail):
    line = f"criterion {name}: PASS in {elapsed:.1f}s (budget {budget}s) - {detail}"
    print(line)


@pytest.fixture(scope="module")
def solutions():
    ir = build_irrep((2, 1))
    return {k: solve_H(ir, k) for k in sorted(set(SOLVE_KAPPAS + [0.05]))}


def _mats_equal(a, b):
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _matmul(a, b):
    n = len(a)
    return [[sum(a[i][t] * b[t][j] for t in range(n)) for j in range(n)]
            for i in range(n)]


def test_criterion_1_representation_suite():
    t0 = time.time()
    for parts in REPR_SHAPES:
        ir = build_irrep(parts)
        eye = [[Fraction(int(i == j)) for j in range(ir.n_tau)]
               for i in range(ir.n_tau)]
        gens = ir.gen_exact
        # braid relations, exactly
        for g in gens:
            assert _mats_equal(_matmul(g, g), eye)
        for i in range(len(gens) - 1):
            assert _mats_equal(_matmul(_matmul(gens[i], gens[i + 1]), gens[i]),
                               _matmul(_matmul(gens[i + 1], gens[i]),
                                       gens[i + 1]))
        for i in range(len(gens)):
            for j in range(i + 2, len(gens)):
                assert _mats_equal(_matmul(gens[i], gens[j]),
                                   _matmul(gens[j], gens[i]))
        # Jucys-Murphy eigenvalues, exactly
        for k in range(1, ir.N):
            x = [[Fraction(0)] * ir.n_tau for _ in range(ir.n_tau)]
            for j in range(k + 1, ir.N + 1):
                g = ir.rep_exact(transposition_perm(ir.N, k, j))
                for r in range(ir.n_tau):
                    for c in range(ir.n_tau):
                        x[r][c] += g[r][c]
            for r in range(ir.n_tau):
                for c in range(ir.n_tau):
                    want = Fraction(ir.basis[r].content(k)) if r == c else 0
                    assert x[r][c] == want
        # G-unitarity, exactly
        for g in gens:
            for r in range(ir.n_tau):
                for c in range(ir.n_tau):
                    val = sum(g[t][r] * ir.weights[t] * g[t][c]
                              for t in range(ir.n_tau))
                    assert val == (ir.weights[r] if r == c else 0)
    elapsed = time.time() - t0
    assert elapsed < 10
    report("1 (representation suite)", elapsed, 10,
           f"{len(REPR_SHAPES)} shapes exact in rational arithmetic")


def test_criterion_2_worked_example_constants():
    t0 = time.time()
    ir = build_irrep((4, 2))
    assert ir.n_tau == 9
    assert ir.m_tau == 3
    e, commutant = stembridge_profile((4, 2))
    assert e == [2, 1, 2, 1, 2, 1]  # F(q) = 2 + q + 2q^2 + q^3 + 2q^4 + q^5
    assert commutant == 15
    assert commutation_system_sizes((4, 2)) == (45, 66)
    elapsed = time.time() - t0
    assert elapsed < 1
    report("2 (worked-example constants)", elapsed, 1,
           "n=9, m=3, folded profile [2,1,2,1,2,1], commutant 15, "
           "system 45x66")


def test_criterion_3_flow_suite(rng):
    t0 = time.time()
    ir = build_irrep((2, 1))
    x0 = base_point(3)
    p = TorusPoint((0.4, 2.3, 4.5))
    q = TorusPoint((0.9, 2.9, 5.1))
    w0 = cycle_perm(3)
    for kappa in FLOW_KAPPAS:
        # closed-loop monodromy
        loop = integrate_L(ir, kappa, Path.through([x0, p, q, x0])).value
        assert np.abs(loop - np.eye(2)).max() <= 1e-8, kappa
        # cyclic covariance L(x w0) = upsilon^{-1} L(x) upsilon for x in C0
        lx = extend_L(ir, kappa, p)
        lxw = extend_L(ir, kappa, permute_point(p, w0))
        pred = ir.upsilon_power(-1) @ lx @ ir.upsilon
        assert np.abs(lxw - pred).max() <= 1e-8, kappa
        # homogeneity under a common rotation
        shift = TorusPoint(tuple(np.asarray(p.theta) + 0.35))
        assert np.abs(extend_L(ir, kappa, shift) - lx).max() <= 1e-9, kappa
        # det L == 1 (Lambda = 0 for (2,1))
        assert abs(np.linalg.det(lx) - 1) <= 1e-8, kappa
        # mixed partials: O(h^2) decay of the finite-difference residual
        hs = [1e-3, 5e-4, 2.5e-4]
        res = [mixed_partial_residual(ir, kappa, p, 1, 2, h) for h in hs]
        for k in range(len(hs) - 1):
            assert 3.0 < res[k] / res[k + 1] < 5.0, (kappa, res)
    elapsed = time.time() - t0
    assert elapsed < 60
    report("3 (flow suite)", elapsed, 60,
           f"kappa in {FLOW_KAPPAS}: loop/monodromy<=1e-8, "
           "homogeneity<=1e-9, det<=1e-8, mixed partials O(h^2)")


def test_criterion_4_series_suite():
    t0 = time.time()
    overlap_worst = 0.0
    for tau in [(2, 1), (3, 1)]:
        ir = build_irrep(tau)
        n = ir.N
        kappa = 0.2
        chart, z = x0_chart(ir, kappa)
        a0 = alpha0_solve(chart)
        series = alpha_recurrence(chart, a0, terms=24)
        # sigma-parity exact
        assert series.parity_residual() == 0.0
        # alpha_1 matches the displayed first-step formula
        beta0 = beta_stream(chart, 0)[0]
        sg = ir.sigma
        b0 = beta0 - sg @ beta0 @ sg
        want = rho(ir, kappa / (1 - 2 * kappa),
                   kappa / (1 + 2 * kappa)) @ (a0 @ b0)
        assert np.abs(series.alphas[1] - want).max() <= 1e-12
        # norms under the bound sequence for n <= 24
        bounds = coefficient_bounds(chart, 24, series.coefficient_norms()[0])
        for norm, t in zip(series.coefficient_norms(), bounds):
            assert norm <= t * (1 + 1e-10)
        # overlap: series route equals matching constant times the flow
        phis = tuple(2 * np.pi * j / n + 0.1 for j in range(n - 2))
        phi_u = 2 * np.pi - 2.8 * np.pi / n
        eps = 0.12
        tchart = FaceChart(ir, kappa, phis + (phi_u,),
                           (0.0,) * (n - 2)
                           + (float(np.log(np.cos(eps))),))
        tseries = expand(tchart, terms=40)
        zz = 1j * np.sin(eps) * np.exp(1j * phi_u)
        point = TorusPoint(phis + (phi_u - eps, phi_u + eps))
        via_series = eval_L1(tseries, zz, max_radius_fraction=0.9)
        via_flow = matching_constant(ir, kappa) @ extend_L(ir, kappa, point)
        overlap_worst = max(overlap_worst,
                            float(np.abs(via_series - via_flow).max()))
        assert overlap_worst <= 1e-8
    elapsed = time.time() - t0
    assert elapsed < 60
    report("4 (series suite)", elapsed, 60,
           f"parity exact, alpha_1<=1e-12, bounds n<=24, "
           f"overlap worst {overlap_worst:.2e} <= 1e-8 for N=3,4")


def test_criterion_5_weight_solve(solutions):
    t0 = time.time()
    details = []
    for kappa in SOLVE_KAPPAS:
        s = solutions[kappa]
        assert s.gap >= 1e4, kappa
        assert s.hermiticity <= 1e-10, kappa
        assert s.positive, kappa
        assert s.commutator <= 1e-9, kappa
        r1, r2 = face_residuals(s)
        assert r1 <= 1e-6 and r2 <= 1e-6, kappa
        details.append(f"k={kappa}: gap {s.gap:.1e}, faces "
                       f"{max(r1, r2):.1e}")
    elapsed = time.time() - t0
    assert elapsed < 120
    report("5 (weight solve)", elapsed, 120, "; ".join(details))


def test_criterion_6_boundary_exponent(solutions):
    t0 = time.time()
    slopes = {}
    for kappa in [0.1, 0.25]:
        z_abs = list(np.geomspace(1e-4, 1e-2, 7))
        norms = boundary_odd_norms(solutions[kappa], z_abs)
        slope = loglog_slope(z_abs, norms)
        expected = 1 - 2 * abs(kappa)
        assert abs(slope - expected) <= 0.1, (kappa, slope)
        slopes[kappa] = (slope, expected)
    elapsed = time.time() - t0
    assert elapsed < 60
    report("6 (boundary exponent)", elapsed, 60,
           ", ".join(f"k={k}: slope {s:.3f} vs {e}"
                     for k, (s, e) in slopes.items()))


def test_criterion_7_orthogonality(solutions):
    t0 = time.time()
    details = []
    for kappa, tag in [(0.05, "proven window"), (0.25, "extended window")]:
        sol = solutions[kappa]
        pairing = TwoGridPairing(sol, 96)
        rep = gram_matrix(pairing, max_norm=2)
        assert rep.off_diagonal_ratio <= 1e-2, (tag, rep.off_diagonal_ratio)
        assert rep.weight_ratio_error <= 1e-2, (tag, rep.weight_ratio_error)
        ir = sol.irrep
        labels, polys = nsjp_basis(ir, kappa, 1)
        f = polys[labels.index(((1, 0, 0), 0))]
        g = polys[labels.index(((0, 1, 0), 1))]
        worst_adj = max(adjointness_residual(pairing.fine, f, g, i)
                        for i in [1, 2, 3])
        worst_iso = max(isometry_residual(pairing.fine, f, f, i)
                        for i in [1, 2, 3])
        assert worst_adj <= 1e-2, tag
        assert worst_iso <= 1e-2, tag
        details.append(f"k={kappa} [{tag}]: off-diag "
                       f"{rep.off_diagonal_ratio:.1e}, weights "
                       f"{rep.weight_ratio_error:.1e}, adjoint "
                       f"{worst_adj:.1e}, isometry {worst_iso:.1e}")
    elapsed = time.time() - t0
    assert elapsed < 600
    report("7 (orthogonality, P=96)", elapsed, 600, "; ".join(details))


def test_criterion_8_fourier_recurrence(solutions):
    t0 = time.time()
    ir = build_irrep((2, 1))
    kappa = 0.1
    sol = solutions[kappa]
    fine = FourierK(Pairing(sol, QuadratureGrid(3, 24)))
    coarse = FourierK(Pairing(sol, QuadratureGrid(3, 12)))
    checked = 0
    for alpha in laurent_labels(3, 2):
        for i in [1, 2, 3]:
            res, _ = fcrec_residual(ir, kappa, fine, alpha, i)
            est = fcrec_error_estimate(ir, kappa, fine, coarse, alpha, i)
            assert res <= 3 * est or res < 1e-12, (alpha, i, res, est)
            checked += 1
    # the constant formal solution satisfies the recurrence identically
    khat = constant_khat(ir)
    for kap in [0.1, 0.37, -0.8]:
        for alpha in laurent_labels(3, 2):
            for i in [1, 2, 3]:
                res, _ = fcrec_residual(ir, kap, khat, alpha, i)
                assert res == 0.0, (kap, alpha, i)
    elapsed = time.time() - t0
    assert elapsed < 300
    report("8 (Fourier recurrence)", elapsed, 300,
           f"{checked} quadrature equations within 3x two-grid estimate; "
           "constant solution exact for arbitrary kappa")
