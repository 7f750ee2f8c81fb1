"""Solving for the weight constant H and its boundary behavior."""

import numpy as np
import pytest

from torusjack.odeflow import TorusPoint, extend_L, monodromy_factor, \
    permute_point
from torusjack.symgroup import build_irrep, stembridge_profile
from torusjack.weightsolve import (boundary_odd_norms, face_residuals,
                                   loglog_slope, solve_H, upsilon_classes,
                                   weight_K)

KAPPAS = [0.05, 0.1, 0.25, -0.25]


@pytest.fixture(scope="module")
def sols(ir21):
    return {k: solve_H(ir21, k) for k in KAPPAS}


def test_upsilon_classes_commutant(ir21, ir31):
    for ir in [ir21, ir31]:
        vecs, labels = upsilon_classes(ir)
        _, commutant = stembridge_profile(ir.tau)
        sizes = np.bincount(labels)
        assert int(np.sum(sizes ** 2)) == commutant
        # eigenvector columns really diagonalize upsilon per class
        vals = np.diag(np.linalg.inv(vecs) @ ir.upsilon @ vecs)
        for i in range(len(labels)):
            for j in range(len(labels)):
                if labels[i] == labels[j]:
                    assert abs(vals[i] - vals[j]) < 1e-8


@pytest.mark.parametrize("kappa", KAPPAS)
def test_solution_quality(sols, kappa):
    s = sols[kappa]
    assert s.gap >= 1e4
    assert s.hermiticity <= 1e-10
    assert s.commutator <= 1e-9
    assert s.positive
    assert abs(np.trace(s.h).real - s.irrep.n_tau) < 1e-10


@pytest.mark.parametrize("kappa", KAPPAS)
def test_face_residuals(sols, kappa):
    r1, r2 = face_residuals(sols[kappa])
    assert r1 <= 1e-6
    assert r2 <= 1e-6


def test_kappa_zero_limit(ir21):
    # as kappa -> 0 the weight tends to the constant-coefficient form:
    # H proportional to the identity (L == I and the tableau weights enter
    # only through the basis normalization)
    s = solve_H(ir21, 1e-4)
    off = s.h - np.diag(np.diag(s.h))
    assert np.abs(off).max() < 1e-2
    d = np.diag(s.h).real
    assert np.abs(d - d.mean()).max() < 1e-2


def test_positivity_lost_at_window_edge():
    # for tau = (3,1) the window edge is 1/h_tau = 1/4; positivity must
    # hold inside and fail beyond
    ir = build_irrep((3, 1))
    inside = solve_H(ir, 0.2)
    assert inside.positive
    outside = solve_H(ir, 0.3)
    assert not outside.positive


@pytest.mark.parametrize("kappa", [0.1, -0.25])
def test_weight_covariance(sols, kappa, rng):
    # K(x w) = tau(w)^{-1} K(x) tau(w): the monodromy power of upsilon
    # cancels because H commutes with upsilon
    s = sols[kappa]
    th = np.sort(rng.uniform(0, 2, 3)) + np.array([0.0, 0.3, 0.9])
    p = TorusPoint(tuple(th))
    k0 = weight_K(s, p)
    for w in [(2, 1, 3), (3, 1, 2), (2, 3, 1)]:
        kw = weight_K(s, permute_point(p, w))
        tw = s.irrep.rep(w)
        assert np.abs(kw - tw.conj().T @ k0 @ tw).max() < 1e-8, w


def test_hermitian_positive_on_torus(sols, rng):
    s = sols[0.1]
    th = np.sort(rng.uniform(0, 2, 3)) + np.array([0.0, 0.4, 1.0])
    k = weight_K(s, TorusPoint(tuple(th)))
    assert np.abs(k - k.conj().T).max() < 1e-9
    assert np.linalg.eigvalsh((k + k.conj().T) / 2).min() > 0


@pytest.mark.parametrize("kappa,expected", [(0.1, 0.8), (0.25, 0.5)])
def test_boundary_exponent(sols, kappa, expected):
    z_abs = list(np.geomspace(1e-4, 1e-2, 7))
    norms = boundary_odd_norms(sols[kappa], z_abs)
    slope = loglog_slope(z_abs, norms)
    assert abs(slope - expected) <= 0.1, slope
