"""Determination of the constant Hermitian matrix H in the weight
K(x) = L(x)* H L(x).

Two structural constraints pin H down to a scalar multiple:

* smoothness of K across the face x_{N-1} = x_N forces
  B := (C*)^{-1} H C^{-1} to be block-diagonal for the sigma-grading,
  where C = L1(x0) is the matching constant of :mod:`localseries`
  (the off-diagonal blocks of B would enter K with |z|^{+-2kappa}
  monodromy factors);
* single-valuedness of K on each component forces upsilon H = H upsilon,
  since L(xw) = upsilon^p L(x) tau(w) for deck transformations w.

The commutation condition, written in the eigenbasis of upsilon and
restricted to entry positions whose eigenvalues differ, is a linear system
on the free blocks of B with a one-dimensional null space at generic kappa.
It is solved by SVD; the singular-value gap certifies uniqueness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .localseries import matching_constant
from .odeflow import TorusPoint, extend_L
from .symgroup import IrrepData, stembridge_profile

EIG_CLUSTER_TOL = 1e-8
GAP_REQUIREMENT = 1e4


class DegenerateSolution(RuntimeError):
    """The linear system does not have a one-dimensional solution space."""


@dataclass
class WeightSolution:
    irrep: IrrepData
    kappa: float
    h: np.ndarray                 # the weight constant, trace-normalized
    b: np.ndarray                 # (C*)^{-1} H C^{-1}, sigma-block-diagonal
    matching: np.ndarray          # C = L1(x0)
    singular_values: np.ndarray
    gap: float                    # s[-2] / s[-1]
    hermiticity: float            # ||H - H*||_max after phase fixing
    commutator: float             # ||upsilon H - H upsilon||_max
    eigenvalues: np.ndarray       # spectrum of (H + H*)/2

    @property
    def positive(self) -> bool:
        return bool(np.min(self.eigenvalues) > 0)


def upsilon_classes(irrep: IrrepData) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors of upsilon and an integer class label per column;
    columns with equal labels share an eigenvalue (to EIG_CLUSTER_TOL)."""
    vals, vecs = np.linalg.eig(irrep.upsilon)
    order = np.argsort(np.angle(vals))
    vals, vecs = vals[order], vecs[:, order]
    labels = np.zeros(len(vals), dtype=int)
    for i in range(1, len(vals)):
        labels[i] = labels[i - 1]
        if abs(vals[i] - vals[i - 1]) > EIG_CLUSTER_TOL:
            labels[i] += 1
    if abs(vals[0] - vals[-1]) <= EIG_CLUSTER_TOL and labels[-1] != labels[0]:
        labels[labels == labels[-1]] = labels[0]
    # cross-check multiplicities against the fake-degree profile
    _, commutant = stembridge_profile(irrep.tau)
    sizes = np.bincount(labels)
    if int(np.sum(sizes ** 2)) != commutant:
        raise DegenerateSolution(
            "upsilon eigenvalue clustering disagrees with the character-level "
            f"commutant dimension {commutant}")
    return vecs, labels


def _block_basis(irrep: IrrepData) -> list[np.ndarray]:
    """Elementary matrices spanning the sigma-block-diagonal subspace, in a
    fixed order; the unknown vector of the linear system lives over this
    basis."""
    n, m = irrep.n_tau, irrep.m_tau
    out = []
    for r in range(m):
        for c in range(m):
            e = np.zeros((n, n), dtype=complex)
            e[r, c] = 1.0
            out.append(e)
    for r in range(m, n):
        for c in range(m, n):
            e = np.zeros((n, n), dtype=complex)
            e[r, c] = 1.0
            out.append(e)
    return out


def build_system(irrep: IrrepData, kappa: float,
                 matching: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """The linear map from sigma-diagonal blocks of B to the entries of
    P^{-1} [upsilon, C* B C] P at positions with distinct upsilon
    eigenvalues.  Returns (system matrix, C)."""
    if matching is None:
        matching = matching_constant(irrep, kappa)
    c = matching
    vecs, labels = upsilon_classes(irrep)
    vinv = np.linalg.inv(vecs)
    ups = irrep.upsilon
    basis = _block_basis(irrep)
    rows = [(r, s) for r in range(irrep.n_tau) for s in range(irrep.n_tau)
            if labels[r] != labels[s]]
    a = np.zeros((len(rows), len(basis)), dtype=complex)
    for col, e in enumerate(basis):
        h = c.conj().T @ e @ c
        comm = vinv @ (ups @ h - h @ ups) @ vecs
        for k, (r, s) in enumerate(rows):
            a[k, col] = comm[r, s]
    return a, c


def solve_H(irrep: IrrepData, kappa: float,
            matching: np.ndarray | None = None) -> WeightSolution:
    """H from the SVD of the commutation system, phase-fixed to positive
    trace and normalized to tr H = n_tau."""
    a, c = build_system(irrep, kappa, matching)
    _, svals, vh = np.linalg.svd(a)
    if len(svals) < len(vh):  # underdetermined beyond one free scale
        svals = np.concatenate([svals, np.zeros(len(vh) - len(svals))])
    gap = float(svals[-2] / max(svals[-1], 1e-300))
    if gap < GAP_REQUIREMENT:
        raise DegenerateSolution(
            f"singular-value gap {gap:.3g} below {GAP_REQUIREMENT:.0e}")
    vec = vh[-1].conj()
    b = np.zeros((irrep.n_tau, irrep.n_tau), dtype=complex)
    for x, e in zip(vec, _block_basis(irrep)):
        b += x * e
    h = c.conj().T @ b @ c
    # fix the free phase by making tr H real positive, then normalize
    tr = np.trace(h)
    phase = tr / abs(tr)
    h, b = h / phase, b / phase
    scale = irrep.n_tau / np.trace(h).real
    h, b = h * scale, b * scale
    herm = float(np.abs(h - h.conj().T).max())
    comm = float(np.abs(irrep.upsilon @ h - h @ irrep.upsilon).max())
    eig = np.linalg.eigvalsh((h + h.conj().T) / 2)
    return WeightSolution(irrep, kappa, h, b, c, svals, gap, herm, comm, eig)


def face_residuals(sol: WeightSolution) -> tuple[float, float]:
    """The two face-smoothness commutators.

    H1 = (C*)^{-1} H C^{-1} must commute with sigma = tau((N-1, N))
    (smoothness across the face x_{N-1} = x_N), and H2 = upsilon^{-1} H1
    upsilon must commute with tau((N-2, N-1)) (the rotated face x omega,
    using L(omega x0) = I by homogeneity).  H1 is recomputed from H here
    rather than reusing the structurally diagonal solve unknown, so the
    residuals probe the matching constant and the upsilon commutation.
    """
    ir = sol.irrep
    cinv = np.linalg.inv(sol.matching)
    h1 = cinv.conj().T @ sol.h @ cinv
    sg = ir.sigma
    r1 = float(np.abs(sg @ h1 - h1 @ sg).max())
    upinv = ir.upsilon_power(-1)
    h2 = upinv @ h1 @ ir.upsilon
    t = ir.transposition(ir.N - 2, ir.N - 1)
    r2 = float(np.abs(t @ h2 - h2 @ t).max())
    return r1, r2


def boundary_odd_norms(sol: WeightSolution, z_abs: list[float],
                       face_angle: float | None = None,
                       terms: int = 16) -> list[float]:
    """||K(x(u,z)) - K(x(u,-z))|| for torus points approaching the face
    x_{N-1} = x_N.

    Since x(u,-z) = x(u,z) s_{N-1} and K(x s_{N-1}) = sigma K(x) sigma,
    the difference is the sigma-odd part of K = L1* H1 L1, evaluated from
    the face series; its norm scales like |z|^{1 - 2|kappa|}.
    """
    import math

    from . import localseries as ls

    ir = sol.irrep
    n = ir.N
    if face_angle is None:
        face_angle = 2 * np.pi - 3 * np.pi / n + 0.2
    cinv = np.linalg.inv(sol.matching)
    h1 = cinv.conj().T @ sol.h @ cinv
    sg = ir.sigma
    out = []
    for s in z_abs:
        eps = math.asin(s)
        phis = tuple(2 * np.pi * j / n + 0.07 * j for j in range(n - 2)) \
            + (face_angle,)
        logrs = (0.0,) * (n - 2) + (float(np.log(np.cos(eps))),)
        chart = ls.FaceChart(ir, sol.kappa, phis, logrs)
        series = ls.expand(chart, terms)
        z = 1j * np.exp(1j * face_angle) * s
        l1 = ls.eval_L1(series, z)
        k = l1.conj().T @ h1 @ l1
        out.append(float(np.linalg.norm(k - sg @ k @ sg, 2)))
    return out


def loglog_slope(z_abs: list[float], norms: list[float]) -> float:
    return float(np.polyfit(np.log(z_abs), np.log(norms), 1)[0])


def weight_K(sol: WeightSolution, x: TorusPoint,
             l_value: np.ndarray | None = None) -> np.ndarray:
    """K(x) = L(x)* H L(x); pass a precomputed L(x) to reuse flows."""
    if l_value is None:
        l_value = extend_L(sol.irrep, sol.kappa, x)
    return l_value.conj().T @ sol.h @ l_value
