"""Vector-valued Laurent polynomials, Dunkl and Cherednik-Dunkl operators,
and nonsymmetric Jack polynomials.

Polynomials take values in the RSYT module; coefficient vectors are stored
over the seminormal basis of :mod:`torusjack.symgroup`.  The Cherednik-Dunkl
operators U_i act triangularly on monomials; their simultaneous
eigenfunctions zeta_{alpha,T} (the nonsymmetric Jack polynomials) are
extracted by assembling the full matrices of U_1..U_N on a homogeneous
component and intersecting eigenspaces at the target spectral vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from .symgroup import IrrepData, Perm, Rsyt, inverse_perm

DEGREE_CAPS = {3: 4, 4: 3}  # per N; keeps component dimensions < 10^3
SPECTRAL_TOL = 1e-8


class SpectralCollision(ValueError):
    """Two labels share a spectral vector at this kappa: kappa is outside
    the generic parameter set for this component."""


class DegreeCapExceeded(ValueError):
    pass


def rank_function(alpha: tuple[int, ...]) -> Perm:
    """r_alpha(i) = #{j: alpha_j > alpha_i} + #{j <= i: alpha_j = alpha_i}."""
    n = len(alpha)
    return tuple(
        sum(1 for a in alpha if a > alpha[i])
        + sum(1 for j in range(i + 1) if alpha[j] == alpha[i])
        for i in range(n))


def spectral_vector(irrep: IrrepData, kappa: float,
                    alpha: tuple[int, ...], t: Rsyt) -> np.ndarray:
    """[alpha_i + 1 + kappa * c(r_alpha(i), T)] for i = 1..N."""
    r = rank_function(alpha)
    return np.array([alpha[i] + 1 + kappa * t.content(r[i])
                     for i in range(len(alpha))])


@dataclass
class LaurentVPoly:
    """Finite map exponent vector -> coefficient vector (length n_tau)."""

    irrep: IrrepData
    terms: dict[tuple[int, ...], np.ndarray] = field(default_factory=dict)

    def copy(self) -> "LaurentVPoly":
        return LaurentVPoly(self.irrep, {a: c.copy() for a, c in self.terms.items()})

    def add_term(self, alpha: tuple[int, ...], coeff: np.ndarray) -> None:
        if alpha in self.terms:
            self.terms[alpha] = self.terms[alpha] + coeff
        else:
            self.terms[alpha] = np.asarray(coeff, dtype=complex).copy()

    def prune(self, tol: float = 0.0) -> "LaurentVPoly":
        self.terms = {a: c for a, c in self.terms.items()
                      if np.max(np.abs(c)) > tol}
        return self

    def __add__(self, other: "LaurentVPoly") -> "LaurentVPoly":
        out = self.copy()
        for a, c in other.terms.items():
            out.add_term(a, c)
        return out.prune()

    def __sub__(self, other: "LaurentVPoly") -> "LaurentVPoly":
        return (self + other.scale(-1)).prune()

    def scale(self, s: complex) -> "LaurentVPoly":
        return LaurentVPoly(self.irrep, {a: s * c for a, c in self.terms.items()})

    def matapply(self, m: np.ndarray) -> "LaurentVPoly":
        """Apply a matrix to every coefficient vector."""
        return LaurentVPoly(self.irrep, {a: m @ c for a, c in self.terms.items()})

    def swap_vars(self, i: int, j: int) -> "LaurentVPoly":
        """p(x) -> p(x(i,j)): exchange exponents i and j (1-based)."""
        out = LaurentVPoly(self.irrep)
        for a, c in self.terms.items():
            b = list(a)
            b[i - 1], b[j - 1] = b[j - 1], b[i - 1]
            out.add_term(tuple(b), c)
        return out

    def shift(self, m: int) -> "LaurentVPoly":
        """Multiply by e_N^m = (x_1 ... x_N)^m."""
        return LaurentVPoly(self.irrep, {
            tuple(v + m for v in a): c for a, c in self.terms.items()})

    def mul_x(self, i: int) -> "LaurentVPoly":
        out = LaurentVPoly(self.irrep)
        for a, c in self.terms.items():
            b = list(a)
            b[i - 1] += 1
            out.add_term(tuple(b), c)
        return out

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Coefficient-basis value at the point x (complex N-vector)."""
        val = np.zeros(self.irrep.n_tau, dtype=complex)
        for a, c in self.terms.items():
            val += np.prod(x ** np.array(a)) * c
        return val

    def permute_argument(self, w: Perm) -> "LaurentVPoly":
        """p(x) -> p(xw) with (xw)_i = x_{w(i)}: the monomial x^alpha maps
        to x^beta with beta_j = alpha_{w^{-1}(j)}."""
        inv = inverse_perm(w)
        out = LaurentVPoly(self.irrep)
        for a, c in self.terms.items():
            out.add_term(tuple(a[inv[j] - 1] for j in range(len(a))), c)
        return out

    def act(self, w: Perm) -> "LaurentVPoly":
        """The group action (w p)(x) = tau(w) p(xw)."""
        return self.permute_argument(w).matapply(self.irrep.rep(w))

    def max_abs(self) -> float:
        return max((np.max(np.abs(c)) for c in self.terms.values()), default=0.0)

    def total_degrees(self) -> set[int]:
        return {sum(a) for a in self.terms}

    @staticmethod
    def monomial(irrep: IrrepData, alpha: tuple[int, ...],
                 tableau_index: int) -> "LaurentVPoly":
        c = np.zeros(irrep.n_tau, dtype=complex)
        c[tableau_index] = 1.0
        return LaurentVPoly(irrep, {tuple(alpha): c})


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def _divided_difference(alpha: tuple[int, ...], i: int, j: int):
    """Exponent vectors and sign of (x^alpha - x^{(i,j)alpha})/(x_i - x_j),
    exact for Laurent monomials via the geometric telescoping sum."""
    a, b = alpha[i - 1], alpha[j - 1]
    if a == b:
        return []
    sign = 1 if a > b else -1
    lo, hi = min(a, b), max(a, b)
    out = []
    for k in range(hi - lo):
        e = list(alpha)
        e[i - 1], e[j - 1] = lo + k, hi - 1 - k
        out.append((tuple(e), sign))
    return out


def dunkl_apply(irrep: IrrepData, kappa: float, i: int,
                p: LaurentVPoly) -> LaurentVPoly:
    """D_i p = d/dx_i p + kappa sum_{j != i} tau((i,j)) (p - p(x(i,j)))/(x_i - x_j)."""
    out = LaurentVPoly(irrep)
    n = irrep.N
    taus = {j: irrep.transposition(i, j) for j in range(1, n + 1) if j != i}
    for a, c in p.terms.items():
        if a[i - 1] != 0:
            e = list(a)
            e[i - 1] -= 1
            out.add_term(tuple(e), a[i - 1] * c)
        if kappa != 0.0:
            for j in range(1, n + 1):
                if j == i:
                    continue
                tc = kappa * (taus[j] @ c)
                for e, sign in _divided_difference(a, i, j):
                    out.add_term(e, sign * tc)
    return out.prune()


def cherednik_apply(irrep: IrrepData, kappa: float, i: int,
                    p: LaurentVPoly) -> LaurentVPoly:
    """U_i p = D_i(x_i p) - kappa sum_{j < i} tau((i,j)) p(x(i,j)).

    Applies verbatim to Laurent polynomials; on e_N-shifted arguments it
    satisfies U_i(e_N^m p) = e_N^m (m + U_i) p.
    """
    out = dunkl_apply(irrep, kappa, i, p.mul_x(i))
    for j in range(1, i):
        out = out - p.swap_vars(i, j).matapply(irrep.transposition(i, j)).scale(kappa)
    return out.prune()


# ---------------------------------------------------------------------------
# nonsymmetric Jack polynomials
# ---------------------------------------------------------------------------

def compositions(n: int, total: int) -> list[tuple[int, ...]]:
    """All alpha in N_0^n with sum = total, deterministic order."""
    if n == 1:
        return [(total,)]
    out = []
    for first in range(total, -1, -1):
        for rest in compositions(n - 1, total - first):
            out.append((first,) + rest)
    return out


def nsjp(irrep: IrrepData, kappa: float, alpha: tuple[int, ...],
         tableau_index: int, degree_cap: int | None = None) -> LaurentVPoly:
    """The nonsymmetric Jack polynomial zeta_{alpha,T}, normalized so the
    coefficient of x^alpha (x) T is 1.

    Negative exponents are handled through the e_N shift
    zeta_{alpha + m 1, T} = e_N^m zeta_{alpha, T}.
    """
    n = irrep.N
    if len(alpha) != n:
        raise ValueError("alpha length must equal N")
    cap = degree_cap if degree_cap is not None else DEGREE_CAPS.get(n, 3)
    if max(alpha) - min(alpha) > cap:
        raise DegreeCapExceeded(f"max(alpha)-min(alpha) > {cap}")

    m = min(min(alpha), 0)
    base = tuple(a - m for a in alpha)  # nonnegative
    deg = sum(base)

    monos = compositions(n, deg)
    labels = [(b, t) for b in monos for t in range(irrep.n_tau)]
    dim = len(labels)
    lab_index = {lab: k for k, lab in enumerate(labels)}

    target = spectral_vector(irrep, kappa, base, irrep.basis[tableau_index])
    for b in monos:
        for t in range(irrep.n_tau):
            if (b, t) == (base, tableau_index):
                continue
            sv = spectral_vector(irrep, kappa, b, irrep.basis[t])
            if np.max(np.abs(sv - target)) < SPECTRAL_TOL:
                raise SpectralCollision(
                    f"labels {(base, tableau_index)} and {(b, t)} collide at kappa={kappa}")

    # stack (U_i - lambda_i I) over all i and take the null space
    stack = np.zeros((n * dim, dim), dtype=complex)
    for col, (b, t) in enumerate(labels):
        p = LaurentVPoly.monomial(irrep, b, t)
        for i in range(1, n + 1):
            up = cherednik_apply(irrep, kappa, i, p)
            for a, c in up.terms.items():
                for tt in range(irrep.n_tau):
                    if c[tt] != 0:
                        stack[(i - 1) * dim + lab_index[(a, tt)], col] += c[tt]
            stack[(i - 1) * dim + col, col] -= target[i - 1]

    from scipy.linalg import null_space
    ns = null_space(stack, rcond=1e-9)
    if ns.shape[1] != 1:
        raise SpectralCollision(
            f"eigenspace dimension {ns.shape[1]} != 1 at kappa={kappa}")
    v = ns[:, 0]
    v = v / v[lab_index[(base, tableau_index)]]

    out = LaurentVPoly(irrep)
    for k, (b, t) in enumerate(labels):
        if abs(v[k]) > 1e-13:
            c = np.zeros(irrep.n_tau, dtype=complex)
            c[t] = v[k]
            out.add_term(b, c)
    return out.shift(m) if m else out
