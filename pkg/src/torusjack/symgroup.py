"""Partitions, reverse standard Young tableaux, and the concrete irreducible
representation of S_N used throughout the package.

The representation is built in Young's seminormal form on the basis of
reverse standard Young tableaux (RSYT: entries strictly decrease along rows
and columns).  The basis is ordered so that tableaux with c(N-1, T) = -1
come first, which makes tau((N-1, N)) = diag(-I, I) exactly.  All matrices
are constructed in exact rational arithmetic; floating-point (and the
orthonormal conjugation used by the analytic modules) only appears at the
module boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import sqrt

import numpy as np

Perm = tuple[int, ...]  # one-line notation, 1-based images: w[i-1] = w(i)


class OneDimensionalRepresentation(ValueError):
    """Raised for one-row or one-column shapes (excluded by construction)."""


# ---------------------------------------------------------------------------
# partitions and tableaux
# ---------------------------------------------------------------------------

def check_partition(parts: tuple[int, ...]) -> None:
    if not parts or any(p <= 0 for p in parts):
        raise ValueError(f"invalid partition {parts}")
    for a, b in zip(parts, parts[1:]):
        if b > a:
            raise ValueError(f"parts must be weakly decreasing: {parts}")
    if len(parts) == 1 or all(p == 1 for p in parts):
        raise OneDimensionalRepresentation(
            f"one-dimensional representation excluded: {parts}")


def hook_length_max(parts: tuple[int, ...]) -> int:
    """Maximum hook length of the diagram: parts[0] + number of rows - 1."""
    return parts[0] + len(parts) - 1


def conjugate(parts: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sum(1 for p in parts if p > j) for j in range(parts[0]))


@dataclass(frozen=True)
class Rsyt:
    """A reverse standard Young tableau: entries 1..N strictly decreasing
    along each row and each column."""

    rows: tuple[tuple[int, ...], ...]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rows)

    @property
    def size(self) -> int:
        return sum(len(r) for r in self.rows)

    def position(self, entry: int) -> tuple[int, int]:
        """(row, column) of an entry, zero-based."""
        for r, row in enumerate(self.rows):
            for c, v in enumerate(row):
                if v == entry:
                    return r, c
        raise ValueError(f"entry {entry} not in tableau")

    def content(self, entry: int) -> int:
        """c(i, T) = column - row of the cell holding i (zero-based grid)."""
        r, c = self.position(entry)
        return c - r

    @property
    def content_vector(self) -> tuple[int, ...]:
        pos = {}
        for r, row in enumerate(self.rows):
            for c, v in enumerate(row):
                pos[v] = c - r
        return tuple(pos[i] for i in range(1, self.size + 1))

    def swap(self, i: int) -> "Rsyt | None":
        """Exchange entries i and i+1 if the result is again an RSYT."""
        (r1, c1), (r2, c2) = self.position(i), self.position(i + 1)
        if r1 == r2 or c1 == c2:
            return None  # adjacent in a row or column: swap is not standard
        rows = [list(r) for r in self.rows]
        rows[r1][c1], rows[r2][c2] = i + 1, i
        return Rsyt(tuple(tuple(r) for r in rows))

    def __str__(self) -> str:
        return "\n".join(" ".join(f"{v:2d}" for v in row) for row in self.rows)


def enumerate_rsyt(parts: tuple[int, ...]) -> list[Rsyt]:
    """All RSYTs of the given shape, ordered as the representation basis:
    tableaux with c(N-1, T) = -1 first, then lexicographically decreasing
    content vector within each block."""
    check_partition(parts)
    n = sum(parts)

    # Place entries n, n-1, ..., 1; every prefix occupies a Young subdiagram,
    # so each new entry goes at the end of a row whose cell exists in the
    # shape and whose column is not longer than the column above supports.
    fillings: list[Rsyt] = []
    rows: list[list[int]] = [[] for _ in parts]

    def place(entry: int) -> None:
        if entry == 0:
            fillings.append(Rsyt(tuple(tuple(r) for r in rows)))
            return
        for r in range(len(parts)):
            c = len(rows[r])
            if c >= parts[r]:
                continue
            if r > 0 and len(rows[r - 1]) <= c:
                continue
            rows[r].append(entry)
            place(entry - 1)
            rows[r].pop()

    place(n)

    def key(t: Rsyt):
        # c(N-1, T) is -1 or +1 (entry N sits at the corner, content 0)
        block = 0 if t.content(n - 1) == -1 else 1
        return (block, tuple(-c for c in t.content_vector))

    return sorted(fillings, key=key)


# ---------------------------------------------------------------------------
# exact rational linear algebra helpers
# ---------------------------------------------------------------------------

FMat = list[list[Fraction]]


def _eye(n: int) -> FMat:
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
            for i in range(n)]


def _matmul(a: FMat, b: FMat) -> FMat:
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0))
             for j in range(m)] for i in range(n)]


def _to_float(a: FMat) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in a], dtype=float)


# ---------------------------------------------------------------------------
# the representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IrrepData:
    """The irreducible S_N module on the RSYT basis of shape ``tau``.

    ``gen_exact`` holds the seminormal matrices of the adjacent
    transpositions (i, i+1); they are unitary with respect to the diagonal
    form G = diag(weights).  ``gen`` holds the orthonormal conjugates
    D^{1/2} tau(s_i) D^{-1/2} (real orthogonal matrices), which are the ones
    used by the flow/series/quadrature modules, where Hermitian adjoints of
    matrices must coincide with adjoints of the represented operators.
    """

    tau: tuple[int, ...]
    N: int
    n_tau: int
    m_tau: int
    basis: tuple[Rsyt, ...]
    gen_exact: tuple[FMat, ...]           # tau(s_i), i = 1..N-1, Fractions
    weights: tuple[Fraction, ...]         # <T, T>_0 per basis tableau
    s1: int                               # S_1(tau) = sum of all contents
    gamma: Fraction                       # S_1(tau) / N
    lambda_trace: Fraction                # tr tau((1,2)) = 2 gamma n_tau/(N-1)
    gen: tuple[np.ndarray, ...] = field(repr=False)   # orthonormal, float
    sigma: np.ndarray = field(repr=False)             # tau((N-1,N)), diagonal
    upsilon: np.ndarray = field(repr=False)           # tau(w0), orthonormal

    @property
    def h_tau(self) -> int:
        return hook_length_max(self.tau)

    @property
    def contents(self) -> np.ndarray:
        """contents[t, i-1] = c(i, basis[t])."""
        return np.array([t.content_vector for t in self.basis], dtype=int)

    # -- permutations ------------------------------------------------------

    @staticmethod
    def adjacent_word(w: Perm) -> list[int]:
        """Indices i such that w = s_{i_1} s_{i_2} ... s_{i_k} under the
        composition convention (w1 w2)(i) = w1(w2(i))."""
        a = list(w)
        swaps = []
        changed = True
        while changed:
            changed = False
            for i in range(len(a) - 1):
                if a[i] > a[i + 1]:
                    a[i], a[i + 1] = a[i + 1], a[i]
                    swaps.append(i + 1)  # right-multiplied by s_{i+1}
                    changed = True
        # w * s_{j1} * ... * s_{jk} = id  =>  w = s_{jk} * ... * s_{j1}
        return swaps[::-1]

    def rep(self, w: Perm) -> np.ndarray:
        """tau(w) in the orthonormal basis (float, orthogonal matrix)."""
        m = np.eye(self.n_tau)
        for i in self.adjacent_word(w):
            m = m @ self.gen[i - 1]
        return m

    def rep_exact(self, w: Perm) -> FMat:
        m = _eye(self.n_tau)
        for i in self.adjacent_word(w):
            m = _matmul(m, self.gen_exact[i - 1])
        return m

    def transposition(self, i: int, j: int) -> np.ndarray:
        """tau((i, j)) in the orthonormal basis."""
        return self.rep(transposition_perm(self.N, i, j))

    def upsilon_power(self, k: int) -> np.ndarray:
        m = np.eye(self.n_tau)
        u = self.upsilon if k >= 0 else self.upsilon.T  # orthogonal inverse
        for _ in range(abs(k)):
            m = m @ u
        return m


def identity_perm(n: int) -> Perm:
    return tuple(range(1, n + 1))


def compose(w1: Perm, w2: Perm) -> Perm:
    """(w1 w2)(i) = w1(w2(i))."""
    return tuple(w1[w2[i] - 1] for i in range(len(w1)))


def inverse_perm(w: Perm) -> Perm:
    inv = [0] * len(w)
    for i, v in enumerate(w):
        inv[v - 1] = i + 1
    return tuple(inv)


def transposition_perm(n: int, i: int, j: int) -> Perm:
    a = list(range(1, n + 1))
    a[i - 1], a[j - 1] = j, i
    return tuple(a)


def cycle_perm(n: int) -> Perm:
    """w0: i -> i+1 mod n, the product (1,2)(2,3)...(n-1,n)."""
    return tuple(list(range(2, n + 1)) + [1])


@lru_cache(maxsize=None)
def build_irrep(parts: tuple[int, ...]) -> IrrepData:
    check_partition(parts)
    n = sum(parts)
    basis = enumerate_rsyt(parts)
    dim = len(basis)
    index = {t.rows: k for k, t in enumerate(basis)}
    m_tau = sum(1 for t in basis if t.content(n - 1) == -1)

    # seminormal action of s_i = (i, i+1):
    #   tau(s_i) T = (1/d) T + c(T,T') T'   with d = c(i,T) - c(i+1,T),
    # where the coupling to the swapped tableau T' is 1 when d >= 2 and
    # 1 - 1/d^2 when d <= -2 (no partner when |d| = 1).
    gens: list[FMat] = []
    for i in range(1, n):
        m = [[Fraction(0)] * dim for _ in range(dim)]
        for col, t in enumerate(basis):
            d = t.content(i) - t.content(i + 1)
            m[col][col] = Fraction(1, d)
            partner = t.swap(i)
            if partner is not None:
                row = index[partner.rows]
                m[row][col] = Fraction(1) if d >= 2 else Fraction(d * d - 1, d * d)
        gens.append(m)

    # invariant form weights: <T,T>_0 = prod over pairs i<j with
    # c(i,T) <= c(j,T) - 2 of (1 - 1/(c(i,T)-c(j,T))^2)
    weights = []
    for t in basis:
        cv = t.content_vector
        w = Fraction(1)
        for i in range(n):
            for j in range(i + 1, n):
                d = cv[i] - cv[j]
                if d <= -2:
                    w *= Fraction(d * d - 1, d * d)
        weights.append(w)

    s1 = sum(basis[0].content_vector)
    gamma = Fraction(s1, n)
    lambda_trace = Fraction(2 * s1, n) * Fraction(dim, n - 1)

    # orthonormal conjugation: entries sqrt(w_row / w_col) * m[row][col]
    sw = [sqrt(float(w)) for w in weights]
    gen_f = tuple(
        np.array([[sw[r] / sw[c] * float(m[r][c]) for c in range(dim)]
                  for r in range(dim)])
        for m in gens)

    sigma = gen_f[-1].copy()
    ups = np.eye(dim)
    for g in gen_f:
        ups = ups @ g  # w0 = (1,2)(2,3)...(N-1,N), composed left to right

    irrep = IrrepData(
        tau=parts, N=n, n_tau=dim, m_tau=m_tau, basis=tuple(basis),
        gen_exact=tuple(gens), weights=tuple(weights), s1=s1, gamma=gamma,
        lambda_trace=lambda_trace, gen=gen_f, sigma=sigma, upsilon=ups)
    return irrep


# ---------------------------------------------------------------------------
# Stembridge profile: eigenvalue multiplicities of upsilon
# ---------------------------------------------------------------------------

def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    num = num[:]
    deg_d = len(den) - 1
    while den[deg_d] == 0:
        deg_d -= 1
    q = [0] * max(1, len(num) - deg_d)
    for i in range(len(num) - 1, deg_d - 1, -1):
        if num[i] == 0:
            continue
        c, r = divmod(num[i], den[deg_d])
        if r != 0:
            raise ArithmeticError("non-exact polynomial division")
        q[i - deg_d] = c
        for j in range(deg_d + 1):
            num[i - deg_d + j] -= c * den[j]
    return q, num


def hook_lengths(parts: tuple[int, ...]) -> list[int]:
    conj = conjugate(parts)
    return [parts[i] - (j + 1) + conj[j] - (i + 1) + 1
            for i in range(len(parts)) for j in range(parts[i])]


def stembridge_profile(parts: tuple[int, ...]) -> tuple[list[int], int]:
    """Multiplicities (e_0, ..., e_{N-1}) of the eigenvalues omega^j of
    tau(w0), via the fake-degree polynomial reduced mod (1 - q^N), and the
    dimension sum(e_j^2) of the commutant of tau(w0)."""
    check_partition(parts)
    n = sum(parts)
    # q^{n(tau)} with n(tau) = sum (i-1) tau_i
    ntau = sum((i - 1) * p for i, p in enumerate(parts, 1))
    num = [0] * ntau + [1]
    for i in range(1, n + 1):
        num = _poly_mul(num, [1] + [0] * (i - 1) + [-1])
    den = [1]
    for h in hook_lengths(parts):
        den = _poly_mul(den, [1] + [0] * (h - 1) + [-1])
    quot, rem = _poly_divmod(num, den)
    if any(rem):
        raise ArithmeticError("fake-degree quotient is not a polynomial")
    e = [0] * n
    for k, c in enumerate(quot):
        e[k % n] += c
    return e, sum(v * v for v in e)


def commutation_system_sizes(parts: tuple[int, ...]) -> tuple[int, int]:
    """(unknowns n, equations m) of the commutation system for B1:
    n = m_tau^2 + (n_tau - m_tau)^2, m = n_tau^2 - dim commutant(upsilon)."""
    irrep = build_irrep(parts)
    _, cdim = stembridge_profile(parts)
    n = irrep.m_tau ** 2 + (irrep.n_tau - irrep.m_tau) ** 2
    return n, irrep.n_tau ** 2 - cdim
