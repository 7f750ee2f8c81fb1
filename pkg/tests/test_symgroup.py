"""Exact-arithmetic and oracle tests of the representation layer."""

from fractions import Fraction
from math import factorial, prod

import numpy as np
import pytest

from torusjack.symgroup import (FMat, IrrepData, OneDimensionalRepresentation,
                                Rsyt, build_irrep, check_partition,
                                commutation_system_sizes, compose, conjugate,
                                cycle_perm, enumerate_rsyt, hook_lengths,
                                identity_perm, inverse_perm,
                                stembridge_profile, transposition_perm)

SHAPES = [(2, 1), (3, 1), (2, 2), (2, 1, 1), (4, 2)]


def _mats_equal(a: FMat, b: FMat) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _matmul(a, b):
    n = len(a)
    return [[sum(a[i][t] * b[t][j] for t in range(n)) for j in range(n)]
            for i in range(n)]


# ---------------------------------------------------------------------------
# tableaux
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("parts", SHAPES)
def test_dimension_hook_length_formula(parts):
    # independent oracle: n_tau = N! / prod(hooks)
    n = sum(parts)
    dim = factorial(n) // prod(hook_lengths(parts))
    assert len(enumerate_rsyt(parts)) == dim


@pytest.mark.parametrize("parts", SHAPES)
def test_rsyt_strictly_decreasing(parts):
    for t in enumerate_rsyt(parts):
        for row in t.rows:
            assert all(a > b for a, b in zip(row, row[1:]))
        for r in range(1, len(t.rows)):
            for c in range(len(t.rows[r])):
                assert t.rows[r - 1][c] > t.rows[r][c]


@pytest.mark.parametrize("parts", SHAPES)
def test_basis_order_sigma_block_first(parts):
    ir = build_irrep(parts)
    n = ir.N
    signs = [-1 if t.content(n - 1) == -1 else 1 for t in ir.basis]
    assert signs == sorted(signs)
    assert signs.count(-1) == ir.m_tau
    # sigma = tau((N-1,N)) is exactly diag(-I_m, I_{n-m})
    expect = np.diag(np.array(signs, dtype=float))
    assert np.array_equal(ir.sigma, expect)


def test_one_dimensional_shapes_excluded():
    for parts in [(3,), (1, 1, 1), (4,), (1,)]:
        with pytest.raises(OneDimensionalRepresentation):
            check_partition(parts)
    with pytest.raises(ValueError):
        check_partition((1, 2))


def test_conjugate_partition():
    assert conjugate((4, 2)) == (2, 2, 1, 1)
    assert conjugate((2, 1)) == (2, 1)


def test_content_vector_21():
    # [DERIVED] by hand: shape (2,1), entries 3..1; the two RSYTs are
    # [[3,2],[1]] (contents 0,1,-1 for entries 1..3 -> (−1,1,0)) and
    # [[3,1],[2]] (contents (1,-1,0))
    ts = enumerate_rsyt((2, 1))
    assert [t.content_vector for t in ts] == [(1, -1, 0), (-1, 1, 0)]


# ---------------------------------------------------------------------------
# exact representation relations
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("parts", SHAPES)
def test_braid_relations_exact(parts):
    ir = build_irrep(parts)
    eye = [[Fraction(int(i == j)) for j in range(ir.n_tau)]
           for i in range(ir.n_tau)]
    for i, g in enumerate(ir.gen_exact):
        assert _mats_equal(_matmul(g, g), eye), f"s_{i+1}^2 != 1"
    for i in range(len(ir.gen_exact) - 1):
        a, b = ir.gen_exact[i], ir.gen_exact[i + 1]
        assert _mats_equal(_matmul(_matmul(a, b), a),
                           _matmul(_matmul(b, a), b))
    for i in range(len(ir.gen_exact)):
        for j in range(i + 2, len(ir.gen_exact)):
            a, b = ir.gen_exact[i], ir.gen_exact[j]
            assert _mats_equal(_matmul(a, b), _matmul(b, a))


@pytest.mark.parametrize("parts", SHAPES)
def test_jucys_murphy_eigenvalues_exact(parts):
    # In the reverse-tableau convention the Jucys-Murphy elements
    # X_k = sum_{j>k} tau((k,j)) are diagonal with X_k T = c(k,T) T
    # (the branching chain removes small entries, not large ones).
    ir = build_irrep(parts)
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


@pytest.mark.parametrize("parts", SHAPES)
def test_g_unitarity_exact(parts):
    # tau(s_i)^T G tau(s_i) = G with G = diag(weights), exactly
    ir = build_irrep(parts)
    for g in ir.gen_exact:
        for r in range(ir.n_tau):
            for c in range(ir.n_tau):
                val = sum(g[t][r] * ir.weights[t] * g[t][c]
                          for t in range(ir.n_tau))
                assert val == (ir.weights[r] if r == c else 0)


@pytest.mark.parametrize("parts", SHAPES)
def test_orthonormal_generators_orthogonal(parts):
    ir = build_irrep(parts)
    for g in ir.gen:
        assert np.abs(g @ g.T - np.eye(ir.n_tau)).max() < 1e-12
        assert np.abs(g @ g - np.eye(ir.n_tau)).max() < 1e-12


@pytest.mark.parametrize("parts", SHAPES)
def test_partner_weight_relation(parts):
    # w_{T'} = (1 - 1/d^2) w_T when T' = T with i, i+1 swapped, d >= 2
    ir = build_irrep(parts)
    index = {t.rows: k for k, t in enumerate(ir.basis)}
    for k, t in enumerate(ir.basis):
        for i in range(1, ir.N):
            p = t.swap(i)
            d = t.content(i) - t.content(i + 1)
            if p is not None and d >= 2:
                wp = ir.weights[index[p.rows]]
                assert wp == (1 - Fraction(1, d * d)) * ir.weights[k]


def test_rep_homomorphism(ir21):
    rng = np.random.default_rng(7)
    perms = [tuple(rng.permutation(3) + 1) for _ in range(6)]
    for w1 in perms:
        for w2 in perms:
            lhs = ir21.rep(compose(w1, w2))
            rhs = ir21.rep(w1) @ ir21.rep(w2)
            assert np.abs(lhs - rhs).max() < 1e-13


def test_adjacent_word_reconstructs():
    for n in [3, 4, 5]:
        rng = np.random.default_rng(n)
        for _ in range(10):
            w = tuple(rng.permutation(n) + 1)
            word = IrrepData.adjacent_word(w)
            out = identity_perm(n)
            for i in word:
                out = compose(out, transposition_perm(n, i, i + 1))
            assert out == w


def test_perm_helpers():
    w = (3, 1, 4, 2)
    assert compose(w, inverse_perm(w)) == identity_perm(4)
    assert inverse_perm(inverse_perm(w)) == w
    assert cycle_perm(4) == (2, 3, 4, 1)


# ---------------------------------------------------------------------------
# constants and the Stembridge profile
# ---------------------------------------------------------------------------

def test_worked_example_42_constants():
    # published worked example for tau = (4,2)
    ir = build_irrep((4, 2))
    assert ir.n_tau == 9
    assert ir.m_tau == 3
    assert ir.h_tau == 5
    e, commutant = stembridge_profile((4, 2))
    assert e == [2, 1, 2, 1, 2, 1]
    assert commutant == 15
    assert commutation_system_sizes((4, 2)) == (45, 66)


def test_constants_21():
    ir = build_irrep((2, 1))
    assert ir.s1 == 0 and ir.gamma == 0 and ir.lambda_trace == 0
    assert ir.h_tau == 3
    assert ir.weights == (Fraction(1), Fraction(3, 4))


def test_lambda_trace_matches_rep_trace():
    for parts in SHAPES:
        ir = build_irrep(parts)
        tr = np.trace(ir.transposition(1, 2))
        assert abs(tr - float(ir.lambda_trace)) < 1e-12


def test_stembridge_multiplicities_match_upsilon_spectrum():
    # dual route: numerical eigenvalues of tau(w0) vs character formula
    for parts in SHAPES:
        ir = build_irrep(parts)
        e, _ = stembridge_profile(parts)
        vals = np.linalg.eigvals(ir.upsilon)
        root = np.exp(2j * np.pi / ir.N)
        # the profile counts eigenvalues omega^j up to a fixed global twist
        for twist in range(2 * ir.N):
            shift = np.exp(1j * np.pi * twist / ir.N)
            counts = [int(np.sum(np.abs(vals - shift * root ** j) < 1e-8))
                      for j in range(ir.N)]
            if sum(counts) == ir.n_tau:
                assert sorted(counts, reverse=True) == sorted(e, reverse=True)
                break
        else:
            raise AssertionError("upsilon spectrum is not a twisted root set")


def test_upsilon_power_inverse(ir21):
    assert np.abs(ir21.upsilon_power(-1) @ ir21.upsilon
                  - np.eye(2)).max() < 1e-13
    assert np.abs(ir21.upsilon_power(3) - np.linalg.matrix_power(
        ir21.upsilon, 3)).max() < 1e-13
