"""Structured matrix constructors: derivative rows, H/M, T_gamma, selectors."""

import math

import numpy as np
import pytest

from polydist import (MatrixPolynomial, as_gamma, build_E, build_H, build_M,
                      build_T, build_T_gamma, chain_matrix, eval_derivative_row,
                      gamma_selectors, perturbed, poly_norm, polynomial_from_row)
from polydist.benchmarks import EXAMPLE1

from conftest import random_polynomial


def test_validation():
    with pytest.raises(ValueError):
        MatrixPolynomial(np.zeros((1, 2, 2)))       # degree 0
    with pytest.raises(ValueError):
        MatrixPolynomial(np.zeros((3, 2, 3)))       # not square
    bad = np.zeros((2, 2, 2))
    bad[1, 0, 0] = np.nan
    with pytest.raises(ValueError):
        MatrixPolynomial(bad)
    with pytest.raises(ValueError):
        as_gamma([1.0, -0.5])
    with pytest.raises(ValueError):
        as_gamma([])


def test_degenerate_leading_coefficient_kept():
    coeffs = np.zeros((3, 2, 2))
    coeffs[0] = np.eye(2)
    p = MatrixPolynomial(coeffs)   # leading coefficient exactly zero is legal
    assert p.k == 2


def test_derivative_row_constant_padding():
    coeffs = np.zeros((2, 2, 2))
    coeffs[0] = np.array([[1.0, 2.0], [3.0, 4.0]])
    p = MatrixPolynomial(coeffs)
    row = eval_derivative_row(p, 0.33, 3)
    assert np.allclose(row.blocks[0], coeffs[0])
    assert np.allclose(row.blocks[2], 0)
    assert np.allclose(row.blocks[3], 0)


def test_derivative_row_example1_at_zero():
    row = eval_derivative_row(EXAMPLE1, 0.0, 3)
    for d in range(4):
        assert np.array_equal(row.blocks[d], EXAMPLE1.coeffs[d])


def test_derivative_row_matches_M_product(rng):
    p = random_polynomial(rng, 2, 3)
    for lam in (0.7, -1.3 + 0.4j):
        for r in (1, 3, 5):
            row = eval_derivative_row(p, lam, min(r, p.k)).stacked()
            M = build_M(lam, p.k, r, p.n)
            prod = p.coefficient_row() @ M
            assert np.linalg.norm(row - prod) <= 1e-12 * np.linalg.norm(row)


def test_H_at_zero_truncated_identity():
    H = build_H(0.0, 4, 2)
    assert H.shape == (5, 3)
    assert np.array_equal(H[:3], np.eye(3))
    assert np.all(H[3:] == 0)


def test_H_small_cases():
    assert np.allclose(build_H(1.0, 1, 1), [[1, 0], [1, 1]])
    # differentiate lambda^3 once at 2, divide by 1!: 3 * 2^2 = 12
    assert build_H(2.0, 3, 3)[3, 1] == pytest.approx(12.0)


def test_H_entries_match_polynomial_derivative_oracle():
    lam = 0.83
    k, r = 4, 3
    H = build_H(lam, k, r)
    for a in range(k + 1):
        mono = np.polynomial.Polynomial([0.0] * a + [1.0])
        for b in range(min(r, k) + 1):
            want = mono.deriv(b)(lam) / math.factorial(b) if b <= a else 0.0
            assert H[a, b] == pytest.approx(want, abs=1e-12)


def test_M_is_kron_and_n1_reduces_to_H():
    lam = 1.7 - 0.2j
    H = build_H(lam, 3, 2)
    assert np.array_equal(build_M(lam, 3, 2, 1), H)
    M = build_M(lam, 3, 2, 2)
    assert np.array_equal(M, np.kron(H, np.eye(2)))


def test_T_gamma_smallest_case(rng):
    p = random_polynomial(rng, 2, 2)
    T = build_T_gamma(p, 0.4, [1.0])
    P0 = p(0.4)
    P1 = p.taylor_block(0.4, 1)
    assert np.allclose(T[:2, :2], P0)
    assert np.allclose(T[:2, 2:], 0)
    assert np.allclose(T[2:, :2], P1)
    assert np.allclose(T[2:, 2:], P0)


def test_T_gamma_jordan_block_drops_rank():
    # P(lambda) = lambda I - J_2(l0): a planted 2x2 Jordan block at l0
    l0 = 0.6
    J = np.array([[l0, 1.0], [0.0, l0]])
    p = MatrixPolynomial(np.array([-J, np.eye(2)]))
    for gamma in ([1.0], [0.3], [2.5]):
        s = np.linalg.svd(build_T_gamma(p, l0, gamma), compute_uv=False)
        assert s[2] <= 1e-12 * s[0]   # sigma_{2n-1} vanishes


def test_T_gamma_blockwise_scaling_bit_identical(rng):
    p = random_polynomial(rng, 2, 3)
    r = 4
    gamma = rng.uniform(0.5, 2.0, r)
    T = build_T_gamma(p, 0.3, gamma)
    t_idx = 2           # scale gamma_3 (1-based)
    c = 3.0
    gamma2 = gamma.copy()
    gamma2[t_idx] *= c
    T2 = build_T_gamma(p, 0.3, gamma2)
    n = p.n
    for i in range(r + 1):
        for j in range(r + 1):
            blk = T[i * n:(i + 1) * n, j * n:(j + 1) * n]
            blk2 = T2[i * n:(i + 1) * n, j * n:(j + 1) * n]
            if j <= t_idx < i:
                assert np.allclose(blk2, c * blk, rtol=1e-15)
            else:
                assert np.array_equal(blk, blk2)


def test_factorization_through_selectors(rng):
    # T(P, l0) = (I (x) derivative row) E, over sizes up to r = 6 > k
    for case in range(20):
        n = int(rng.integers(1, 4))
        k = int(rng.integers(1, 5))
        r = int(rng.integers(1, 7))
        p = random_polynomial(rng, n, k, complex_entries=bool(case % 2))
        lam = complex(rng.standard_normal(), rng.standard_normal() * (case % 2))
        T = build_T(p, lam, r)
        row = eval_derivative_row(p, lam, min(r, k)).stacked()
        F = np.kron(np.eye(r + 1), row) @ build_E(r, k, n)
        assert np.linalg.norm(T - F) <= 1e-12 * max(np.linalg.norm(T), 1e-300)


def test_E_selector_structure():
    E = build_E(1, 3, 1)
    assert np.array_equal(E, [[1, 0], [0, 0], [0, 1], [1, 0]])
    for r, k, n in [(3, 2, 2), (2, 4, 1), (5, 3, 2)]:
        E = build_E(r, k, n)
        assert E.shape == ((r + 1) * (min(r, k) + 1) * n, (r + 1) * n)
        for row in E:
            nz = row[row != 0]
            assert nz.size <= 1
            if nz.size:
                assert nz[0] == 1.0


def test_gamma_selectors_weighting():
    gamma = np.array([2.0, 3.0])
    E1, E2, E3 = gamma_selectors(2, gamma)
    assert np.array_equal(E1, [[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert np.array_equal(E2, [[0, 1, 0], [2, 0, 0], [0, 0, 0]])
    assert np.array_equal(E3, [[0, 0, 1], [0, 3, 0], [6, 0, 0]])


def test_poly_norm_cases(rng):
    coeffs = np.zeros((3, 2, 2))
    assert poly_norm(MatrixPolynomial(coeffs)) == 0.0
    coeffs[0] = np.eye(2)
    p = MatrixPolynomial(coeffs)
    assert poly_norm(p, "F") == pytest.approx(math.sqrt(2))
    assert poly_norm(p, "2") == pytest.approx(1.0)
    for _ in range(10):
        q = random_polynomial(rng, 3, 2)
        assert poly_norm(q, "2") <= poly_norm(q, "F") + 1e-12
    with pytest.raises(ValueError):
        poly_norm(p, "1")


def test_chain_matrix_layouts(rng):
    # r <= k: (r+1)n rows; r > k: (k+1)n rows with the same band pattern
    n, k = 2, 2
    xs = rng.standard_normal((4, n))        # r = 3 > k
    gamma = np.array([2.0, 3.0, 5.0])
    X = chain_matrix(xs, gamma, k)
    assert X.shape == ((k + 1) * n, 4)
    assert np.allclose(X[:n, 3], xs[3])                    # top row x_3
    assert np.allclose(X[n:2 * n, 3], gamma[2] * xs[2])    # gamma_3 x_2
    assert np.allclose(X[2 * n:, 3], gamma[1] * gamma[2] * xs[1])
    assert np.allclose(X[2 * n:, 2], gamma[0] * gamma[1] * xs[0])
    # column j of the gamma matrix is prod(gamma[:j]) times the ones-matrix column
    ones = chain_matrix(xs / np.concatenate([[1.0], np.cumprod(gamma)])[:, None],
                        np.ones(3), k)
    beta = np.concatenate([[1.0], np.cumprod(gamma)])
    assert np.allclose(X, ones * beta[None, :])


def test_perturbed_and_row_round_trip(rng):
    p = random_polynomial(rng, 2, 3, complex_entries=True)
    row = p.coefficient_row()
    q = polynomial_from_row(row, 2)
    assert np.array_equal(q.coeffs, p.coeffs)
    dp = random_polynomial(rng, 2, 3, complex_entries=True)
    assert np.allclose(perturbed(p, dp).coeffs, p.coeffs + dp.coeffs)
