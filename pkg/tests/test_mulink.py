"""mu-matrix construction, the rank-drop minimizer, and consistency checks."""

import numpy as np
import pytest

from polydist import (MatrixPolynomial, PerturbationClassTag, TargetIsEigenvalueError,
                      build_E, build_M, build_mu_matrix, build_T, eval_derivative_row,
                      min_norm_rank_drop, mu_consistency_check, upper_bound)
from polydist.mulink import structured_block_row
from polydist.benchmarks import EXAMPLE1, EXAMPLE2

from conftest import planted_polynomial, random_polynomial


def test_mu_matrix_all_ones_scaling_is_identity_conjugation():
    for lam in (0.0, 1.0):
        B0 = build_mu_matrix(EXAMPLE1, lam, 2)
        B1 = build_mu_matrix(EXAMPLE1, lam, 2, np.ones(3))
        assert np.array_equal(B0, B1)


def test_mu_matrix_norm_budget():
    # submultiplicativity sanity: ||B|| within the product of factor norms
    p, lam, r = EXAMPLE1, 0.7, 2
    T = build_T(p, lam, r)
    E = build_E(r, p.k, p.n)
    M = np.kron(np.eye(r + 1), build_M(lam, p.k, r, p.n))
    a = np.array([1.0, 2.0, 0.5])
    wl = np.linalg.norm(np.repeat(a, (p.k + 1) * p.n))
    B = build_mu_matrix(p, lam, r, a)
    bound = (np.max(a) / np.min(a)) * np.linalg.norm(M, 2) * np.linalg.norm(E, 2) \
        * np.linalg.norm(np.linalg.inv(T), 2)
    assert np.isfinite(B).all()
    assert np.linalg.norm(B, 2) <= bound * (1 + 1e-12)


def test_mu_matrix_scaling_invariance():
    # B(c a) = B(a) entrywise
    rng = np.random.default_rng(3)
    a = np.exp(rng.normal(0, 1, 3))
    for lam in (0.0, 1.0):
        B1 = build_mu_matrix(EXAMPLE1, lam, 2, a)
        B2 = build_mu_matrix(EXAMPLE1, lam, 2, 7.5 * a)
        assert np.linalg.norm(B1 - B2) <= 1e-12 * np.linalg.norm(B1)


def test_mu_matrix_rejects_eigenvalue_targets(rng):
    p = planted_polynomial(rng, 2, 2, 0.5, 1)
    with pytest.raises(TargetIsEigenvalueError):
        build_mu_matrix(p, 0.5, 1)


def test_mu_matrix_lb_at_ones_is_below_table_value():
    B = build_mu_matrix(EXAMPLE1, 0.0, 1, np.ones(2))
    s = np.linalg.svd(B, compute_uv=False)
    assert 1.0 / s[1] <= 0.10797922 + 1e-6


def test_min_norm_rank_drop_identity():
    val, M = min_norm_rank_drop(np.eye(3), 1)
    assert val == pytest.approx(1.0)
    assert np.linalg.norm(M, 2) == pytest.approx(1.0)
    assert np.linalg.matrix_rank(np.eye(3) - M @ np.eye(3)) <= 2


def test_min_norm_rank_drop_diagonal():
    N = np.diag([3.0, 2.0, 1.0])
    val, M = min_norm_rank_drop(N, 2)
    assert val == pytest.approx(0.5)
    assert np.linalg.matrix_rank(np.eye(3) - M @ N, tol=1e-10) == 1
    assert np.linalg.norm(M, 2) == pytest.approx(0.5)


def test_min_norm_rank_drop_construction_and_infeasibility(rng):
    for _ in range(25):
        q, p = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        N = rng.standard_normal((q, p)) + 1j * rng.standard_normal((q, p))
        i = int(rng.integers(1, min(p, q) + 1))
        s = np.linalg.svd(N, compute_uv=False)
        val, M = min_norm_rank_drop(N, i)
        assert val == pytest.approx(1.0 / s[i - 1], rel=1e-12)
        assert np.linalg.norm(M, 2) == pytest.approx(val, rel=1e-12)
        resid = np.eye(p) - M @ N
        sv = np.linalg.svd(resid, compute_uv=False)
        assert np.count_nonzero(sv > 1e-10 * max(sv[0], 1)) <= p - i

    # randomized infeasibility probe: nothing strictly below the optimum works
    N = rng.standard_normal((3, 3))
    s = np.linalg.svd(N, compute_uv=False)
    val, _ = min_norm_rank_drop(N, 1)
    for _ in range(300):
        M = rng.standard_normal((3, 3))
        M *= (val - 1e-3) / np.linalg.norm(M, 2)
        assert np.linalg.matrix_rank(np.eye(3) - M @ N, tol=1e-8) == 3


def test_min_norm_rank_drop_rejects_zero_sigma():
    N = np.diag([1.0, 0.0])
    with pytest.raises(ValueError):
        min_norm_rank_drop(N, 2)


def test_structured_row_norms(rng):
    # Kronecker norm identities behind the sqrt(r+1) factor
    for _ in range(10):
        r = int(rng.integers(1, 5))
        D = rng.standard_normal((2, 6)) + 1j * rng.standard_normal((2, 6))
        big = np.kron(np.eye(r + 1), D)
        assert np.linalg.norm(big, 2) == pytest.approx(np.linalg.norm(D, 2), rel=1e-12)
        assert np.linalg.norm(big, "fro") == pytest.approx(
            np.sqrt(r + 1) * np.linalg.norm(D, "fro"), rel=1e-12)


def test_class_tags():
    tag = PerturbationClassTag("S1", r=3, n=2, k=4)
    assert tag.blocks == 5
    tag2 = PerturbationClassTag("S2", r=3, n=2, k=4)
    assert tag2.blocks == 4
    with pytest.raises(ValueError):
        PerturbationClassTag("S3", r=1, n=1, k=1)


def test_equivalence_chain_of_nullity_formulations(rng):
    """All three displayed matrices are equal, so their nullities agree."""
    for trial in range(15):
        n = int(rng.integers(1, 4))
        k = int(rng.integers(1, 4))
        r = int(rng.integers(1, 6))
        p = random_polynomial(rng, n, k)
        dp = random_polynomial(rng, n, k)
        lam = float(rng.standard_normal()) if trial % 3 else 0.7
        T = build_T(p, lam, r)
        if np.linalg.svd(T, compute_uv=False)[-1] < 1e-8:
            continue
        Tinv = np.linalg.inv(T)
        ident = np.eye((r + 1) * n)
        m1 = ident - build_T(dp, lam, r) @ Tinv
        row = eval_derivative_row(dp, lam, min(r, k)).stacked()
        E = build_E(r, k, n)
        m2 = ident - np.kron(np.eye(r + 1), row) @ E @ Tinv
        m3 = ident - np.kron(np.eye(r + 1), dp.coefficient_row()) \
            @ np.kron(np.eye(r + 1), build_M(lam, k, r, n)) @ E @ Tinv
        assert np.linalg.norm(m1 - m2) <= 1e-10 * np.linalg.norm(m1)
        assert np.linalg.norm(m1 - m3) <= 1e-10 * np.linalg.norm(m1)


def test_consistency_zero_perturbation():
    zero = MatrixPolynomial(np.zeros_like(EXAMPLE1.coeffs))
    rep = mu_consistency_check(EXAMPLE1, 0.7, 1, zero)
    assert rep.nullity_mu == 0
    assert not rep.mu_condition and not rep.rank_condition and rep.agree


def test_consistency_on_upper_bound_perturbations():
    for p, lam, r in [(EXAMPLE1, 1.0, 1), (EXAMPLE1, 0.0, 2), (EXAMPLE2, -1.0, 1)]:
        ub = upper_bound(p, lam, r, "F")
        rep = mu_consistency_check(p, lam, r, ub.perturbation)
        assert rep.mu_condition and rep.rank_condition and rep.agree
        if lam != 0:
            assert rep.norm_factor == pytest.approx(np.sqrt(r + 1), rel=1e-10)


def test_structured_block_row_shape():
    tag = PerturbationClassTag("S2", r=2, n=2, k=3)
    dp = MatrixPolynomial(np.arange(16, dtype=float).reshape(4, 2, 2))
    row = structured_block_row(dp, tag)
    assert row.shape == (3 * 2, 3 * 3 * 2)
    assert np.array_equal(row[:2, :6], np.hstack([dp.coeffs[0], dp.coeffs[1], dp.coeffs[2]]))
