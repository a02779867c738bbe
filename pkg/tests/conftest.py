"""Shared test utilities: random and planted polynomial factories."""

import numpy as np
import pytest

from polydist import MatrixPolynomial


def random_polynomial(rng, n, k, complex_entries=False) -> MatrixPolynomial:
    coeffs = rng.standard_normal((k + 1, n, n))
    if complex_entries:
        coeffs = coeffs + 1j * rng.standard_normal((k + 1, n, n))
    return MatrixPolynomial(coeffs)


def _monic_from_roots(roots) -> np.ndarray:
    poly = np.array([1.0 + 0j])
    for root in roots:
        poly = np.convolve(poly, np.array([-root, 1.0 + 0j]))
    return poly


def planted_polynomial(rng, n, k, lambda0, m, real=True):
    """P = A diag(d_1..d_n) B with lambda0 of algebraic multiplicity exactly m.

    Each diagonal entry has degree exactly k; entry i carries a factor
    (lambda - lambda0)^{m_i} with sum m_i = m, m_i <= k, and cofactors whose
    roots stay at distance >= 1 from lambda0.
    """
    if m > k * n:
        raise ValueError("m cannot exceed kn")
    parts = []
    left = m
    for _ in range(n):
        take = min(k, left)
        parts.append(take)
        left -= take
    assert left == 0

    def far_roots(count):
        if count == 0:
            return []
        if real:
            return [lambda0 + sign * (1.0 + rng.uniform(0, 2))
                    for sign in rng.choice([-1.0, 1.0], size=count)]
        angles = rng.uniform(0, 2 * np.pi, size=count)
        radii = 1.0 + rng.uniform(0, 2, size=count)
        return list(lambda0 + radii * np.exp(1j * angles))

    diag_polys = []
    for mi in parts:
        roots = [lambda0] * mi + far_roots(k - mi)
        diag_polys.append(_monic_from_roots(roots))

    A = rng.standard_normal((n, n)) + np.eye(n) * n
    B = rng.standard_normal((n, n)) + np.eye(n) * n
    if not real:
        A = A + 1j * rng.standard_normal((n, n))
        B = B + 1j * rng.standard_normal((n, n))
    coeffs = np.zeros((k + 1, n, n), dtype=complex)
    for d in range(k + 1):
        Dd = np.diag([poly[d] for poly in diag_polys])
        coeffs[d] = A @ Dd @ B
    if real:
        coeffs = coeffs.real.astype(complex)
    # scaling preserves the eigenstructure; unit norm keeps radius heuristics sane
    coeffs /= np.linalg.norm(coeffs)
    return MatrixPolynomial(coeffs)


def rank_deficient_leading_polynomial(rng, n, k):
    """Random real polynomial with rank A_0 = n - 1 (zero is an eigenvalue)."""
    U, _ = np.linalg.qr(rng.standard_normal((n, n)))
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    sig = np.sort(rng.uniform(0.5, 2.0, size=n - 1))[::-1]
    A0 = U @ np.diag(np.concatenate([sig, [0.0]])) @ V.T
    coeffs = rng.standard_normal((k + 1, n, n))
    coeffs[0] = A0
    return MatrixPolynomial(coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
