"""Generalized structured-singular-value layer.

The distance to a nearest polynomial with the prescribed eigenvalue structure
equals the reciprocal of a generalized mu-value of a matrix assembled from the
selector factorization and the inverse block Toeplitz matrix (with a 1/sqrt(r+1)
factor in the Frobenius case).  Computing that mu-value is NP-hard, so this
module only materializes the matrices, provides the rank-drop minimal-norm
construction, and checks the equivalences on supplied perturbations.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import default_rank_tol, nullity
from .polynomials import (MatrixPolynomial, build_E, build_M, build_T,
                          perturbed, poly_norm)

__all__ = [
    "TargetIsEigenvalueError",
    "PerturbationClassTag",
    "structured_block_row",
    "build_mu_matrix",
    "min_norm_rank_drop",
    "MuConsistencyReport",
    "mu_consistency_check",
]


class TargetIsEigenvalueError(ValueError):
    """lambda0 is (numerically) an eigenvalue, so T(P, lambda0) is singular."""


@dataclass(frozen=True)
class PerturbationClassTag:
    """Which structured perturbation class a block perturbation belongs to.

    'S1' uses all k+1 coefficient blocks, 'S2' only the first min(r,k)+1;
    both are closed under scaling t*Delta for 0 <= t <= 1.
    """

    tag: str
    r: int
    n: int
    k: int

    def __post_init__(self):
        if self.tag not in ("S1", "S2"):
            raise ValueError("tag must be 'S1' or 'S2'")

    @property
    def blocks(self) -> int:
        return self.k + 1 if self.tag == "S1" else min(self.r, self.k) + 1


def structured_block_row(dp: MatrixPolynomial, cls: PerturbationClassTag) -> np.ndarray:
    """I_{r+1} (x) [dA_0 ... dA_m] with m+1 blocks given by the class tag."""
    row = np.hstack([dp.coeffs[i] for i in range(cls.blocks)])
    return np.kron(np.eye(cls.r + 1), row)


def _t_inverse_factor(p: MatrixPolynomial, lambda0: complex, r: int) -> np.ndarray:
    """E T(P, lambda0)^{-1}, rejecting a numerically singular T."""
    T = build_T(p, lambda0, r)
    s = np.linalg.svd(T, compute_uv=False)
    if s[-1] <= default_rank_tol(T.shape) * s[0]:
        raise TargetIsEigenvalueError(
            f"lambda0 = {lambda0} is numerically an eigenvalue; T(P, lambda0) is singular")
    E = build_E(r, p.k, p.n)
    return np.linalg.solve(T.T, E.T).T


def build_mu_matrix(p: MatrixPolynomial, lambda0: complex, r: int,
                    a=None) -> np.ndarray:
    """Matrix whose generalized mu-value reciprocal encodes the distance.

    Unscaled (a absent): (I_{r+1} (x) M) E T^{-1} for lambda0 != 0, and
    E T^{-1} at lambda0 = 0 (the M factor drops with the smaller perturbation
    class there).  With a diagonal positive scaling a, the matrix is
    conjugated by the W blocks, which leaves the encoded bound family intact.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    core = _t_inverse_factor(p, lambda0, r)
    n = p.n
    if lambda0 != 0:
        core = np.kron(np.eye(r + 1), build_M(lambda0, p.k, r, n)) @ core
        wdim = (p.k + 1) * n
    else:
        wdim = (min(r, p.k) + 1) * n
    if a is None:
        return core
    a = np.asarray(a, dtype=float)
    if a.shape != (r + 1,) or not np.all(a > 0):
        raise ValueError("a must be a length r+1 vector of positive entries")
    left = np.repeat(a, wdim)
    right = np.repeat(1.0 / a, n)
    return (core * right[None, :]) * left[:, None]


def min_norm_rank_drop(n_mat: np.ndarray, i: int) -> tuple[float, np.ndarray]:
    """Smallest ||M||_2 with rank(I - M N) <= p - i, and an attaining M.

    The infimum is 1/sigma_i(N); the minimizer sums the first i scaled outer
    products v_j u_j^* of the SVD of N, so that M N fixes the leading
    i-dimensional right singular space.
    """
    n_mat = np.asarray(n_mat, dtype=complex)
    q, p = n_mat.shape
    if not 1 <= i <= min(p, q):
        raise ValueError(f"need 1 <= i <= min(p, q) = {min(p, q)}")
    U, s, Vh = np.linalg.svd(n_mat)
    if s[i - 1] <= default_rank_tol(n_mat.shape) * s[0]:
        raise ValueError(f"sigma_{i}(N) is numerically zero; the infimum 0 is not attained")
    M = np.zeros((p, q), dtype=complex)
    for j in range(i):
        M += np.outer(Vh[j].conj(), U[:, j].conj()) / s[j]
    return float(1.0 / s[i - 1]), M


@dataclass(frozen=True)
class MuConsistencyReport:
    """Agreement check between the mu-side nullity condition and the rank test."""

    nullity_mu: int
    mu_condition: bool           # nullity >= r+1 for the structured identity matrix
    rank_T_perturbed: int
    rank_condition: bool         # rank T(P+dP) <= (r+1)(n-1)
    agree: bool
    delta_norm: float            # ||dP||_s
    structured_norm: float       # ||I_{r+1} (x) [dA ...]||_s
    norm_factor: float           # structured_norm / delta_norm (sqrt(r+1) for s=F)


def mu_consistency_check(p: MatrixPolynomial, lambda0: complex, r: int,
                         dp: MatrixPolynomial, s: str = "F",
                         tol: float = 1e-8) -> MuConsistencyReport:
    """Report whether -dP's membership conditions agree on both formulations.

    Builds I - (I (x) [-dA row])(I (x) M) E T^{-1} (the lambda0 = 0 branch
    drops the M factor and truncates the row), counts its nullity, and
    compares with the rank of T(P+dP, lambda0).
    """
    n = p.n
    cls = PerturbationClassTag("S1" if lambda0 != 0 else "S2", r=r, n=n, k=p.k)
    delta = structured_block_row(MatrixPolynomial(-dp.coeffs), cls)
    core = _t_inverse_factor(p, lambda0, r)
    if lambda0 != 0:
        core = np.kron(np.eye(r + 1), build_M(lambda0, p.k, r, n)) @ core
    ident = np.eye((r + 1) * n)
    mu_mat = ident - delta @ core
    nul = nullity(mu_mat, tol)
    mu_cond = nul >= r + 1

    Tp = build_T(perturbed(p, dp), lambda0, r)
    sv = np.linalg.svd(Tp, compute_uv=False)
    rank_tp = int(np.count_nonzero(sv > tol * sv[0])) if sv[0] > 0 else 0
    rank_cond = rank_tp <= (r + 1) * (n - 1)

    dnorm = poly_norm(dp, s)
    srow = structured_block_row(dp, PerturbationClassTag("S1", r=r, n=n, k=p.k))
    snorm = float(np.linalg.norm(srow, "fro") if s == "F" else np.linalg.norm(srow, 2))
    return MuConsistencyReport(
        nullity_mu=nul,
        mu_condition=mu_cond,
        rank_T_perturbed=rank_tp,
        rank_condition=rank_cond,
        agree=mu_cond == rank_cond,
        delta_norm=dnorm,
        structured_norm=snorm,
        norm_factor=snorm / dnorm if dnorm > 0 else np.nan,
    )
