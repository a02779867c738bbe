"""Numerical certificates: multiplicity via rank of the block Toeplitz matrix,
an independent companion-linearization eigenvalue oracle, Jordan-chain
residuals, and a regularity probe for singular polynomials."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .polynomials import MatrixPolynomial, build_T, eval_derivative_row, perturbed, poly_norm

__all__ = [
    "RankCertificate",
    "JordanChainCertificate",
    "VerificationReport",
    "multiplicity_at_least",
    "companion_pencil",
    "companion_eigenvalues",
    "count_eigenvalues_near",
    "chain_residuals",
    "is_numerically_singular",
    "default_cluster_radius",
    "verify_perturbation",
]


@dataclass(frozen=True)
class RankCertificate:
    """Outcome of a numerical rank test on T(P, lambda0)."""

    sigma_target: float          # sigma_{(r+1)n - r}, the first of the r+1 values that must vanish
    sigma_max: float
    rank_estimate: int
    threshold: float             # absolute cutoff used
    ill_conditioned: bool        # some sigma within a decade of the cutoff


@dataclass(frozen=True)
class JordanChainCertificate:
    lambda0: complex
    chain: tuple                 # x_0 .. x_m as 1-d arrays, x_0 the eigenvector
    residuals: tuple             # one 2-norm residual per chain equation


@dataclass(frozen=True)
class VerificationReport:
    """Two-sided check that P + dP has an eigenvalue of multiplicity >= r+1 at lambda0."""

    sigma_relative: float        # sigma_{(r+1)n-r}(T(P+dP)) / sigma_max
    cluster_count: int           # companion eigenvalues of P+dP within rho of lambda0
    rho: float
    tol: float
    regular: bool                # perturbed polynomial passed the regularity probe
    passed: bool


def multiplicity_at_least(p: MatrixPolynomial, lambda0: complex, r_plus_1: int,
                          tol: float = 1e-8) -> tuple[bool, RankCertificate]:
    """Test whether lambda0 has algebraic multiplicity >= r_plus_1.

    True iff T(P, lambda0) with r = r_plus_1 - 1 has numerical nullity
    >= r_plus_1, i.e. its last r+1 singular values fall below tol*sigma_max.
    The certificate flags an ill-conditioned verdict when some singular value
    lies within a decade of the cutoff.
    """
    if r_plus_1 < 1:
        raise ValueError("r_plus_1 must be >= 1")
    if r_plus_1 > p.k * p.n:
        raise ValueError("r_plus_1 exceeds kn, no regular polynomial qualifies")
    r = r_plus_1 - 1
    if r == 0:
        # multiplicity >= 1 is just singularity of P(lambda0)
        s = np.linalg.svd(p(lambda0), compute_uv=False)
    else:
        s = np.linalg.svd(build_T(p, lambda0, r), compute_uv=False)
    # floor the cutoff at the scale of the input data, so that a T that is
    # zero up to assembly roundoff reads as rank zero rather than full rank
    scale = max(s[0], poly_norm(p, "F") * max(1.0, abs(lambda0)) ** p.k)
    cutoff = tol * scale if scale > 0 else 0.0
    rank = int(np.count_nonzero(s > cutoff))
    target_index = s.size - (r + 1)
    ill = bool(np.any((s > cutoff / 10) & (s < cutoff * 10))) if cutoff > 0 else False
    cert = RankCertificate(
        sigma_target=float(s[target_index]),
        sigma_max=float(s[0]),
        rank_estimate=rank,
        threshold=float(cutoff),
        ill_conditioned=ill,
    )
    return s.size - rank >= r + 1, cert


def companion_pencil(p: MatrixPolynomial) -> tuple[np.ndarray, np.ndarray]:
    """The kn x kn first companion pencil lambda*CE + CA of P."""
    n, k = p.n, p.k
    CE = sla.block_diag(p.coeffs[k], *([np.eye(n)] * (k - 1)))
    CA = np.zeros((k * n, k * n), dtype=complex)
    CA[:n] = np.hstack([p.coeffs[k - 1 - i] for i in range(k)])
    for b in range(k - 1):
        CA[(b + 1) * n:(b + 2) * n, b * n:(b + 1) * n] = -np.eye(n)
    return CE, CA


def companion_eigenvalues(p: MatrixPolynomial) -> np.ndarray:
    """All kn eigenvalues of P via its companion pencil; infinite ones are inf.

    Raises ValueError when the polynomial is numerically singular (the pencil
    has no meaningful spectrum then).
    """
    if is_numerically_singular(p):
        raise ValueError("polynomial is numerically singular; spectrum undefined")
    CE, CA = companion_pencil(p)
    w = sla.eig(CA, -CE, right=False, homogeneous_eigvals=True)
    alpha, beta = w
    scale = max(np.linalg.norm(CE, 2), np.linalg.norm(CA, 2))
    eigs = np.empty(alpha.size, dtype=complex)
    for i, (a, b) in enumerate(zip(alpha, beta)):
        if abs(b) <= np.finfo(float).eps * max(abs(a), scale):
            eigs[i] = complex(np.inf, 0.0)
        else:
            eigs[i] = a / b
    return eigs


def count_eigenvalues_near(eigs: np.ndarray, lambda0: complex, rho: float) -> int:
    """How many finite eigenvalues lie within distance rho of lambda0."""
    finite = eigs[np.isfinite(eigs)]
    return int(np.count_nonzero(np.abs(finite - lambda0) <= rho))


def chain_residuals(p: MatrixPolynomial, lambda0: complex, chain) -> JordanChainCertificate:
    """Residuals of the Jordan-chain equations for candidate vectors x_0..x_m.

    Equation q reads sum_{i=0}^{q} P^(i)(lambda0)/i! x_{q-i} = 0.
    """
    chain = [np.asarray(x, dtype=complex).ravel() for x in chain]
    if not chain:
        raise ValueError("chain must be nonempty")
    if np.linalg.norm(chain[0]) == 0.0:
        raise ValueError("x_0 must be nonzero")
    m = len(chain) - 1
    row = eval_derivative_row(p, lambda0, max(m, 1))
    res = []
    for q in range(m + 1):
        acc = np.zeros(p.n, dtype=complex)
        for i in range(q + 1):
            acc += row.blocks[i] @ chain[q - i]
        res.append(float(np.linalg.norm(acc)))
    return JordanChainCertificate(lambda0=complex(lambda0), chain=tuple(chain), residuals=tuple(res))


def is_numerically_singular(p: MatrixPolynomial, tol: float = 1e-12, seed: int = 0) -> bool:
    """Probe det P(lambda) at 2kn+1 random points; all negligible => singular.

    det P is a polynomial of degree <= kn, so vanishing at 2kn+1 points means
    it vanishes identically up to roundoff.  Each |det| is compared against
    sigma_max(P(lambda))^n, which bounds it from above.
    """
    rng = np.random.default_rng(seed)
    npts = 2 * p.k * p.n + 1
    pts = rng.standard_normal(npts) + 1j * rng.standard_normal(npts)
    for lam in pts:
        val = p(lam)
        smax = np.linalg.norm(val, 2)
        if smax == 0.0:
            continue
        if abs(np.linalg.det(val)) > tol * smax ** p.n:
            return False
    return True


def default_cluster_radius(p: MatrixPolynomial, r_plus_1: int, tol: float) -> float:
    """Radius within which a multiplicity-(r+1) eigenvalue may split.

    A perturbation of relative size tol splits such an eigenvalue by
    O(tol^(1/(r+1))); the norm of P sets the scale.
    """
    return float(tol ** (1.0 / r_plus_1) * max(poly_norm(p, "F"), 1.0))


def verify_perturbation(p: MatrixPolynomial, dp: MatrixPolynomial, lambda0: complex,
                        r_plus_1: int, tol: float = 1e-8,
                        rho: float | None = None) -> VerificationReport:
    """Check that P + dP has lambda0 as an eigenvalue of multiplicity >= r+1.

    Passes iff (a) sigma_{(r+1)n-r}(T(P+dP, lambda0)) <= tol * sigma_max and
    (b) at least r+1 companion eigenvalues of P + dP lie within rho of lambda0.
    A numerically singular P + dP yields a report with no verdict (regular
    False, passed False) since its spectrum is undefined.
    """
    if rho is None:
        rho = default_cluster_radius(p, r_plus_1, tol)
    q = perturbed(p, dp)
    if is_numerically_singular(q):
        return VerificationReport(sigma_relative=np.nan, cluster_count=0, rho=rho,
                                  tol=tol, regular=False, passed=False)
    if r_plus_1 == 1:
        s = np.linalg.svd(q(lambda0), compute_uv=False)
        sigma_rel = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    else:
        r = r_plus_1 - 1
        s = np.linalg.svd(build_T(q, lambda0, r), compute_uv=False)
        sigma_rel = float(s[s.size - r - 1] / s[0]) if s[0] > 0 else 0.0
    cluster = count_eigenvalues_near(companion_eigenvalues(q), lambda0, rho)
    passed = sigma_rel <= tol and cluster >= r_plus_1
    return VerificationReport(sigma_relative=sigma_rel, cluster_count=cluster, rho=rho,
                              tol=tol, regular=True, passed=passed)
