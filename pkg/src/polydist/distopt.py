"""The distance computation itself: minimize the norm of the minimum-norm
coefficient perturbation over structured chain matrices.

The objective at a chain matrix X is ||G (MX)(MX)^+||_s with G the stacked
coefficient row; its value equals the norm of a perturbation that plants a
Jordan chain of length r+1 at lambda0, so every evaluation is an upper bound
on the distance and the infimum is the distance.  The Frobenius path runs
multistart BFGS with the analytic gradient of the squared objective; the
spectral path uses numeric-gradient BFGS.  gamma stays pinned at all ones
here: the gamma-scaled family reduces to it by column scaling.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _sp_minimize

from .bounds import (BoundResult, SearchConfig, _multistart, _upper_bound_at,
                     _V0_THRESHOLD, f_gamma, upper_bound)
from .certify import multiplicity_at_least, verify_perturbation
from .linalg import default_rank_tol, pseudoinverse
from .polynomials import (MatrixPolynomial, as_gamma, build_M, build_T,
                          chain_matrix, polynomial_from_row)

__all__ = [
    "ChainMatrix",
    "OptimizationResult",
    "MinimizeConfig",
    "RankCliffError",
    "objective",
    "extract_perturbation",
    "gradient_squared",
    "minimize",
    "seed_from_upper_bound",
    "rank1_restricted_distance",
    "gamma_free_r1_refinement",
    "pseudoinverse",
]

_RANK_CLIFF_RATIO = 1e3


class RankCliffError(RuntimeError):
    """The pseudoinverse derivative is unreliable at this point: the singular
    values of MX straddle the rank cutoff without a clear gap."""


@dataclass(frozen=True)
class ChainMatrix:
    """Candidate chain vectors x_0..x_r with their scaling parameters."""

    xs: np.ndarray               # (r+1, n) complex
    k: int
    gamma: np.ndarray = None

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=complex)
        if xs.ndim != 2:
            raise ValueError("xs must be (r+1, n)")
        if np.linalg.norm(xs[0]) == 0.0:
            raise ValueError("x_0 must be nonzero")
        gamma = np.ones(xs.shape[0] - 1) if self.gamma is None else as_gamma(self.gamma)
        if gamma.size != xs.shape[0] - 1:
            raise ValueError("gamma length must be r")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "gamma", gamma)

    @property
    def r(self) -> int:
        return self.xs.shape[0] - 1

    @property
    def n(self) -> int:
        return self.xs.shape[1]

    def materialize(self) -> np.ndarray:
        return chain_matrix(self.xs, self.gamma, self.k)


@dataclass(frozen=True)
class OptimizationResult:
    value: float
    X_star: ChainMatrix
    perturbation: MatrixPolynomial
    iterations: int
    restarts: int
    converged: bool
    grad_norm: float
    verified: bool
    preexisting_multiplicity: bool = False


@dataclass(frozen=True)
class MinimizeConfig:
    starts: int = 12
    max_iter: int = 500
    chunk: int = 100             # BFGS iterations between renormalizations
    seed: int = 0
    gtol: float = 1e-8           # on the gradient of f, relative to max(1, f)
    verify_tol: float = 1e-6


class _Workspace:
    """Precomputed pieces for one (P, lambda0, r) problem."""

    def __init__(self, p: MatrixPolynomial, lambda0: complex, r: int):
        self.p = p
        self.lambda0 = complex(lambda0)
        self.r = r
        self.n = p.n
        self.k = p.k
        self.G = p.coefficient_row()
        self.M = build_M(lambda0, p.k, r, p.n)
        self.rank_tol = None    # default numerical-rank cutoff inside pseudoinverse
        self.real_path = p.is_real and self.lambda0.imag == 0.0

    def solution_row(self, xs: np.ndarray) -> np.ndarray:
        """Min-norm perturbation row -G (MX)(MX)^+ for gamma = ones."""
        X = chain_matrix(xs, np.ones(self.r), self.k)
        Y = self.M @ X
        return -self.G @ Y @ pseudoinverse(Y, self.rank_tol)

    def value(self, xs: np.ndarray, s: str) -> float:
        row = self.solution_row(xs)
        return float(np.linalg.norm(row, "fro") if s == "F" else np.linalg.norm(row, 2))

    def squared_and_gradient(self, xs: np.ndarray):
        """g = f_F(X)^2 and its structured gradient w.r.t. x_0..x_r.

        The unstructured gradient is psi = 2 M^H F(G, Y) built from the
        pseudoinverse derivative; the chain structure of X then sums psi over
        the positions each x_j occupies.  Conjugate transposes make the same
        formulas cover complex data (gradient w.r.t. real and imaginary parts).
        """
        X = chain_matrix(xs, np.ones(self.r), self.k)
        Y = self.M @ X
        U, sv, Vh = np.linalg.svd(Y, full_matrices=False)
        cutoff = default_rank_tol(Y.shape) * (sv[0] if sv.size else 0.0)
        rank = int(np.count_nonzero(sv > cutoff))
        if rank < sv.size and rank > 0 and sv[rank - 1] < _RANK_CLIFF_RATIO * sv[rank]:
            raise RankCliffError(
                f"singular values {sv[rank - 1]:.3e} / {sv[rank]:.3e} straddle the rank cutoff")
        if rank == 0:
            return 0.0, np.zeros_like(xs)
        Yd = (Vh[:rank].conj().T / sv[:rank]) @ U[:, :rank].conj().T
        G = self.G
        GY = G @ Y
        g = float(np.linalg.norm(GY @ Yd, "fro") ** 2)
        GH_G_Y = G.conj().T @ GY
        W = Y.conj().T @ GH_G_Y
        I_c = np.eye(Y.shape[1])
        I_r = np.eye(Y.shape[0])
        YdH = Yd.conj().T
        term1 = GH_G_Y @ Yd @ YdH
        term2 = YdH @ Yd @ YdH @ W @ (I_c - Yd @ Y)
        term3 = (I_r - Y @ Yd) @ YdH @ W @ Yd @ YdH
        term4 = YdH @ W @ Yd @ YdH
        psi = 2.0 * self.M.conj().T @ (term1 + term2 + term3 - term4)
        p = min(self.r, self.k)
        grad = np.zeros((self.r + 1, self.n), dtype=complex)
        for j in range(self.r + 1):
            for i in range(min(p, self.r - j) + 1):
                grad[j] += psi[i * self.n:(i + 1) * self.n, i + j]
        return g, grad


def objective(p: MatrixPolynomial, lambda0: complex, r: int, X: ChainMatrix,
              s: str = "F") -> float:
    """||.||_s of the minimum-norm solution row at X; equals the norm of
    extract_perturbation(X) by construction."""
    if X.r != r:
        raise ValueError("chain matrix r does not match")
    ws = _Workspace(p, lambda0, r)
    # a gamma-scaled X is the all-ones X of the rescaled vectors times an
    # invertible column scaling, which the projector-based value ignores
    xs = _unscale_gamma(X.xs, X.gamma)
    return ws.value(xs, s)


def extract_perturbation(p: MatrixPolynomial, lambda0: complex, r: int,
                         X: ChainMatrix) -> MatrixPolynomial:
    """Coefficients of the minimum-norm perturbation planting the chain of X."""
    if X.r != r:
        raise ValueError("chain matrix r does not match")
    ws = _Workspace(p, lambda0, r)
    return polynomial_from_row(ws.solution_row(_unscale_gamma(X.xs, X.gamma)), p.n)


def gradient_squared(p: MatrixPolynomial, lambda0: complex, r: int,
                     xs: np.ndarray) -> np.ndarray:
    """Gradient of the squared Frobenius objective w.r.t. the chain vectors.

    Raises RankCliffError where the pseudoinverse derivative is unreliable.
    """
    _, grad = _Workspace(p, lambda0, r).squared_and_gradient(np.asarray(xs, dtype=complex))
    return grad


def _unscale_gamma(xs: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Map a gamma-family member to the equivalent all-ones family member."""
    beta = np.concatenate([[1.0], np.cumprod(gamma)])
    return np.asarray(xs, dtype=complex) / beta[:, None]


def seed_from_upper_bound(bound: BoundResult, n: int) -> np.ndarray | None:
    """Chain vectors reproducing the upper bound's objective value at gamma = 1."""
    if bound.singular_pair is None or bound.parameters is None:
        return None
    _, _, v = bound.singular_pair
    return _unscale_gamma(v.reshape(-1, n), np.asarray(bound.parameters, dtype=float))


def _pack(xs: np.ndarray, real_path: bool) -> np.ndarray:
    if real_path:
        return xs.real.ravel()
    return np.concatenate([xs.real.ravel(), xs.imag.ravel()])


def _unpack(z: np.ndarray, shape, real_path: bool) -> np.ndarray:
    if real_path:
        return z.reshape(shape).astype(complex)
    half = z.size // 2
    return (z[:half] + 1j * z[half:]).reshape(shape)


def _default_seeds(ws: _Workspace, rng, n_random: int, extra_starts):
    """Smallest right singular vectors of T, caller-provided seeds, Gaussians."""
    seeds = []
    for xs in extra_starts:
        seeds.append(np.asarray(xs, dtype=complex))
    _, _, Vh = np.linalg.svd(build_T(ws.p, ws.lambda0, ws.r))
    for i in range(ws.r + 1):
        seeds.append(Vh[-(i + 1)].conj().reshape(ws.r + 1, ws.n))
    shape = (ws.r + 1, ws.n)
    for _ in range(n_random):
        xs = rng.standard_normal(shape)
        if not ws.real_path:
            xs = xs + 1j * rng.standard_normal(shape)
        seeds.append(xs.astype(complex))
    return seeds


def _run_bfgs(ws: _Workspace, s: str, z0: np.ndarray, cfg: MinimizeConfig):
    """Chunked BFGS from one start; renormalizes between chunks.

    Returns (z, f, grad_f_norm, iterations, converged) or None when the run
    kept hitting rank cliffs / x_0 degeneracy.
    """
    shape = (ws.r + 1, ws.n)

    if s == "F":
        def fun(z):
            xs = _unpack(z, shape, ws.real_path)
            try:
                g, _ = ws.squared_and_gradient(xs)
            except RankCliffError:
                return 1e12
            return g

        def jac(z):
            xs = _unpack(z, shape, ws.real_path)
            try:
                _, grad = ws.squared_and_gradient(xs)
            except RankCliffError:
                return np.zeros_like(z)
            return _pack(grad, True) if ws.real_path else np.concatenate(
                [grad.real.ravel(), grad.imag.ravel()])
    else:
        def fun(z):
            return ws.value(_unpack(z, shape, ws.real_path), "2")
        jac = None

    z = z0 / np.linalg.norm(z0)
    iters = 0
    while iters < cfg.max_iter:
        res = _sp_minimize(fun, z, jac=jac, method="BFGS",
                           options=dict(maxiter=cfg.chunk, gtol=1e-12))
        iters += max(res.nit, 1)
        z = res.x
        nz = np.linalg.norm(z)
        if nz == 0.0 or not np.all(np.isfinite(z)):
            return None
        z = z / nz
        xs = _unpack(z, shape, ws.real_path)
        if np.linalg.norm(xs[0]) < 1e-10:
            return None   # x_0 collapsed; caller restarts from a fresh seed
        fval = fun(z)
        f = math.sqrt(max(fval, 0.0)) if s == "F" else fval
        gn = float(np.linalg.norm(res.jac)) if res.jac is not None else np.nan
        if s == "F" and f > 0:
            gn = gn / (2.0 * f)   # convert d(f^2) scale to df scale
        converged = (np.isfinite(gn) and gn <= cfg.gtol * max(1.0, f)) or res.nit < cfg.chunk
        if converged:
            return z, f, gn, iters, True
    return z, f, gn, iters, False


def minimize(p: MatrixPolynomial, lambda0: complex, r: int, s: str = "F",
             cfg: MinimizeConfig = MinimizeConfig(), extra_starts=()) -> OptimizationResult:
    """Multistart descent for the structured eigenvalue distance.

    If lambda0 already carries multiplicity r+1 the distance is zero and no
    optimizer runs.  Runs whose extracted perturbation verifies are preferred;
    the best unverified run is returned (flagged) only if nothing verifies.
    For the spectral norm a Frobenius pre-solve supplies one extra seed.
    """
    if not 1 <= r < p.k * p.n:
        raise ValueError("need 1 <= r < kn")
    if s not in ("2", "F"):
        raise ValueError("norm tag must be '2' or 'F'")
    ws = _Workspace(p, lambda0, r)

    has_mult, _ = multiplicity_at_least(p, lambda0, r + 1, tol=1e3 * np.finfo(float).eps)
    if has_mult:
        zero = MatrixPolynomial(np.zeros_like(p.coeffs))
        xs = _chain_from_null_space(ws)
        return OptimizationResult(value=0.0, X_star=ChainMatrix(xs=xs, k=p.k),
                                  perturbation=zero, iterations=0, restarts=0,
                                  converged=True, grad_norm=0.0, verified=True,
                                  preexisting_multiplicity=True)

    rng = np.random.default_rng(cfg.seed)
    extra = list(extra_starts)
    if s == "2":
        fres = minimize(p, lambda0, r, "F",
                        MinimizeConfig(starts=max(cfg.starts // 2, 4), seed=cfg.seed))
        extra.append(fres.X_star.xs)
    seeds = _default_seeds(ws, rng, cfg.starts, extra)

    best = None          # (value, z, grad_norm, iterations, converged, verified)
    restarts = 0
    total_iters = 0
    shape = (ws.r + 1, ws.n)
    for seed_xs in seeds:
        z0 = _pack(np.asarray(seed_xs, dtype=complex), ws.real_path)
        if np.linalg.norm(z0) == 0.0:
            continue
        out = _run_bfgs(ws, s, z0, cfg)
        if out is None:
            restarts += 1
            jitter = rng.standard_normal(z0.shape) * 0.1 * np.linalg.norm(z0)
            out = _run_bfgs(ws, s, z0 + jitter, cfg)
            if out is None:
                continue
        z, f, gn, iters, conv = out
        total_iters += iters
        xs = _unpack(z, shape, ws.real_path)
        dp = polynomial_from_row(ws.solution_row(xs), p.n)
        ok = verify_perturbation(p, dp, lambda0, r + 1, cfg.verify_tol).passed
        cand = (f, z, gn, iters, conv, ok)
        if best is None:
            best = cand
        else:
            # verified runs outrank unverified ones, then smaller value wins
            if (ok, -f) > (best[5], -best[0]):
                best = cand
    if best is None:
        raise RuntimeError("every start collapsed; polynomial may be degenerate at lambda0")
    f, z, gn, iters, conv, ok = best
    xs = _unpack(z, shape, ws.real_path)
    dp = polynomial_from_row(ws.solution_row(xs), p.n)
    return OptimizationResult(value=f, X_star=ChainMatrix(xs=xs, k=p.k),
                              perturbation=dp, iterations=total_iters,
                              restarts=restarts, converged=conv, grad_norm=gn,
                              verified=ok)


def _chain_from_null_space(ws: _Workspace) -> np.ndarray:
    """A null vector of T with nonzero top block, reshaped to chain vectors."""
    T = build_T(ws.p, ws.lambda0, ws.r)
    _, _, Vh = np.linalg.svd(T)
    null_basis = Vh[ws.n * (ws.r + 1) - (ws.r + 1):].conj()
    best = null_basis[-1]
    for vec in null_basis[::-1]:
        if np.linalg.norm(vec[:ws.n]) > 1e-8:
            best = vec
            break
    return best.reshape(ws.r + 1, ws.n)


def rank1_restricted_distance(p: MatrixPolynomial) -> tuple[float, str]:
    """Closed-form distance to a defective zero eigenvalue under rank-1
    coefficient perturbations, for rank A_0 = n - 1.

    Builds the two bordered triangular matrices from the SVD of A_0 and the
    transformed A_1 and returns the smaller of their least singular values,
    together with which of the two attained it.
    """
    n = p.n
    if n < 2:
        raise ValueError("need n >= 2")
    A0, A1 = p.coeffs[0], p.coeffs[1]
    U, sig, Vh = np.linalg.svd(A0)
    if not (sig[n - 2] > 0 and sig[n - 1] <= default_rank_tol(A0.shape) * sig[0]):
        raise ValueError("rank A_0 must be exactly n - 1")
    a = U.conj().T @ A1 @ Vh.conj().T
    X = np.zeros((n, n), dtype=complex)
    X[:n - 1, :n - 1] = np.diag(sig[:n - 1])
    X[n - 1, :] = a[n - 1, :]
    Y = np.zeros((n, n), dtype=complex)
    Y[:n - 1, :n - 1] = np.diag(sig[:n - 1])
    Y[:, n - 1] = a[:, n - 1]
    Y[n - 1, :n - 1] = 0.0
    sx = float(np.linalg.svd(X, compute_uv=False)[-1])
    sy = float(np.linalg.svd(Y, compute_uv=False)[-1])
    return (sx, "X") if sx <= sy else (sy, "Y")


def gamma_free_r1_refinement(p: MatrixPolynomial, s: str = "F",
                             cfg: SearchConfig = SearchConfig()) -> BoundResult:
    """Upper bound for r = 1 at lambda0 = 0 with the v_0 = 0 wall removed.

    Where the target singular vector has v_0 = 0, the bound value is the
    singular value itself, attained by dA_0 = -f u_1 v_1^* alone; elsewhere the
    standard construction applies.  The best verified candidate over the
    gamma > 0 line is returned, never worse than the standard upper bound.
    """
    r, n = 1, p.n
    best = {"v": np.inf, "dp": None, "gamma": None}

    def objective(t):
        gamma = np.exp(np.atleast_1d(t))
        f, u, v = f_gamma(p, 0.0, gamma)
        if np.linalg.norm(v[:n]) <= _V0_THRESHOLD:
            # v_0 = 0 forces u_0 = 0 and the bound collapses to f itself
            dp_row = np.zeros((n, (p.k + 1) * n), dtype=complex)
            dp_row[:, :n] = -f * np.outer(u[n:], v[n:].conj())
            val = f
        else:
            out = _upper_bound_at(p, 0.0, r, gamma, s)
            if out is None:
                return np.inf
            val, dp_row, _ = out
        if val < best["v"]:
            dp = polynomial_from_row(dp_row, n)
            if verify_perturbation(p, dp, 0.0, 2, 1e-8).passed:
                best["v"], best["dp"], best["gamma"] = val, dp, gamma
        return val

    _, evals = _multistart(objective, 1, cfg)

    std = upper_bound(p, 0.0, 1, s, cfg)
    if std.value < best["v"]:
        return std
    return BoundResult(value=best["v"], parameters=best["gamma"], evaluations=evals,
                       perturbation=best["dp"], verified=best["dp"] is not None)
