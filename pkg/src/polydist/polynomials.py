"""Matrix polynomials and the structured matrices built from their Taylor blocks.

A matrix polynomial of degree k is P(lambda) = sum_i lambda^i A_i with square
complex coefficient matrices A_0..A_k.  Everything downstream (rank tests,
bounds, the distance optimization) is expressed through a few structured
matrices assembled here:

* the derivative row  [P(l0), P'(l0), ..., P^(p)(l0)/p!]  with p = min(r, k),
* the binomial matrix H and its Kronecker lift M = H (x) I_n,
* the block lower triangular Toeplitz-like matrix T_gamma,
* the selector matrix E that factors T through the derivative row.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MatrixPolynomial",
    "DerivativeRow",
    "StructuredMatrixSet",
    "as_gamma",
    "poly_norm",
    "eval_derivative_row",
    "build_H",
    "build_M",
    "build_T",
    "build_T_gamma",
    "gamma_selectors",
    "build_E",
    "perturbed",
    "polynomial_from_row",
]


@dataclass(frozen=True)
class MatrixPolynomial:
    """Degree-k matrix polynomial stored as a (k+1, n, n) complex array."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"coeffs must be (k+1, n, n), got {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError("degree must be at least 1 (need k+1 >= 2 coefficients)")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficient entries must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def from_matrices(cls, matrices) -> "MatrixPolynomial":
        """Build from an iterable [A_0, A_1, ..., A_k]."""
        return cls(np.array([np.asarray(a, dtype=complex) for a in matrices]))

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    @property
    def k(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.coeffs.imag == 0.0))

    def coefficient_row(self) -> np.ndarray:
        """The n x (k+1)n row [A_0  A_1  ...  A_k]."""
        return np.hstack(list(self.coeffs))

    def __call__(self, lam: complex) -> np.ndarray:
        """Evaluate P(lam) by Horner's scheme."""
        acc = np.array(self.coeffs[self.k])
        for i in range(self.k - 1, -1, -1):
            acc = acc * lam + self.coeffs[i]
        return acc

    def taylor_block(self, lam: complex, d: int) -> np.ndarray:
        """P^(d)(lam)/d!, computed by Horner on binomially weighted coefficients."""
        if d > self.k:
            return np.zeros((self.n, self.n), dtype=complex)
        acc = math.comb(self.k, d) * np.array(self.coeffs[self.k])
        for m in range(self.k - 1, d - 1, -1):
            acc = acc * lam + math.comb(m, d) * self.coeffs[m]
        return acc


def perturbed(p: MatrixPolynomial, dp: MatrixPolynomial) -> MatrixPolynomial:
    """P + dP coefficient-wise; shapes must agree."""
    if p.coeffs.shape != dp.coeffs.shape:
        raise ValueError("perturbation shape mismatch")
    return MatrixPolynomial(p.coeffs + dp.coeffs)


def polynomial_from_row(row: np.ndarray, n: int) -> MatrixPolynomial:
    """Inverse of coefficient_row: split an n x (k+1)n row into coefficients."""
    row = np.asarray(row, dtype=complex)
    if row.ndim != 2 or row.shape[0] != n or row.shape[1] % n:
        raise ValueError(f"row must be n x (k+1)n with n={n}, got {row.shape}")
    kp1 = row.shape[1] // n
    return MatrixPolynomial(np.array([row[:, i * n:(i + 1) * n] for i in range(kp1)]))


def as_gamma(entries) -> np.ndarray:
    """Validate a vector of strictly positive scaling parameters."""
    g = np.asarray(entries, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("gamma must be a nonempty 1-d vector")
    if not np.all(g > 0.0) or not np.all(np.isfinite(g)):
        raise ValueError("gamma entries must be finite and strictly positive")
    return g


def poly_norm(p: MatrixPolynomial, s: str = "F") -> float:
    """Norm of the stacked coefficient row: Frobenius ('F') or spectral ('2')."""
    row = p.coefficient_row()
    if s == "F":
        return float(np.linalg.norm(row, "fro"))
    if s == "2":
        return float(np.linalg.norm(row, 2))
    raise ValueError(f"unknown norm tag {s!r}; expected '2' or 'F'")


@dataclass(frozen=True)
class DerivativeRow:
    """Taylor blocks [P(l0), P'(l0), ..., P^(p)(l0)/p!] at a point l0."""

    blocks: tuple
    lambda0: complex

    def stacked(self) -> np.ndarray:
        """The n x (p+1)n row of blocks."""
        return np.hstack(self.blocks)


def eval_derivative_row(p: MatrixPolynomial, lambda0: complex, order: int) -> DerivativeRow:
    """Derivative row up to `order`; blocks beyond the degree are zero."""
    if order < 1:
        raise ValueError("order must be >= 1")
    blocks = tuple(p.taylor_block(lambda0, d) for d in range(order + 1))
    return DerivativeRow(blocks=blocks, lambda0=complex(lambda0))


def build_H(lambda0: complex, k: int, r: int) -> np.ndarray:
    """(k+1) x (p+1) matrix of scaled monomial derivatives, p = min(r, k).

    Entry (a, b) zero-based is C(a, b) * lambda0^(a-b) for a >= b, else 0; this
    is the closed form of d^b(lambda^a)/b! at lambda0.
    """
    if k < 1 or r < 1:
        raise ValueError("k and r must be >= 1")
    p = min(r, k)
    H = np.zeros((k + 1, p + 1), dtype=complex)
    for a in range(k + 1):
        for b in range(min(a, p) + 1):
            H[a, b] = math.comb(a, b) * (lambda0 ** (a - b) if a > b else 1.0)
    return H


def build_M(lambda0: complex, k: int, r: int, n: int) -> np.ndarray:
    """M = H (x) I_n, the (k+1)n x (p+1)n map from coefficients to Taylor blocks."""
    return np.kron(build_H(lambda0, k, r), np.eye(n))


def build_T_gamma(p: MatrixPolynomial, lambda0: complex, gamma) -> np.ndarray:
    """Block lower triangular Toeplitz-like matrix of gamma-scaled Taylor blocks.

    Size (r+1)n x (r+1)n with r = len(gamma).  Zero-based block (i, j), i >= j,
    equals prod(gamma[j:i]) * P^(i-j)(lambda0)/(i-j)!; blocks with offset
    i - j > k vanish with the derivatives.
    """
    gamma = as_gamma(gamma)
    r = gamma.size
    n = p.n
    blocks = [p.taylor_block(lambda0, d) for d in range(min(r, p.k) + 1)]
    T = np.zeros(((r + 1) * n, (r + 1) * n), dtype=complex)
    for i in range(r + 1):
        for j in range(max(0, i - p.k), i + 1):
            c = np.prod(gamma[j:i]) if i > j else 1.0
            T[i * n:(i + 1) * n, j * n:(j + 1) * n] = c * blocks[i - j]
    return T


def build_T(p: MatrixPolynomial, lambda0: complex, r: int) -> np.ndarray:
    """T_gamma with gamma = [1 ... 1] (length r)."""
    return build_T_gamma(p, lambda0, np.ones(r))


def gamma_selectors(r: int, gamma=None) -> list:
    """The (r+1) x (r+1) selector matrices, optionally gamma-weighted.

    Selector i (1-based, i = 1..r+1) carries its nonzeros on the antidiagonal
    of the leading i x i block: entry (t, i-1-t) zero-based holds the product
    gamma[i-1-t:i-1] (empty product 1 on the top row).  With gamma = ones these
    are the 0/1 selectors of the block-row factorization of T.
    """
    if gamma is None:
        gamma = np.ones(r)
    gamma = as_gamma(gamma)
    if gamma.size != r:
        raise ValueError("gamma length must equal r")
    out = []
    for i in range(1, r + 2):
        Ei = np.zeros((r + 1, r + 1))
        for t in range(i):
            col = i - 1 - t
            Ei[t, col] = np.prod(gamma[col:i - 1]) if t > 0 else 1.0
        out.append(Ei)
    return out


def build_E(r: int, k: int, n: int) -> np.ndarray:
    """Stacked selector matrix: T(P, l0) = (I_{r+1} (x) derivative_row) E.

    Each selector contributes its first min(r, k)+1 rows (truncation only
    bites when r > k), then the stack is Kronecker-lifted by I_n.
    """
    if r < 1 or k < 1 or n < 1:
        raise ValueError("r, k, n must be >= 1")
    rows = min(r, k) + 1
    stack = np.vstack([Ei[:rows, :] for Ei in gamma_selectors(r)])
    return np.kron(stack, np.eye(n))


def chain_matrix(xs: np.ndarray, gamma, k: int) -> np.ndarray:
    """Block Toeplitz-like matrix X built from candidate chain vectors.

    xs has rows x_0..x_r; the result is (p+1)n x (r+1) with p = min(r, k).
    Zero-based block (i, j), i <= j, holds prod(gamma[j-i:j]) * x_{j-i}; note
    the diagonal blocks carry the full running gamma product, unlike T_gamma.
    """
    xs = np.asarray(xs, dtype=complex)
    if xs.ndim != 2:
        raise ValueError("xs must be (r+1, n)")
    r = xs.shape[0] - 1
    n = xs.shape[1]
    gamma = as_gamma(gamma)
    if gamma.size != r:
        raise ValueError("gamma length must be r = len(xs) - 1")
    p = min(r, k)
    X = np.zeros(((p + 1) * n, r + 1), dtype=complex)
    for i in range(p + 1):
        for j in range(i, r + 1):
            # empty slice (j == i == 0) gives the neutral product 1.0
            X[i * n:(i + 1) * n, j] = np.prod(gamma[j - i:j]) * xs[j - i]
    return X


@dataclass(frozen=True)
class StructuredMatrixSet:
    """The H/M/E/T family for one (P, lambda0, r) triple."""

    H: np.ndarray
    M: np.ndarray
    E: np.ndarray
    Tgamma: np.ndarray
    lambda0: complex
    r: int
    gamma: np.ndarray = field(repr=False, default=None)


def structured_set(p: MatrixPolynomial, lambda0: complex, r: int, gamma=None) -> StructuredMatrixSet:
    """Assemble H, M, E and T_gamma together (gamma defaults to all ones)."""
    if gamma is None:
        gamma = np.ones(r)
    gamma = as_gamma(gamma)
    return StructuredMatrixSet(
        H=build_H(lambda0, p.k, r),
        M=build_M(lambda0, p.k, r, p.n),
        E=build_E(r, p.k, p.n),
        Tgamma=build_T_gamma(p, lambda0, gamma),
        lambda0=complex(lambda0),
        r=r,
        gamma=gamma,
    )
