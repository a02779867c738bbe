"""Small shared numerical helpers: SVD-based pseudoinverse and rank counting."""

import numpy as np

__all__ = ["default_rank_tol", "pseudoinverse", "pinv_full_column", "numerical_rank", "nullity"]


def default_rank_tol(shape) -> float:
    """Standard numerical-rank cutoff factor: max(m, n) * machine epsilon."""
    return max(shape) * np.finfo(float).eps


def pseudoinverse(a: np.ndarray, rank_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse with singular values <= rank_tol*sigma_max dropped.

    rank_tol = 0 keeps every nonzero singular value (full-rank treatment).
    """
    a = np.asarray(a, dtype=complex)
    if rank_tol is None:
        rank_tol = default_rank_tol(a.shape)
    U, s, Vh = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    rank = int(np.count_nonzero(s > rank_tol * s[0]))
    if rank == 0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    return (Vh[:rank].conj().T / s[:rank]) @ U[:, :rank].conj().T


def pinv_full_column(a: np.ndarray) -> np.ndarray:
    """Pseudoinverse assuming full column rank (no truncation of small sigmas).

    Used where rank truncation would silently change the value being computed;
    callers must guard against exactly zero singular values themselves.
    """
    U, s, Vh = np.linalg.svd(a, full_matrices=False)
    if np.any(s == 0.0):
        raise np.linalg.LinAlgError("matrix is exactly rank deficient")
    return (Vh.conj().T / s) @ U.conj().T


def numerical_rank(a: np.ndarray, rank_tol: float | None = None) -> int:
    """Count of singular values above rank_tol * sigma_max."""
    a = np.asarray(a, dtype=complex)
    if rank_tol is None:
        rank_tol = default_rank_tol(a.shape)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_tol * s[0]))


def nullity(a: np.ndarray, rank_tol: float | None = None) -> int:
    """Column nullity under the same threshold convention as numerical_rank."""
    a = np.asarray(a, dtype=complex)
    return a.shape[1] - numerical_rank(a, rank_tol)
