"""polydist: distance from a square matrix polynomial to a nearest one with an
eigenvalue of prescribed algebraic multiplicity at a chosen point.

Built around the equivalence between that multiplicity and the rank deficiency
of a block Toeplitz matrix of Taylor blocks: rank tests and certificates,
computable lower and upper bounds, and a multistart gradient optimization of
the exact distance objective, plus a CLI that reproduces the benchmark tables.
"""

from .bounds import (BoundResult, SearchConfig, f_gamma, lower_bound_scaling,
                     lower_bound_sigma, scaling_factor, upper_bound)
from .certify import (JordanChainCertificate, RankCertificate, VerificationReport,
                      chain_residuals, companion_eigenvalues, count_eigenvalues_near,
                      default_cluster_radius, is_numerically_singular,
                      multiplicity_at_least, verify_perturbation)
from .distopt import (ChainMatrix, MinimizeConfig, OptimizationResult, RankCliffError,
                      extract_perturbation, gamma_free_r1_refinement, gradient_squared,
                      minimize, objective, pseudoinverse, rank1_restricted_distance,
                      seed_from_upper_bound)
from .io import DistanceReport, InstanceFormatError, read_instance, write_instance
from .mulink import (MuConsistencyReport, PerturbationClassTag, TargetIsEigenvalueError,
                     build_mu_matrix, min_norm_rank_drop, mu_consistency_check)
from .polynomials import (DerivativeRow, MatrixPolynomial, StructuredMatrixSet,
                          as_gamma, build_E, build_H, build_M, build_T, build_T_gamma,
                          chain_matrix, eval_derivative_row, gamma_selectors,
                          perturbed, poly_norm, polynomial_from_row, structured_set)

__version__ = "0.1.0"

__all__ = [
    "MatrixPolynomial", "DerivativeRow", "StructuredMatrixSet", "as_gamma",
    "poly_norm", "eval_derivative_row", "build_H", "build_M", "build_T",
    "build_T_gamma", "gamma_selectors", "build_E", "chain_matrix", "perturbed",
    "polynomial_from_row", "structured_set",
    "RankCertificate", "JordanChainCertificate", "VerificationReport",
    "multiplicity_at_least", "companion_eigenvalues", "count_eigenvalues_near",
    "chain_residuals", "is_numerically_singular", "default_cluster_radius",
    "verify_perturbation",
    "TargetIsEigenvalueError", "PerturbationClassTag", "build_mu_matrix",
    "min_norm_rank_drop", "MuConsistencyReport", "mu_consistency_check",
    "SearchConfig", "BoundResult", "f_gamma", "scaling_factor",
    "lower_bound_sigma", "lower_bound_scaling", "upper_bound",
    "ChainMatrix", "OptimizationResult", "MinimizeConfig", "RankCliffError",
    "objective", "extract_perturbation", "gradient_squared", "minimize",
    "seed_from_upper_bound", "rank1_restricted_distance", "gamma_free_r1_refinement",
    "pseudoinverse",
    "InstanceFormatError", "read_instance", "write_instance", "DistanceReport",
]
