"""Sparsity-constrained suboptimal H-infinity synthesis for discrete-time
LTI plants, via FIR controllers and alternating convex LMI programs."""

from .bounded_real import (build_augmented, certificate_matrix,
                           certificate_matrix_relaxed, certificate_min_eig,
                           close_static_gain, n_aug_states)
from .ctfit import (RationalTf, fit_ct_controller, fit_ct_entry,
                    rational_matrix_to_ss, rational_to_ss)
from .discovery import DiscoveryConfig, DiscoveryResult, discover
from .errors import (DimensionError, DomainError, InfeasibleRelaxation,
                     NoConvergence, NumericFailure, SparseHinfError,
                     UnstableSystemError)
from .fir import (FirController, SparsityPattern, fir_realize, pack_gain,
                  pattern_constraints, pattern_of, unpack_gain)
from .lmi import (LmiProblem, MatrixVariable, SolveOutcome, SolveStatus,
                  SolverOptions, solve, solve_min_weighted_l1)
from .lti import (GeneralizedPlant, StateSpace, close_loop, close_loop_static,
                  impulse_response, is_stable, spectral_radius, zoh_discretize)
from .norms import hinf_norm_grid, hinf_norm_lmi_bisect
from .synthesis import (Certificate, SynthesisConfig, alternate,
                        initial_guess, suggest_mu, synthesize)

__version__ = "0.1.0"

__all__ = [
    "GeneralizedPlant", "StateSpace", "FirController", "SparsityPattern",
    "RationalTf", "LmiProblem", "MatrixVariable", "SolveOutcome",
    "SolveStatus", "SolverOptions", "SynthesisConfig", "Certificate",
    "DiscoveryConfig", "DiscoveryResult",
    "zoh_discretize", "close_loop", "close_loop_static", "is_stable",
    "spectral_radius", "impulse_response", "hinf_norm_grid",
    "hinf_norm_lmi_bisect", "fir_realize", "pack_gain", "unpack_gain",
    "pattern_constraints", "pattern_of", "build_augmented",
    "close_static_gain", "certificate_matrix", "certificate_matrix_relaxed",
    "certificate_min_eig", "n_aug_states", "solve", "solve_min_weighted_l1",
    "initial_guess", "alternate", "synthesize", "suggest_mu", "discover",
    "fit_ct_entry", "fit_ct_controller", "rational_to_ss",
    "rational_matrix_to_ss",
    "SparseHinfError", "DimensionError", "DomainError", "NumericFailure",
    "UnstableSystemError", "InfeasibleRelaxation", "NoConvergence",
]
