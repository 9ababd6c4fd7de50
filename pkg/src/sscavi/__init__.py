"""Spike-and-slab CAVI for linear regression with a local stability toolkit.

Sequential (Gauss-Seidel ordered) and parallel (Jacobi ordered) coordinate
ascent for the mean-field spike-and-slab posterior, plus analytic Jacobians,
spectral radii, and contraction diagnostics at their shared fixed points.
"""

from .backend import BACKEND, HAVE_COMPILED, available_backends
from .engines import (
    FixedPointError,
    RunConfig,
    RunTrace,
    Scheme,
    fixed_point,
    par_sweep,
    par_sweep_matrix,
    run,
    seq_sweep,
    seq_sweep_matrix,
)
from .model import (
    Dataset,
    Hyperparams,
    Precomputed,
    VariationalState,
    elbo,
    expected_loglik,
    inclusion_logit_offset,
    inclusion_prob,
    inclusion_prob_grad,
    kl_to_prior,
    precompute,
)
from .stability import (
    Assumption1Result,
    ScaledOperators,
    StabilityReport,
    WignerStat,
    analyze_stability,
    check_assumption1,
    fd_jacobian,
    gelfand_spectral_radius,
    jacobian_par,
    jacobian_seq,
    perturbation_decay,
    scaled_operators,
    spectral_radius,
    wigner_stat,
)
from .synth import GenSpec, gen_design, gen_response, make_beta, make_dataset

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAVE_COMPILED",
    "available_backends",
    "Dataset",
    "Hyperparams",
    "Precomputed",
    "VariationalState",
    "precompute",
    "inclusion_prob",
    "inclusion_prob_grad",
    "inclusion_logit_offset",
    "elbo",
    "expected_loglik",
    "kl_to_prior",
    "Scheme",
    "RunConfig",
    "RunTrace",
    "FixedPointError",
    "seq_sweep",
    "seq_sweep_matrix",
    "par_sweep",
    "par_sweep_matrix",
    "run",
    "fixed_point",
    "ScaledOperators",
    "Assumption1Result",
    "StabilityReport",
    "WignerStat",
    "scaled_operators",
    "jacobian_seq",
    "jacobian_par",
    "spectral_radius",
    "gelfand_spectral_radius",
    "fd_jacobian",
    "check_assumption1",
    "analyze_stability",
    "wigner_stat",
    "perturbation_decay",
    "GenSpec",
    "gen_design",
    "gen_response",
    "make_beta",
    "make_dataset",
    "__version__",
]
