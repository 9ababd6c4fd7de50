"""Local stability toolkit for the two update maps.

Analytic Jacobians of the one-sweep maps at a fixed point, spectral radii, a
finite-difference oracle, the quadratic-form contraction checker, and the
normalized off-diagonal Gram statistic that drives parallel instability under
Gaussian designs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional

import numpy as np
from scipy.linalg import eigh, solve_triangular

from . import engines
from .model import Hyperparams, Precomputed, inclusion_prob, inclusion_prob_grad

__all__ = [
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
]

# below this, the squared coupling norm is treated as exactly zero (decoupled design)
_COUPLING_EPS = 1e-14
_ALPHA_CLAMP = 1e-12


@dataclass
class ScaledOperators:
    """Operators of the diagonally rescaled system at a candidate fixed point.

    ``lower_scaled`` is the strict lower Gram triangle rescaled by the sweep
    normalizer, ``offdiag`` its symmetrization, and ``core = offdiag + I`` is
    positive definite by construction (it is a congruence of the ridge
    system). ``incl`` holds the inclusion probabilities, ``curvature`` the
    diagonal ``mu^2 * a * (1 - incl)`` that measures how strongly the
    probabilities react to the means, and ``mixed`` couples the two.
    """

    lower_scaled: np.ndarray
    offdiag: np.ndarray
    core: np.ndarray
    incl: np.ndarray
    curvature: np.ndarray
    mixed: np.ndarray


def scaled_operators(mu_star, alpha, pre: Precomputed) -> ScaledOperators:
    """Build the rescaled operators from a state and the precomputed design."""
    mu_star = np.asarray(mu_star, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    inv_sqrt_d = 1.0 / np.sqrt(pre.d)
    lower_scaled = pre.xtx_lower * np.outer(inv_sqrt_d, inv_sqrt_d)
    offdiag = lower_scaled + lower_scaled.T
    core = offdiag + np.eye(pre.p)
    curvature = mu_star * mu_star * pre.a * (1.0 - alpha)
    mixed = np.sqrt(alpha)[:, None] * offdiag * curvature[None, :]
    return ScaledOperators(
        lower_scaled=lower_scaled,
        offdiag=offdiag,
        core=core,
        incl=alpha,
        curvature=curvature,
        mixed=mixed,
    )


def _alpha_and_grad(mu_star, pre, hyper, alpha_override):
    """Inclusion probabilities and their mean-derivatives; overrides pin both."""
    if alpha_override is not None:
        alpha = np.ascontiguousarray(alpha_override, dtype=np.float64)
        grad = np.zeros_like(alpha)
    else:
        alpha = inclusion_prob(mu_star, pre.a, hyper)
        grad = inclusion_prob_grad(mu_star, pre.a, alpha)
    return alpha, grad


def jacobian_seq(
    mu_star, pre: Precomputed, hyper: Hyperparams, alpha_override=None
) -> np.ndarray:
    """Analytic Jacobian of the sequential one-sweep map at ``mu_star``.

    The map is mu -> G(mu) mu + H(mu) with G and H built from the triangular
    sweep system; differentiating the inverse contributes one rank-one update
    per coordinate, assembled here after a single triangular factorization.
    Intended for (near) fixed points; see :func:`analyze_stability` for the
    residual warning.
    """
    mu_star = np.asarray(mu_star, dtype=np.float64)
    alpha, grad = _alpha_and_grad(mu_star, pre, hyper, alpha_override)

    sweep_sys = pre.xtx_lower * alpha[None, :]
    np.fill_diagonal(sweep_sys, pre.d)
    low_solved = solve_triangular(sweep_sys, pre.xtx_lower, lower=True)
    up_solved = solve_triangular(sweep_sys, np.ascontiguousarray(pre.xtx_lower.T), lower=True)
    h_vec = solve_triangular(sweep_sys, pre.xty, lower=True)
    tail_vec = up_solved @ (alpha * mu_star)

    linear_part = -up_solved * alpha[None, :]
    return (
        linear_part
        + low_solved * (grad * (tail_vec - h_vec))[None, :]
        - up_solved * (grad * mu_star)[None, :]
    )


def jacobian_par(
    mu_star, pre: Precomputed, hyper: Hyperparams, alpha_override=None
) -> np.ndarray:
    """Analytic Jacobian of the parallel one-sweep map at ``mu_star``.

    Closed form: -D^{-1} (low + low^T) (diag(alpha) + diag(alpha' * mu)).
    When probabilities are not pinned, the diagonally rescaled Jacobian is
    verified against its similar factorization (I - core)(I + curvature)
    diag(incl), which shares its spectrum.
    """
    mu_star = np.asarray(mu_star, dtype=np.float64)
    alpha, grad = _alpha_and_grad(mu_star, pre, hyper, alpha_override)
    offdiag_full = pre.xtx_lower + pre.xtx_lower.T
    jac = -(offdiag_full * (alpha + grad * mu_star)[None, :]) / pre.d[:, None]

    if alpha_override is None:
        ops = scaled_operators(mu_star, alpha, pre)
        sqrt_d = np.sqrt(pre.d)
        rescaled = sqrt_d[:, None] * jac / sqrt_d[None, :]
        similar = -ops.offdiag * ((1.0 + ops.curvature) * alpha)[None, :]
        scale = max(1.0, float(np.max(np.abs(rescaled))))
        if np.max(np.abs(rescaled - similar)) > 1e-10 * scale:
            raise RuntimeError("rescaled parallel Jacobian fails its similarity identity")
    return jac


def spectral_radius(jac: np.ndarray) -> float:
    """Largest eigenvalue modulus, via the dense nonsymmetric QR eigensolver.

    Falls back to the norm-growth (Gelfand) estimate with a warning if the
    eigensolver fails to converge.
    """
    jac = np.asarray(jac, dtype=np.float64)
    if jac.ndim != 2 or jac.shape[0] != jac.shape[1]:
        raise ValueError("spectral_radius expects a square matrix")
    if not np.all(np.isfinite(jac)):
        raise ValueError("spectral_radius expects finite entries")
    try:
        return float(np.max(np.abs(np.linalg.eigvals(jac))))
    except np.linalg.LinAlgError:
        warnings.warn(
            "eigensolver did not converge; returning the norm-growth estimate "
            "(about 1% accuracy)",
            RuntimeWarning,
        )
        return gelfand_spectral_radius(jac)


def gelfand_spectral_radius(jac: np.ndarray, powers=(64, 128, 256)) -> float:
    """Estimate the spectral radius from the growth of matrix-power norms.

    Computes ||J^k||_2^{1/k} for the requested power-of-two exponents by
    repeated squaring with rescaling, then extrapolates k -> infinity with a
    least-squares fit of log estimate against 1/k. Fully independent of the
    eigendecomposition path, so it doubles as an oracle for it.
    """
    jac = np.asarray(jac, dtype=np.float64)
    top = float(np.linalg.norm(jac, 2))
    if top == 0.0:
        return 0.0
    # invariant: J^k == top^k * exp(log_scale) * current
    current, log_scale, k = jac / top, 0.0, 1
    log_norms = {}
    while k < max(powers):
        current = current @ current
        k *= 2
        log_scale *= 2.0
        peak = float(np.max(np.abs(current)))
        if peak == 0.0:
            return 0.0
        current /= peak
        log_scale += np.log(peak)
        if k in powers:
            log_norms[k] = (
                k * np.log(top) + log_scale + np.log(float(np.linalg.norm(current, 2)))
            )
    xs = np.array([1.0 / k for k in sorted(log_norms)])
    ys = np.array([log_norms[k] / k for k in sorted(log_norms)])
    coeffs = np.polyfit(xs, ys, 1)
    return float(np.exp(coeffs[1]))


def fd_jacobian(map_fn: Callable, mu_star, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of a one-sweep map, column by column.

    Step sizes between 1e-8 and 1e-4 balance truncation against roundoff for
    these maps.
    """
    if not (h > 0):
        raise ValueError("h must be positive")
    mu_star = np.asarray(mu_star, dtype=np.float64)
    p = mu_star.shape[0]
    jac = np.empty((p, p))
    for j in range(p):
        bump = np.zeros(p)
        bump[j] = h
        jac[:, j] = (map_fn(mu_star + bump) - map_fn(mu_star - bump)) / (2.0 * h)
    return jac


@dataclass
class Assumption1Result:
    """Outcome of the quadratic-form contraction check.

    ``delta_star`` is the smallest constant satisfying both quadratic-form
    conditions (the maximum of the generalized-eigenvalue part and the
    diagonal part); ``satisfied`` requires it to stay strictly below
    ``delta_bound``. A decoupled design (zero coupling norm) makes the bound
    vacuous and is flagged, as is clamped saturation of the probabilities.
    """

    delta_star: float
    delta_bound: float
    satisfied: bool
    delta_quad: float
    delta_diag: float
    coupling_norm_sq: float
    flags: List[str] = field(default_factory=list)


def _assumption1_from_operators(ops: ScaledOperators, flags: List[str]) -> Assumption1Result:
    b = ops.curvature
    incl = ops.incl

    one_minus = 1.0 - incl
    with np.errstate(divide="ignore", invalid="ignore"):
        odds = np.where(one_minus > 0.0, incl / one_minus, np.inf)
        diag_terms = np.where(b > 0.0, b * b * odds, 0.0)
    delta_diag = float(np.max(diag_terms)) if diag_terms.size else 0.0
    if np.isinf(delta_diag):
        flags = flags + ["alpha_saturated"]

    evals, evecs = eigh(ops.core)
    inv_sqrt_core = (evecs * (evals**-0.5)[None, :]) @ evecs.T
    core_sq = ops.core @ ops.core
    quad_op = inv_sqrt_core @ (b[:, None] * core_sq * b[None, :]) @ inv_sqrt_core
    quad_op = 0.5 * (quad_op + quad_op.T)
    delta_quad = float(max(np.max(np.linalg.eigvalsh(quad_op)), 0.0))

    coupling_norm_sq = float(np.linalg.norm(ops.lower_scaled, 2) ** 2)
    delta_star = max(delta_quad, delta_diag)

    if coupling_norm_sq < _COUPLING_EPS:
        # decoupled coordinates: the bound degenerates and the condition is vacuous
        return Assumption1Result(
            delta_star=delta_star,
            delta_bound=float("inf"),
            satisfied=True,
            delta_quad=delta_quad,
            delta_diag=delta_diag,
            coupling_norm_sq=coupling_norm_sq,
            flags=flags + ["decoupled"],
        )

    with np.errstate(divide="ignore"):
        shifted = ops.core + np.diag(1.0 / incl)
    lam_min = float(np.min(np.linalg.eigvalsh(shifted)))
    delta_bound = min(0.5, lam_min / coupling_norm_sq)
    return Assumption1Result(
        delta_star=delta_star,
        delta_bound=delta_bound,
        satisfied=bool(delta_star < delta_bound),
        delta_quad=delta_quad,
        delta_diag=delta_diag,
        coupling_norm_sq=coupling_norm_sq,
        flags=flags,
    )


def check_assumption1(
    mu_star, pre: Precomputed, hyper: Hyperparams, clamp: float = _ALPHA_CLAMP
) -> Assumption1Result:
    """Evaluate the contraction conditions at a candidate fixed point.

    Probabilities are clamped into [clamp, 1 - clamp] before building the
    operators (the inverse-probability diagonal is singular at saturation);
    clamped coordinates are reported through the ``alpha_saturated`` flag.
    """
    mu_star = np.asarray(mu_star, dtype=np.float64)
    alpha_raw = inclusion_prob(mu_star, pre.a, hyper)
    flags: List[str] = []
    if np.any(alpha_raw > 1.0 - clamp) or np.any(alpha_raw < clamp):
        flags.append("alpha_saturated")
    alpha = np.clip(alpha_raw, clamp, 1.0 - clamp)
    ops = scaled_operators(mu_star, alpha, pre)
    return _assumption1_from_operators(ops, flags)


@dataclass
class StabilityReport:
    """Spectral radii of both Jacobians plus the contraction diagnostics."""

    rho_seq: float
    rho_par: float
    assumption1: Assumption1Result
    seq_residual: float
    par_residual: float
    flags: List[str] = field(default_factory=list)


def analyze_stability(
    mu_star, pre: Precomputed, hyper: Hyperparams, residual_tol: float = 1e-6
) -> StabilityReport:
    """Full local analysis at ``mu_star``: radii, residuals, contraction check.

    A sup-norm sweep residual above ``residual_tol`` does not abort the
    analysis but is flagged, since the Jacobian formulas presume a fixed
    point.
    """
    mu_star = np.asarray(mu_star, dtype=np.float64)
    seq_residual = float(np.max(np.abs(engines.seq_sweep(mu_star, pre, hyper) - mu_star)))
    par_residual = float(np.max(np.abs(engines.par_sweep(mu_star, pre, hyper) - mu_star)))
    flags = [] if max(seq_residual, par_residual) <= residual_tol else ["not_fixed_point"]
    assumption = check_assumption1(mu_star, pre, hyper)
    return StabilityReport(
        rho_seq=spectral_radius(jacobian_seq(mu_star, pre, hyper)),
        rho_par=spectral_radius(jacobian_par(mu_star, pre, hyper)),
        assumption1=assumption,
        seq_residual=seq_residual,
        par_residual=par_residual,
        flags=flags,
    )


class WignerStat(NamedTuple):
    norm: float
    ratio: float


def wigner_stat(X, tau: float) -> WignerStat:
    """Spectral norm of the normalized off-diagonal Gram matrix.

    Builds S = X^T X, normalizes the off-diagonal part by the regularized
    diagonal sqrt((S_jj + tau)(S_ll + tau)), and returns the largest
    eigenvalue modulus together with its ratio to sqrt(p/n). Under an i.i.d.
    Gaussian design the ratio concentrates near 2.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a matrix")
    n, p = X.shape
    if not (n >= p >= 2):
        raise ValueError(f"need n >= p >= 2, got n={n}, p={p}")
    if not (tau > 0):
        raise ValueError("tau must be positive")
    gram = X.T @ X
    reg_diag = np.diag(gram) + tau
    inv_sqrt = 1.0 / np.sqrt(reg_diag)
    offdiag = gram - np.diag(np.diag(gram))
    normalized = inv_sqrt[:, None] * offdiag * inv_sqrt[None, :]
    norm = float(np.max(np.abs(np.linalg.eigvalsh(normalized))))
    return WignerStat(norm=norm, ratio=norm / np.sqrt(p / n))


def perturbation_decay(
    map_fn: Callable,
    mu_star,
    radius: Optional[float] = None,
    trials: int = 20,
    iters: int = 100,
    seed: int = 0,
) -> bool:
    """Empirical stability probe around a fixed point.

    Samples random sup-norm perturbations of the given radius and iterates the
    map. Returns True when the observed orbit behavior matches the spectral
    prediction: every orbit contracts when the Jacobian radius is below 0.95,
    and at least one orbit escapes when it exceeds 1.05. Radii inside that
    band are not asserted (returns True).
    """
    mu_star = np.asarray(mu_star, dtype=np.float64)
    p = mu_star.shape[0]
    if radius is None:
        radius = 1e-4 * (1.0 + float(np.max(np.abs(mu_star))))
    rho = spectral_radius(fd_jacobian(map_fn, mu_star))

    rng = np.random.default_rng(seed)
    final_dists = np.empty(trials)
    max_dists = np.empty(trials)
    for t in range(trials):
        direction = rng.standard_normal(p)
        direction *= radius / np.max(np.abs(direction))
        x = mu_star + direction
        max_dist = radius
        for _ in range(iters):
            x = map_fn(x)
            if not np.all(np.isfinite(x)):
                max_dist = np.inf
                break
            max_dist = max(max_dist, float(np.max(np.abs(x - mu_star))))
            if max_dist > 1e6 * radius:
                break  # unambiguous escape; stop before overflow
        final_dists[t] = (
            float(np.max(np.abs(x - mu_star))) if np.all(np.isfinite(x)) else np.inf
        )
        max_dists[t] = max_dist

    if rho < 0.95:
        return bool(np.all(final_dists < 0.5 * radius))
    if rho > 1.05:
        return bool(np.any(max_dists > 10.0 * radius))
    return True
