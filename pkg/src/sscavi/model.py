"""Model types, design-dependent precomputation, inclusion probabilities, ELBO.

The regression model is y = X beta + noise with known noise variance, and each
coefficient carries a spike-and-slab prior: a point mass at zero mixed with a
zero-mean Gaussian slab of precision ``tau``. The mean-field variational family
factorizes over coordinates; each factor is again a spike-and-slab with mean
``mu_j``, variance ``1/a_j`` and inclusion probability ``alpha_j``, where
``alpha_j`` is a deterministic sigmoid transform of ``mu_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "Dataset",
    "Hyperparams",
    "Precomputed",
    "VariationalState",
    "precompute",
    "inclusion_prob",
    "inclusion_prob_grad",
    "inclusion_logit_offset",
    "expected_loglik",
    "kl_to_prior",
    "elbo",
]

# alpha is clamped to this range inside logarithms only (0*log 0 == 0 elsewhere)
_ALPHA_LOG_FLOOR = 1e-300
_ALPHA_LOG_CEIL = 1.0 - 1e-16


def _finite_array(x, name: str, ndim: int) -> np.ndarray:
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclass
class Dataset:
    """Design matrix, response, and optional generating ground truth."""

    X: np.ndarray
    y: np.ndarray
    beta_true: Optional[np.ndarray] = None
    sigma2_gen: float = 1.0

    def __post_init__(self):
        self.X = _finite_array(self.X, "X", 2)
        self.y = _finite_array(self.y, "y", 1)
        n, p = self.X.shape
        if n < 1 or p < 1:
            raise ValueError("X must have at least one row and one column")
        if self.y.shape[0] != n:
            raise ValueError(f"y has length {self.y.shape[0]}, expected {n}")
        if self.beta_true is not None:
            self.beta_true = _finite_array(self.beta_true, "beta_true", 1)
            if self.beta_true.shape[0] != p:
                raise ValueError("beta_true length must equal the number of columns")
        if not (np.isfinite(self.sigma2_gen) and self.sigma2_gen >= 0):
            raise ValueError("sigma2_gen must be a finite nonnegative real")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class Hyperparams:
    """Prior inclusion probability, slab precision, and known noise variance."""

    pi: float
    tau: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.pi < 1.0):
            raise ValueError(f"pi must lie in (0, 1), got {self.pi}")
        if not (self.tau > 0.0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be a positive real, got {self.tau}")
        if not (self.sigma2 > 0.0 and math.isfinite(self.sigma2)):
            raise ValueError(f"sigma2 must be a positive real, got {self.sigma2}")

    @property
    def logit_pi(self) -> float:
        return math.log(self.pi) - math.log1p(-self.pi)


@dataclass
class Precomputed:
    """Design-dependent quantities shared by every sweep.

    Attributes
    ----------
    a : per-coordinate slab-posterior precisions, ``|X_j|^2 / sigma2 + tau``.
    d : diagonal of the sweep normalizer, ``sigma2 * a`` (= ``|X_j|^2 + sigma2*tau``).
    col_sq_norms : squared column norms of the design.
    xtx : Gram matrix of the design.
    xtx_lower : strict lower triangle of ``xtx`` (zero diagonal).
    xty : design-response cross moments.
    """

    a: np.ndarray
    d: np.ndarray
    col_sq_norms: np.ndarray
    xtx: np.ndarray
    xtx_lower: np.ndarray
    xty: np.ndarray

    @property
    def p(self) -> int:
        return self.a.shape[0]


def precompute(dataset: Dataset, hyper: Hyperparams) -> Precomputed:
    """Assemble the per-column precisions, Gram pieces, and cross moments.

    Zero columns are allowed (their precision degenerates to ``tau``);
    non-finite inputs are rejected by :class:`Dataset`.
    """
    X = dataset.X
    col_sq_norms = np.einsum("ij,ij->j", X, X)
    a = col_sq_norms / hyper.sigma2 + hyper.tau
    d = hyper.sigma2 * a
    xtx = np.ascontiguousarray(X.T @ X)
    xtx_lower = np.tril(xtx, k=-1)
    xty = X.T @ dataset.y
    return Precomputed(
        a=a,
        d=d,
        col_sq_norms=col_sq_norms,
        xtx=xtx,
        xtx_lower=xtx_lower,
        xty=xty,
    )


def _stable_sigmoid(t: np.ndarray) -> np.ndarray:
    """Numerically safe sigmoid; separate branches avoid overflowing exp."""
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    et = np.exp(t[~pos])
    out[~pos] = et / (1.0 + et)
    return out


def inclusion_logit_offset(a, hyper: Hyperparams):
    """Mean-independent part of the inclusion logit: logit(pi) + log(tau/a)/2."""
    return hyper.logit_pi + 0.5 * np.log(hyper.tau / np.asarray(a, dtype=np.float64))


def inclusion_prob(mu, a, hyper: Hyperparams):
    """Inclusion probability as a function of the variational mean.

    logit(alpha) = logit(pi) + log(tau/a)/2 + a*mu^2/2, evaluated overflow-safely.
    Scalars in, scalar out; arrays broadcast elementwise.
    """
    mu_arr = np.asarray(mu, dtype=np.float64)
    a_arr = np.asarray(a, dtype=np.float64)
    logit = inclusion_logit_offset(a_arr, hyper) + 0.5 * a_arr * mu_arr * mu_arr
    out = _stable_sigmoid(np.atleast_1d(logit))
    if np.ndim(mu) == 0 and np.ndim(a) == 0:
        return float(out[0])
    return out.reshape(np.broadcast(mu_arr, a_arr).shape)


def inclusion_prob_grad(mu, a, alpha):
    """Derivative of the inclusion probability with respect to the mean.

    Chain rule through the sigmoid: alpha * (1 - alpha) * a * mu. Saturated
    alpha (exactly 0 or 1) gives a zero derivative.
    """
    mu_arr = np.asarray(mu, dtype=np.float64)
    out = np.asarray(alpha) * (1.0 - np.asarray(alpha)) * np.asarray(a) * mu_arr
    if np.ndim(mu) == 0 and np.ndim(a) == 0:
        return float(out)
    return out


@dataclass
class VariationalState:
    """Variational means and the inclusion probabilities derived from them.

    ``alpha`` is never free: construct through :meth:`from_mu` so that it
    always equals the sigmoid transform of ``mu``.
    """

    mu: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        self.mu = np.ascontiguousarray(self.mu, dtype=np.float64)
        self.alpha = np.ascontiguousarray(self.alpha, dtype=np.float64)
        if self.mu.shape != self.alpha.shape or self.mu.ndim != 1:
            raise ValueError("mu and alpha must be 1-d arrays of equal length")
        finite = np.isfinite(self.alpha)
        if np.any((self.alpha[finite] < 0) | (self.alpha[finite] > 1)):
            raise ValueError("alpha entries must lie in [0, 1]")

    @classmethod
    def from_mu(cls, mu, pre: Precomputed, hyper: Hyperparams) -> "VariationalState":
        mu = np.ascontiguousarray(mu, dtype=np.float64)
        return cls(mu=mu, alpha=inclusion_prob(mu, pre.a, hyper))


def expected_loglik(
    state: VariationalState,
    dataset: Dataset,
    hyper: Hyperparams,
    pre: Precomputed,
) -> float:
    """Expected Gaussian log likelihood under the factorized variational law.

    Coordinate-wise, a coefficient has mean ``alpha*mu`` and variance
    ``alpha/a + alpha*(1-alpha)*mu^2``, which yields the residual term plus a
    column-variance correction.
    """
    n = dataset.n
    sigma2 = hyper.sigma2
    mu, alpha = state.mu, state.alpha
    resid = dataset.y - dataset.X @ (alpha * mu)
    s2 = 1.0 / pre.a
    var_term = np.sum(pre.col_sq_norms * alpha * (s2 + (1.0 - alpha) * mu * mu))
    return float(
        -0.5 * n * math.log(2.0 * math.pi * sigma2)
        - 0.5 * (resid @ resid) / sigma2
        - 0.5 * var_term / sigma2
    )


def kl_to_prior(state: VariationalState, hyper: Hyperparams, pre: Precomputed) -> float:
    """KL divergence from the variational law to the spike-and-slab prior.

    Uses the 0*log 0 convention; alpha is clamped only inside logarithms so
    that saturated coordinates contribute exactly their limiting value.
    """
    mu, alpha = state.mu, state.alpha
    s2 = 1.0 / pre.a
    alpha_log = np.clip(alpha, _ALPHA_LOG_FLOOR, _ALPHA_LOG_CEIL)
    slab_kl = -0.5 * alpha * (1.0 + np.log(hyper.tau * s2) - hyper.tau * (s2 + mu * mu))
    bern_kl = np.where(
        alpha > 0.0, alpha * (np.log(alpha_log) - math.log(hyper.pi)), 0.0
    ) + np.where(
        alpha < 1.0,
        (1.0 - alpha) * (np.log1p(-alpha_log) - math.log1p(-hyper.pi)),
        0.0,
    )
    return float(np.sum(slab_kl + bern_kl))


def elbo(
    state: VariationalState,
    dataset: Dataset,
    hyper: Hyperparams,
    pre: Precomputed,
) -> float:
    """Evidence lower bound: expected log likelihood minus the prior KL."""
    return expected_loglik(state, dataset, hyper, pre) - kl_to_prior(state, hyper, pre)
