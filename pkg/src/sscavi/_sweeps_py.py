"""Pure-numpy sweep kernels, signature-compatible with the compiled ones."""

import math

import numpy as np


def _sigmoid(t: float) -> float:
    if t >= 0.0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def seq_sweep(mu_new, mu, alpha, xtx, a, xty, sigma2):
    """Sequential sweep, inclusion probabilities frozen at entry."""
    p = mu.shape[0]
    weighted_old = alpha * mu
    for j in range(p):
        acc = xty[j]
        if j:
            acc -= xtx[j, :j] @ (alpha[:j] * mu_new[:j])
        if j + 1 < p:
            acc -= xtx[j, j + 1 :] @ weighted_old[j + 1 :]
        mu_new[j] = acc / (sigma2 * a[j])


def seq_sweep_refresh(mu_new, mu, alpha, xtx, a, xty, sigma2, logit_offset):
    """Sequential sweep refreshing alpha[j] right after coordinate j updates."""
    p = mu.shape[0]
    for j in range(p):
        acc = xty[j]
        if j:
            acc -= xtx[j, :j] @ (alpha[:j] * mu_new[:j])
        if j + 1 < p:
            acc -= xtx[j, j + 1 :] @ (alpha[j + 1 :] * mu[j + 1 :])
        mu_new[j] = acc / (sigma2 * a[j])
        alpha[j] = _sigmoid(logit_offset[j] + 0.5 * a[j] * mu_new[j] * mu_new[j])


def par_sweep(mu_new, mu, alpha, xtx, a, xty, sigma2):
    """Parallel sweep; fully vectorized since no coordinate reads a fresh one."""
    weighted = alpha * mu
    coupled = xtx @ weighted - np.einsum("jj->j", xtx) * weighted
    mu_new[:] = (xty - coupled) / (sigma2 * a)
