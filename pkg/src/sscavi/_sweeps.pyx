# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled coordinate-sweep kernels.

The sequential sweep is an order-dependent recurrence over coordinates, so it
cannot be vectorized; these loops are the hot path of every replication study.
All kernels write into a caller-provided output buffer.
"""

from libc.math cimport exp


cdef inline double _sigmoid(double t) noexcept nogil:
    cdef double e
    if t >= 0.0:
        return 1.0 / (1.0 + exp(-t))
    e = exp(t)
    return e / (1.0 + e)


def seq_sweep(double[::1] mu_new, const double[::1] mu, const double[::1] alpha,
              const double[:, ::1] xtx, const double[::1] a,
              const double[::1] xty, double sigma2):
    """One sequential sweep with inclusion probabilities frozen at entry.

    Coordinates below j read the freshly written mu_new, coordinates above j
    read the incoming mu; alpha is held fixed for the whole sweep.
    """
    cdef Py_ssize_t p = mu.shape[0]
    cdef Py_ssize_t j, l
    cdef double acc
    with nogil:
        for j in range(p):
            acc = xty[j]
            for l in range(j):
                acc -= xtx[j, l] * alpha[l] * mu_new[l]
            for l in range(j + 1, p):
                acc -= xtx[j, l] * alpha[l] * mu[l]
            mu_new[j] = acc / (sigma2 * a[j])


def seq_sweep_refresh(double[::1] mu_new, const double[::1] mu,
                      double[::1] alpha, const double[:, ::1] xtx,
                      const double[::1] a, const double[::1] xty,
                      double sigma2, const double[::1] logit_offset):
    """Sequential sweep that refreshes alpha[j] right after updating mu[j].

    alpha must arrive filled with the entry-state probabilities; coordinates
    already swept read their refreshed values, later ones the entry values.
    """
    cdef Py_ssize_t p = mu.shape[0]
    cdef Py_ssize_t j, l
    cdef double acc
    with nogil:
        for j in range(p):
            acc = xty[j]
            for l in range(j):
                acc -= xtx[j, l] * alpha[l] * mu_new[l]
            for l in range(j + 1, p):
                acc -= xtx[j, l] * alpha[l] * mu[l]
            mu_new[j] = acc / (sigma2 * a[j])
            alpha[j] = _sigmoid(logit_offset[j] + 0.5 * a[j] * mu_new[j] * mu_new[j])


def par_sweep(double[::1] mu_new, const double[::1] mu, const double[::1] alpha,
              const double[:, ::1] xtx, const double[::1] a,
              const double[::1] xty, double sigma2):
    """One parallel sweep: every coordinate reads only the incoming state."""
    cdef Py_ssize_t p = mu.shape[0]
    cdef Py_ssize_t j, l
    cdef double acc
    with nogil:
        for j in range(p):
            acc = xty[j]
            for l in range(p):
                if l != j:
                    acc -= xtx[j, l] * alpha[l] * mu[l]
            mu_new[j] = acc / (sigma2 * a[j])
