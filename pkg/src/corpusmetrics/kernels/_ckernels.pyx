# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the similarity-map hot loops.

Mirrors ``_pykernels`` function by function; keep formulas and guard
constants in sync with the pure version.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log

cnp.import_array()

cdef double Q_FLOOR = 1e-12


def pairwise_sq_dists(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, n))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(d):
                diff = x[i, k] - x[j, k]
                acc += diff * diff
            o[i, j] = acc
            o[j, i] = acc
    return out


def gaussian_affinities(double[:, ::1] d2, double perplexity, double tol, int max_iter):
    cdef Py_ssize_t n = d2.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p_arr = np.zeros((n, n))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] res_arr = np.zeros(n)
    cdef double[:, ::1] p = p_arr
    cdef double[:] res = res_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w_arr = np.zeros(n)
    cdef double[:] w = w_arr
    cdef Py_ssize_t i, j
    cdef int it
    cdef double beta, lo, hi, total, weighted, entropy, residual, perp
    for i in range(n):
        beta = 1.0
        lo = 0.0
        hi = -1.0  # -1 encodes "unbounded above"
        residual = 1e308
        for it in range(max_iter):
            total = 0.0
            weighted = 0.0
            for j in range(n):
                if j == i:
                    w[j] = 0.0
                    continue
                w[j] = exp(-d2[i, j] * beta)
                total += w[j]
                weighted += d2[i, j] * w[j]
            if total > 0.0:
                entropy = log(total) + beta * weighted / total
            else:
                entropy = 0.0
            perp = exp(entropy)
            residual = fabs(perp - perplexity)
            if residual < tol:
                break
            if perp > perplexity:
                lo = beta
                beta = beta * 2.0 if hi < 0.0 else (beta + hi) / 2.0
            else:
                hi = beta
                beta = (beta + lo) / 2.0
        if total > 0.0:
            for j in range(n):
                p[i, j] = w[j] / total
        res[i] = residual
    return p_arr, res_arr


def tsne_kl_grad(double[:, ::1] p, double[:, ::1] y):
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t d = y.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] num_arr = np.zeros((n, n))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] grad_arr = np.zeros((n, d))
    cdef double[:, ::1] num = num_arr
    cdef double[:, ::1] grad = grad_arr
    cdef Py_ssize_t i, j, k
    cdef double acc, diff, total, q, kl, coeff
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(d):
                diff = y[i, k] - y[j, k]
                acc += diff * diff
            acc = 1.0 / (1.0 + acc)
            num[i, j] = acc
            num[j, i] = acc
            total += 2.0 * acc
    kl = 0.0
    for i in range(n):
        for j in range(n):
            if p[i, j] > 0.0:
                q = num[i, j] / total
                if q < Q_FLOOR:
                    q = Q_FLOOR
                kl += p[i, j] * log(p[i, j] / q)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            q = num[i, j] / total
            if q < Q_FLOOR:
                q = Q_FLOOR
            coeff = 4.0 * (p[i, j] - q) * num[i, j]
            for k in range(d):
                grad[i, k] += coeff * (y[i, k] - y[j, k])
    return kl, grad_arr
