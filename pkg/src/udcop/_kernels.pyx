# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled evaluation kernels for the round-loop hot path.

Must stay numerically identical to udcop._kernels_py: integer conflict
accumulation, one float multiply-add per value at the end.
"""

import numpy as np

BACKEND = "compiled"


def eval_all_unit(double[::1] unary_eval, long long[::1] neighbor_vals, double w_unit):
    cdef Py_ssize_t d = unary_eval.shape[0]
    cdef Py_ssize_t m = neighbor_vals.shape[0]
    cdef Py_ssize_t j, v
    out = np.empty(d, dtype=np.float64)
    counts = np.zeros(d, dtype=np.int64)
    cdef double[::1] out_v = out
    cdef long long[::1] cnt = counts
    for j in range(m):
        cnt[neighbor_vals[j]] += 1
    for v in range(d):
        out_v[v] = unary_eval[v] + w_unit * <double>(m - cnt[v])
    return out


def eval_all_weighted(double[::1] unary_eval,
                      long long[::1] neighbor_ids,
                      long long[::1] neighbor_vals,
                      long long[:, :, ::1] weights,
                      double w_unit):
    cdef Py_ssize_t d = unary_eval.shape[0]
    cdef Py_ssize_t m = neighbor_vals.shape[0]
    cdef Py_ssize_t k, v
    cdef long long s
    out = np.empty(d, dtype=np.float64)
    cdef double[::1] out_v = out
    for v in range(d):
        s = 0
        for k in range(m):
            if neighbor_vals[k] != v:
                s += weights[neighbor_ids[k], v, neighbor_vals[k]]
        out_v[v] = unary_eval[v] + w_unit * <double>s
    return out
