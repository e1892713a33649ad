# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair loops for the grid sup-convolution oracle."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, exp, log, fabs, floor, INFINITY

cnp.import_array()


cdef inline double _pmean(double a, double b, double p, double w0, double w1) noexcept nogil:
    if a <= 0.0 or b <= 0.0:
        return 0.0
    if p == INFINITY:
        return a if a > b else b
    if p == -INFINITY:
        return a if a < b else b
    if fabs(p) < 1e-10:
        return exp(w0 * log(a) + w1 * log(b))
    return pow(w0 * pow(a, p) + w1 * pow(b, p), 1.0 / p)


def affine_pair_max(double[::1] fvals, long long[:, ::1] fidx,
                    double[::1] gvals, long long[:, ::1] gidx,
                    long long cf, long long cg, long long[::1] offset,
                    long long[::1] out_shape, double p, double w0, double w1):
    """Max of the mean over pairs landing on output index ``cf*i + cg*j + offset``."""
    cdef Py_ssize_t d = out_shape.shape[0]
    cdef Py_ssize_t total = 1, a, b, k
    for k in range(d):
        total *= out_shape[k]
    out_arr = np.zeros(total, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef long long[::1] stride = np.ones(d, dtype=np.int64)
    for k in range(d - 2, -1, -1):
        stride[k] = stride[k + 1] * out_shape[k + 1]
    cdef long long flat, idx
    cdef double v
    cdef bint ok
    with nogil:
        for a in range(fvals.shape[0]):
            for b in range(gvals.shape[0]):
                flat = 0
                ok = True
                for k in range(d):
                    idx = cf * fidx[a, k] + cg * gidx[b, k] + offset[k]
                    if idx < 0 or idx >= out_shape[k]:
                        ok = False
                        break
                    flat += idx * stride[k]
                if not ok:
                    continue
                v = _pmean(fvals[a], gvals[b], p, w0, w1)
                if v > out[flat]:
                    out[flat] = v
    return out_arr


def heisenberg_pair_max(double[::1] fvals, double[:, ::1] fx,
                        double[::1] gvals, double[:, ::1] gy,
                        double[::1] out_lo, double[::1] h, long long[::1] out_shape,
                        double p, double w0, double w1):
    """Max of the mean over pairs, with each product ``x.y`` snapped to the nearest output node."""
    cdef Py_ssize_t a, b, k
    cdef Py_ssize_t total = out_shape[0] * out_shape[1] * out_shape[2]
    out_arr = np.zeros(total, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double z[3]
    cdef long long idx[3]
    cdef long long flat
    cdef double v
    cdef bint ok
    with nogil:
        for a in range(fvals.shape[0]):
            for b in range(gvals.shape[0]):
                z[0] = fx[a, 0] + gy[b, 0]
                z[1] = fx[a, 1] + gy[b, 1]
                z[2] = fx[a, 2] + gy[b, 2] + 0.5 * (fx[a, 0] * gy[b, 1] - fx[a, 1] * gy[b, 0])
                ok = True
                for k in range(3):
                    idx[k] = <long long> floor((z[k] - out_lo[k]) / h[k] + 0.5)
                    if idx[k] < 0 or idx[k] >= out_shape[k]:
                        ok = False
                        break
                if not ok:
                    continue
                flat = (idx[0] * out_shape[1] + idx[1]) * out_shape[2] + idx[2]
                v = _pmean(fvals[a], gvals[b], p, w0, w1)
                if v > out[flat]:
                    out[flat] = v
    return out_arr
