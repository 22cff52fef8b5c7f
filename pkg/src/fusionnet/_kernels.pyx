# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport erfc, exp

cnp.import_array()

cdef double SQRT1_2 = 0.7071067811865476
cdef double INV_SQRT_2PI = 0.3989422804014327


cdef inline double _phi_cdf(double z) nogil:
    return 0.5 * erfc(-z * SQRT1_2)


cdef inline int _ctx(long code, int i, const int[:] par_ptr, const int[:] par_idx) nogil:
    cdef int j, c = 0
    for j in range(par_ptr[i], par_ptr[i + 1]):
        c |= ((code >> par_idx[j]) & 1) << (j - par_ptr[i])
    return c


def joint_probs(int n, const int[:] par_ptr, const int[:] par_idx,
                const int[:] off, const double[:, :] p1):
    cdef long total = 1L << n
    out_arr = np.ones((2, total), dtype=np.float64)
    cdef double[:, :] out = out_arr
    cdef long code
    cdef int i, h, u
    cdef double q, f0, f1
    with nogil:
        for code in range(total):
            f0 = 1.0
            f1 = 1.0
            for i in range(n):
                u = (code >> i) & 1
                q = p1[0, off[i] + _ctx(code, i, par_ptr, par_idx)]
                f0 *= q if u else 1.0 - q
                q = p1[1, off[i] + _ctx(code, i, par_ptr, par_idx)]
                f1 *= q if u else 1.0 - q
            out[0, code] = f0
            out[1, code] = f1
    return out_arr


def node_gradient(int k, int n, const int[:] par_ptr, const int[:] par_idx,
                  const int[:] off, const double[:, :] p1, const double[:, :] weights):
    cdef int size = 1 << (par_ptr[k + 1] - par_ptr[k])
    out_arr = np.zeros((2, size), dtype=np.float64)
    cdef double[:, :] out = out_arr
    cdef long total = 1L << n
    cdef long code
    cdef int i, u, c, ck, u1
    cdef double q, r0, r1, sign
    with nogil:
        for code in range(total):
            r0 = 1.0
            r1 = 1.0
            for i in range(n):
                if i == k:
                    continue
                u = (code >> i) & 1
                c = off[i] + _ctx(code, i, par_ptr, par_idx)
                q = p1[0, c]
                r0 *= q if u else 1.0 - q
                q = p1[1, c]
                r1 *= q if u else 1.0 - q
            u1 = code & 1
            sign = 1.0 if (code >> k) & 1 else -1.0
            ck = _ctx(code, k, par_ptr, par_idx)
            out[0, ck] += sign * weights[u1, 0] * r0
            out[1, ck] += sign * weights[u1, 1] * r1
    return out_arr


def corr_final_prob_h1(double mu, double sd_x, double slope, double intercept,
                       double sd_cond, double t_lo, double t_hi,
                       double T0_lo, double T0_hi, double T1_lo, double T1_hi,
                       const double[:] brk, const double[:] nodes, const double[:] wts):
    cdef int nb = brk.shape[0], nq = nodes.shape[0], s, j
    cdef double a, c, half, mid, x, z, dens, m, p_in, integrand, acc = 0.0
    with nogil:
        for s in range(nb - 1):
            a = brk[s]
            c = brk[s + 1]
            if c <= a:
                continue
            half = 0.5 * (c - a)
            mid = 0.5 * (c + a)
            for j in range(nq):
                x = mid + half * nodes[j]
                z = (x - mu) / sd_x
                dens = exp(-0.5 * z * z) * INV_SQRT_2PI / sd_x
                m = intercept + slope * x
                p_in = _phi_cdf((t_hi - m) / sd_cond) - _phi_cdf((t_lo - m) / sd_cond)
                integrand = 0.0
                if x < T1_lo or x > T1_hi:
                    integrand += 1.0 - p_in
                if x < T0_lo or x > T0_hi:
                    integrand += p_in
                acc += half * wts[j] * dens * integrand
    return acc
