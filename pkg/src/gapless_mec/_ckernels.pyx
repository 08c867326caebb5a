# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport abs as cabs

cnp.import_array()


def partition_costs(S, masks, extra_a, extra_b):
    cdef const signed char[:, ::1] s = np.ascontiguousarray(S, dtype=np.int8)
    cdef const long long[::1] mk = np.ascontiguousarray(masks, dtype=np.int64)
    cdef const long long[::1] ea = np.ascontiguousarray(extra_a, dtype=np.int64)
    cdef const long long[::1] eb = np.ascontiguousarray(extra_b, dtype=np.int64)
    cdef Py_ssize_t n = s.shape[0], m = s.shape[1], k = mk.shape[0]
    cdef Py_ssize_t i, j, t
    cdef long long mask, total, sa, ca, sb, cb
    cdef long long[::1] tot_sum = np.zeros(m, dtype=np.int64)
    cdef long long[::1] tot_cnt = np.zeros(m, dtype=np.int64)
    cdef long long[::1] col_sa = np.zeros(m, dtype=np.int64)
    cdef long long[::1] col_ca = np.zeros(m, dtype=np.int64)
    out = np.empty(k, dtype=np.int64)
    cdef long long[::1] res = out
    for i in range(n):
        for j in range(m):
            tot_sum[j] += s[i, j]
            tot_cnt[j] += cabs(s[i, j])
    with nogil:
        for t in range(k):
            mask = mk[t]
            total = 0
            for j in range(m):
                col_sa[j] = 0
                col_ca[j] = 0
            for i in range(n):
                if (mask >> i) & 1:
                    total += ea[i]
                    for j in range(m):
                        col_sa[j] += s[i, j]
                        col_ca[j] += cabs(s[i, j])
                else:
                    total += eb[i]
            for j in range(m):
                sa = col_sa[j]
                ca = col_ca[j]
                sb = tot_sum[j] - sa
                cb = tot_cnt[j] - ca
                total += (ca - (sa if sa >= 0 else -sa) + cb - (sb if sb >= 0 else -sb)) // 2
            res[t] = total
    return out


def pair_cost_matrix(D):
    cdef const long long[:, ::1] d = np.ascontiguousarray(D, dtype=np.int64)
    cdef Py_ssize_t n = d.shape[0], P = d.shape[1]
    cdef Py_ssize_t i, a, b
    cdef long long acc, x, y
    out = np.full((P, P), -1, dtype=np.int64)
    cdef long long[:, ::1] res = out
    cdef long long[:, ::1] dt = np.ascontiguousarray(np.asarray(D, dtype=np.int64).T)
    with nogil:
        for a in range(P):
            for b in range(a, P):
                acc = 0
                for i in range(n):
                    x = dt[a, i]
                    y = dt[b, i]
                    acc += x if x < y else y
                res[a, b] = acc
    return out
