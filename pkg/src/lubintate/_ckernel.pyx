# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled series kernels over int64; callers guarantee mod < 3e9."""
import numpy as np

from libc.stdint cimport int32_t, int64_t


def mul_graded(const int32_t[:] ia, const int64_t[:, :] ca,
               const int32_t[:] ib, const int64_t[:, :] cb,
               const int32_t[:, :] add_table, const int32_t[:] deg, int cap,
               const int64_t[:, :, :] T, int64_t mod, Py_ssize_t m_out):
    cdef Py_ssize_t n = ca.shape[1]
    out = np.zeros((m_out, n), dtype=np.int64)
    cdef int64_t[:, :] o = out
    cdef Py_ssize_t x, y, i, j, k, idx
    cdef int room
    cdef int64_t ab, t, u, v
    for x in range(ia.shape[0]):
        room = cap - deg[ia[x]]
        for y in range(ib.shape[0]):
            if deg[ib[y]] > room:
                break
            idx = add_table[ia[x], ib[y]]
            if idx < 0:
                continue
            if n == 1:
                o[idx, 0] = (o[idx, 0] + (ca[x, 0] * cb[y, 0]) % mod) % mod
                continue
            for i in range(n):
                u = ca[x, i]
                if u == 0:
                    continue
                for j in range(n):
                    v = cb[y, j]
                    if v == 0:
                        continue
                    ab = (u * v) % mod
                    for k in range(n):
                        t = T[i, j, k]
                        if t != 0:
                            o[idx, k] = (o[idx, k] + (ab * t) % mod) % mod
    return out


def mul_dense(const int64_t[:, :] a, const int64_t[:, :] b, Py_ssize_t out_len,
              const int64_t[:, :, :] T, int64_t mod):
    # convolve coordinate pairs first, then apply the table once per output index
    cdef Py_ssize_t n = a.shape[1]
    out = np.zeros((out_len, n), dtype=np.int64)
    cdef int64_t[:, :] o = out
    if out_len <= 0:
        return out
    acc_arr = np.zeros((out_len, n, n), dtype=np.int64)
    cdef int64_t[:, :, :] acc = acc_arr
    cdef Py_ssize_t x, y, i, j, k, top, s
    cdef int64_t u, v, t, r
    # products stay unreduced when their sum cannot overflow
    cdef bint lazy = (mod - 1) <= 3037000499 and (mod - 1) * (mod - 1) <= 9223372036854775807 // (b.shape[0] + 1)
    for x in range(a.shape[0]):
        top = b.shape[0]
        if out_len - x < top:
            top = out_len - x
        for i in range(n):
            u = a[x, i]
            if u == 0:
                continue
            for y in range(top):
                s = x + y
                for j in range(n):
                    v = b[y, j]
                    if v != 0:
                        if lazy:
                            acc[s, i, j] += u * v
                        else:
                            acc[s, i, j] = (acc[s, i, j] + (u * v) % mod) % mod
    for s in range(out_len):
        for i in range(n):
            for j in range(n):
                r = acc[s, i, j] % mod
                if r == 0:
                    continue
                for k in range(n):
                    t = T[i, j, k]
                    if t != 0:
                        o[s, k] = (o[s, k] + (r * t) % mod) % mod
    return out
