# cython: language_level=3
"""Compiled inner loops for the monitored-walk amplitudes.

All loops run in a fixed order so that results do not depend on scheduling.
Signatures mirror :mod:`monwalk._pykernels` exactly.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def monitored_amplitudes(const double complex[:, ::1] T,
                         const double complex[::1] row,
                         const double complex[::1] v0,
                         Py_ssize_t m_max):
    """phi(m) = row . T^(m-1) . v0 for m = 1..m_max."""
    cdef Py_ssize_t n = T.shape[0]
    cdef Py_ssize_t m, k, l
    cdef double complex acc
    out_arr = np.empty(m_max, dtype=np.complex128)
    a_arr = np.array(v0, dtype=np.complex128, copy=True)
    b_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex[::1] a = a_arr
    cdef double complex[::1] b = b_arr
    cdef double complex[::1] tmp
    with nogil:
        for m in range(m_max):
            acc = 0
            for k in range(n):
                acc = acc + row[k] * a[k]
            out[m] = acc
            if m + 1 == m_max:
                break
            for k in range(n):
                acc = 0
                for l in range(n):
                    acc = acc + T[k, l] * a[l]
                b[k] = acc
            tmp = a
            a = b
            b = tmp
    return out_arr


def recursion_amplitudes(const double complex[:, ::1] U,
                         Py_ssize_t measured,
                         const double complex[::1] seed,
                         Py_ssize_t m_max):
    """Rows phi_k(m) of the recursion phi(m) = U . Pi . phi(m-1); shape (m_max, n)."""
    cdef Py_ssize_t n = U.shape[0]
    cdef Py_ssize_t m, k, l
    cdef double complex acc
    out_arr = np.empty((m_max, n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    with nogil:
        for k in range(n):
            out[0, k] = seed[k]
        for m in range(1, m_max):
            for k in range(n):
                acc = 0
                for l in range(n):
                    if l != measured:
                        acc = acc + U[k, l] * out[m - 1, l]
                out[m, k] = acc
    return out_arr


def path_sum(const double complex[::1] z2,
             const double complex[::1] q_row,
             const double complex[:, ::1] K,
             const double complex[::1] q_init_conj,
             Py_ssize_t m):
    """Explicit sum over all index paths (j_1..j_m); cost n**m.

    The odometer walks the first m-1 indices; the last index is summed
    through the precomputed contraction ``tail[i] = sum_j K[i,j] z2[j] qc[j]``.
    """
    cdef Py_ssize_t n = z2.shape[0]
    cdef Py_ssize_t d, i, j, depth
    cdef double complex total = 0
    if m < 1:
        raise ValueError("m must be >= 1")
    depth = m - 1
    idx_arr = np.zeros(max(depth, 1), dtype=np.intp)
    pre_arr = np.empty(max(depth, 1), dtype=np.complex128)
    tail_arr = np.zeros(n, dtype=np.complex128)
    cdef Py_ssize_t[::1] idx = idx_arr
    cdef double complex[::1] pre = pre_arr
    cdef double complex[::1] tail = tail_arr
    if depth == 0:
        for j in range(n):
            total = total + z2[j] * q_row[j] * q_init_conj[j]
        return complex(total)
    with nogil:
        for i in range(n):
            for j in range(n):
                tail[i] = tail[i] + K[i, j] * z2[j] * q_init_conj[j]
        # pre[d] holds the product of all factors fixed by idx[0..d]
        pre[0] = z2[0] * q_row[0]
        for d in range(1, depth):
            pre[d] = pre[d - 1] * K[0, 0] * z2[0]
        while True:
            total = total + pre[depth - 1] * tail[idx[depth - 1]]
            # odometer increment from the deepest level
            d = depth - 1
            while d >= 0:
                idx[d] += 1
                if idx[d] < n:
                    break
                idx[d] = 0
                d -= 1
            if d < 0:
                break
            j = idx[d]
            if d == 0:
                pre[0] = z2[j] * q_row[j]
            else:
                pre[d] = pre[d - 1] * K[idx[d - 1], j] * z2[j]
            for d in range(d + 1, depth):
                pre[d] = pre[d - 1] * K[idx[d - 1], 0] * z2[0]
    return complex(total)
