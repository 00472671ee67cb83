"""Pure numpy implementations of the hot loops (fallback for ``_kernels``)."""

import itertools

import numpy as np


def monitored_amplitudes(T, row, v0, m_max):
    """phi(m) = row . T^(m-1) . v0 for m = 1..m_max."""
    T = np.asarray(T, dtype=np.complex128)
    row = np.asarray(row, dtype=np.complex128)
    v = np.array(v0, dtype=np.complex128, copy=True)
    out = np.empty(m_max, dtype=np.complex128)
    for m in range(m_max):
        out[m] = row @ v
        if m + 1 < m_max:
            v = T @ v
    return out


def recursion_amplitudes(U, measured, seed, m_max):
    """Rows phi_k(m) of the recursion phi(m) = U . Pi . phi(m-1); shape (m_max, n)."""
    U = np.asarray(U, dtype=np.complex128)
    n = U.shape[0]
    out = np.empty((m_max, n), dtype=np.complex128)
    out[0] = seed
    keep = np.ones(n, dtype=bool)
    keep[measured] = False
    U_kept = np.ascontiguousarray(U[:, keep])
    for m in range(1, m_max):
        out[m] = U_kept @ out[m - 1, keep]
    return out


def path_sum(z2, q_row, K, q_init_conj, m):
    """Explicit sum over all index paths (j_1..j_m); cost n**m.

    Prefixes (j_1..j_{m-1}) are enumerated one by one; the last index is
    summed as an elementwise product over the n final steps.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    z2 = np.asarray(z2, dtype=np.complex128)
    q_row = np.asarray(q_row, dtype=np.complex128)
    K = np.asarray(K, dtype=np.complex128)
    tail = z2 * np.asarray(q_init_conj, dtype=np.complex128)
    n = len(z2)
    if m == 1:
        return complex(np.sum(q_row * tail))
    step = K * z2[None, :]
    total = 0j
    for prefix in itertools.product(range(n), repeat=m - 1):
        j = prefix[0]
        p = z2[j] * q_row[j]
        for nxt in prefix[1:]:
            p = p * step[j, nxt]
            j = nxt
        total += complex(np.sum(p * K[j] * tail))
    return total
