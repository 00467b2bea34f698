# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loop for the dense mode-shift star product.

Operates on transposed (mode, x) layouts with precomputed integer shift
tables so every inner-loop access is contiguous up to the periodic wrap.
"""

import numpy as np


def star_flat(const double complex[:, ::1] a2t,
              const double complex[:, ::1] b2t,
              const int[:, ::1] mode_sub,
              const int[:, ::1] x_sub_t,
              const int[:, ::1] x_addk_t):
    """c_k(x) = sum_m a_{k-m}(x - m) b_m(x + k - m), all indices periodic.

    a2t, b2t: (M, X) mode-major coefficient arrays.
    mode_sub[k, m]: flat mode index of the folded difference k - m.
    x_sub_t[m, j]: flat x index of j shifted by -m.
    x_addk_t[k, u]: flat x index of u shifted by +k.
    Returns the (M, X) mode-major output coefficients.
    """
    cdef Py_ssize_t m_tot = a2t.shape[0]
    cdef Py_ssize_t x_tot = a2t.shape[1]
    out = np.zeros((m_tot, x_tot), dtype=np.complex128)
    cdef double complex[:, ::1] ct = out
    cdef Py_ssize_t k, m, j
    cdef int ms, u
    for k in range(m_tot):
        for m in range(m_tot):
            ms = mode_sub[k, m]
            for j in range(x_tot):
                u = x_sub_t[m, j]
                ct[k, j] = ct[k, j] + a2t[ms, u] * b2t[m, x_addk_t[k, u]]
    return out
