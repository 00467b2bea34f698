"""Star-product compute kernels: compiled core with a NumPy fallback.

The dense mode-shift star

    c_k(x) = sum_{n + m = k (mod window)} a_n(x - m l) b_m(x + n l)

is O(X * M^2) and dominates the response pipeline, so it is compiled
(Cython).  Import falls back to a vectorized NumPy implementation when the
extension is unavailable or when ``LATTICEWEYL_DISABLE_EXT=1`` is set.
Sparse operands (few nonzero mode columns, e.g. nearest-neighbor
Hamiltonians) are handled by a roll-based path that skips zero columns.
"""

import os
from functools import lru_cache

import numpy as np

_DISABLED = os.environ.get("LATTICEWEYL_DISABLE_EXT", "") == "1"
try:
    from . import _kernels as _ext
except ImportError:  # pragma: no cover - depends on build environment
    _ext = None


def backend():
    """Name of the active dense-star backend: 'cython' or 'numpy'."""
    return "cython" if (_ext is not None and not _DISABLED) else "numpy"


@lru_cache(maxsize=32)
def _tables(xdims, ndims):
    """Integer shift tables for the flat star loops (C-contiguous int32).

    Mode windows are centered: index i on axis a means value i - ndims[a]//2.
    """
    def combine(tabs, bases):
        out = tabs[0]
        for tab, base in zip(tabs[1:], bases[1:]):
            out = (out[:, None, :, None] * base + tab[None, :, None, :])
            out = out.reshape(out.shape[0] * out.shape[1], -1)
        return out

    d = len(xdims)
    mode_sub_ax, x_sub_ax, x_addk_ax = [], [], []
    for a in range(d):
        nd, xd = ndims[a], xdims[a]
        off = nd // 2
        ks = np.arange(nd)
        js = np.arange(xd)
        mode_sub_ax.append((ks[:, None] - ks[None, :] + off) % nd)
        x_sub_ax.append((js[:, None] - (ks[None, :] - off)) % xd)
        x_addk_ax.append((js[:, None] + (ks[None, :] - off)) % xd)
    mode_sub = combine(mode_sub_ax, ndims)
    x_sub = combine(x_sub_ax, xdims)
    x_addk = combine(x_addk_ax, xdims)
    return (np.ascontiguousarray(mode_sub, dtype=np.int32),
            np.ascontiguousarray(x_sub.T, dtype=np.int32),
            np.ascontiguousarray(x_addk.T, dtype=np.int32))


def star_modes_dense(a2, b2, xdims, ndims, force_fallback=False):
    """Dense star of flat (X, M) scalar mode arrays; returns (X, M)."""
    mode_sub, x_sub_t, x_addk_t = _tables(tuple(xdims), tuple(ndims))
    a2t = np.ascontiguousarray(a2.T, dtype=complex)
    b2t = np.ascontiguousarray(b2.T, dtype=complex)
    if _ext is not None and not _DISABLED and not force_fallback:
        ct = _ext.star_flat(a2t, b2t, mode_sub, x_sub_t, x_addk_t)
        return np.asarray(ct).T.copy()
    m_tot, x_tot = a2t.shape
    ct = np.zeros((m_tot, x_tot), dtype=complex)
    cols = np.arange(m_tot)[:, None]
    for k in range(m_tot):
        ag = a2t[mode_sub[k][:, None], x_sub_t]          # (M, X)
        xb = x_addk_t[k][x_sub_t]                        # (M, X)
        bg = b2t[cols, xb]
        ct[k] = np.einsum("mj,mj->j", ag, bg)
    return ct.T.copy()


def _support(a2):
    return np.flatnonzero(np.abs(a2).sum(axis=0) > 0.0)


def star_modes_sparse(a2, b2, xdims, ndims, supp_a=None, supp_b=None):
    """Roll-based star iterating only over nonzero mode columns."""
    xdims, ndims = tuple(xdims), tuple(ndims)
    offs = np.array([n // 2 for n in ndims])
    if supp_a is None:
        supp_a = _support(a2)
    if supp_b is None:
        supp_b = _support(b2)
    d = len(xdims)
    axes = tuple(range(d))
    c2 = np.zeros_like(a2)
    a_cols = {i: a2[:, i].reshape(xdims) for i in supp_a}
    b_cols = {i: b2[:, i].reshape(xdims) for i in supp_b}
    for ia in supp_a:
        n_win = np.array(np.unravel_index(ia, ndims)) - offs
        for ib in supp_b:
            m_win = np.array(np.unravel_index(ib, ndims)) - offs
            k = np.ravel_multi_index(tuple((n_win + m_win + offs) % ndims),
                                     ndims)
            term = (np.roll(a_cols[ia], tuple(m_win), axis=axes)
                    * np.roll(b_cols[ib], tuple(-n_win), axis=axes))
            c2[:, k] += term.ravel()
    return c2


def star_modes(a2, b2, xdims, ndims):
    """Dense/sparse dispatch for the scalar mode star."""
    supp_a, supp_b = _support(a2), _support(b2)
    if min(len(supp_a), len(supp_b)) <= 8:
        return star_modes_sparse(a2, b2, xdims, ndims, supp_a, supp_b)
    return star_modes_dense(a2, b2, xdims, ndims)
