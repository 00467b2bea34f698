"""Star product, spectral momentum derivatives, traces, and the Groenewold
residual.

The star product is evaluated on mode coefficients by argument shifts,

    (A * B)(x, p) = sum_{n, m} exp(2i p (n+m) l) a_n(x - m l) b_m(x + n l),

with all shifts periodic and output modes folded into the window (exact at
grid momenta).  For W-flavor symbols this reproduces operator composition
exactly; an independent momentum-space rhombus evaluator is provided for
cross-checking.
"""

from itertools import product

import numpy as np

from . import kernels
from .operators import momentum_kernel
from .symbols import (ModeForm, SymbolError, WeylSymbol, from_mode_form,
                      inverse_weyl, to_mode_form)


def _window_dims(g, flavor):
    return g.sites_per_axis if flavor == "C" else g.ext_per_axis


def _flat_coeffs(mf):
    g = mf.geometry
    s = g.internal_dim
    m_tot = int(np.prod(_window_dims(g, mf.flavor)))
    return mf.coefficients.reshape(g.n_ext_sites, m_tot, s, s)


def _result_flavor(fa, fb):
    if fa == "C" or fb == "C":
        if fa != fb:
            raise SymbolError("C-flavor symbols only star with C-flavor")
        return "C"
    if "B" in (fa, fb):
        return "B"
    return "W"


def star_mode_forms(a, b):
    """Star product at the mode-coefficient level (no synthesis)."""
    if a.geometry != b.geometry:
        raise SymbolError("geometry mismatch in star product")
    g = a.geometry
    flavor = _result_flavor(a.flavor, b.flavor)
    xdims = g.ext_per_axis
    ndims = _window_dims(g, flavor)
    s = g.internal_dim
    af, bf = _flat_coeffs(a), _flat_coeffs(b)
    out = np.zeros_like(af)
    for si in range(s):
        for ti in range(s):
            for ui in range(s):
                out[:, :, si, ti] += kernels.star_modes(
                    af[:, :, si, ui], bf[:, :, ui, ti], xdims, ndims)
    shape = xdims + tuple(ndims) + (s, s)
    return ModeForm(g, flavor, out.reshape(shape))


def star(a, b):
    """Star product of two symbols (ModeForm or WeylSymbol inputs)."""
    if isinstance(a, WeylSymbol):
        a = to_mode_form(a)
    if isinstance(b, WeylSymbol):
        b = to_mode_form(b)
    return from_mode_form(star_mode_forms(a, b))


def star_rhombus(a, b):
    """Independent momentum-space star evaluator (W flavor).

    Uses the doubling-factor-weighted double momentum sum over the rhombus
    domain of kernel arguments:

    (A*B)(x, p) = (1/4^D) sum_{P, R} e^{2i P.x} f(P)
                  K_A(p + P, p - R) K_B(p - R, p - P).
    """
    g = a.geometry
    if a.flavor != "W" or b.flavor != "W":
        raise SymbolError("rhombus evaluator is defined for W-flavor symbols")
    ka = momentum_kernel(inverse_weyl(a)).values
    kb = momentum_kernel(inverse_weyl(b)).values
    d, s = g.dim, g.internal_dim
    m_tot, x_tot = g.n_momenta, g.n_ext_sites

    # per-axis index tables and values
    add_ax, sub_ax, p_ax, x_ax = [], [], [], []
    for ax in range(d):
        n = g.sites_per_axis[ax]
        i = np.arange(2 * n)
        add_ax.append((i[:, None] + i[None, :] + 1 - n) % (2 * n))
        sub_ax.append((i[:, None] - i[None, :] + n - 1) % (2 * n))
        p_ax.append(g.momenta(ax))
        x_ax.append(g.ext_positions(ax))

    def flat(per_axis_idx):
        return np.ravel_multi_index(tuple(per_axis_idx), g.ext_per_axis)

    p_multi = list(np.ndindex(*g.ext_per_axis))
    out = np.zeros((x_tot, m_tot, s, s), dtype=complex)
    idx_all = np.array(p_multi)                      # (m_tot, d)
    for ip, ip_multi in enumerate(p_multi):
        pvec = np.array([p_ax[ax][ip_multi[ax]] for ax in range(d)])
        f_p = g.doubling_factor(pvec)
        phase = np.ones(1, dtype=complex)
        for ax in range(d):
            phase = np.kron(phase, np.exp(2j * pvec[ax] * x_ax[ax]))
        p_plus = flat([add_ax[ax][idx_all[:, ax], ip_multi[ax]]
                       for ax in range(d)])
        p_minus_p = flat([sub_ax[ax][idx_all[:, ax], ip_multi[ax]]
                          for ax in range(d)])
        for ir, ir_multi in enumerate(p_multi):
            p_minus_r = flat([sub_ax[ax][idx_all[:, ax], ir_multi[ax]]
                              for ax in range(d)])
            term = np.einsum("pst,ptu->psu", ka[p_plus, p_minus_r],
                             kb[p_minus_r, p_minus_p])
            out += f_p * phase[:, None, None, None] * term[None]
    out /= 4.0 ** d
    shape = g.ext_per_axis + g.ext_per_axis + (s, s)
    return WeylSymbol(g, "W", out.reshape(shape))


def dp(sym, axis):
    """Spectral momentum derivative: mode n multiplied by 2 i n l."""
    as_symbol = isinstance(sym, WeylSymbol)
    mf = to_mode_form(sym) if as_symbol else sym
    g = mf.geometry
    ndims = _window_dims(g, mf.flavor)
    win = np.arange(ndims[axis]) - ndims[axis] // 2
    factor = 2j * win * g.half_spacing[axis]
    shape = [1] * mf.coefficients.ndim
    shape[g.dim + axis] = ndims[axis]
    coeff = mf.coefficients * factor.reshape(shape)
    out = ModeForm(g, mf.flavor, coeff)
    return from_mode_form(out) if as_symbol else out


def pointwise_product(a, b):
    """Plain (non-star) pointwise product with orbital matrix multiply."""
    if a.geometry != b.geometry or a.flavor != b.flavor:
        raise SymbolError("symbol mismatch in pointwise product")
    vals = np.einsum("...st,...tu->...su", a.values, b.values)
    return WeylSymbol(a.geometry, a.flavor, vals)


def _orbital_trace(values):
    return np.einsum("...ss->...", values)


def trace_fO(sym):
    """Doubled-lattice trace; equals tr(Q) for the symbol of Q (any flavor)."""
    g = sym.geometry
    total = _orbital_trace(sym.values).sum()
    if sym.flavor in ("W", "SERIES"):
        return complex(total / (2 ** g.dim * g.n_momenta))
    if sym.flavor == "B":
        return complex(total / g.n_momenta)
    return complex(total / (2 ** g.dim * g.n_phys_sites))   # C flavor


def trace_cO(sym):
    """Physical-lattice trace (even x rows only); satisfies the first trace
    identity but not the product-trace identity."""
    g = sym.geometry
    total = _orbital_trace(sym.phys_rows()).sum()
    if sym.flavor in ("W", "SERIES", "B"):
        return complex(total / g.n_momenta)
    return complex(total / g.n_phys_sites)                  # C flavor


def mode_pair_trace(a, b):
    """trace_fO of the pointwise product, computed in mode space.

    Momentum summation pairs mode n with mode -n (the centered-window edge
    mode pairs with itself).  Fine-window flavors only.
    """
    if a.geometry != b.geometry:
        raise SymbolError("geometry mismatch")
    g = a.geometry
    af, bf = _flat_coeffs(a), _flat_coeffs(b)
    ndims = _window_dims(g, a.flavor)
    pair = np.zeros(int(np.prod(ndims)), dtype=int)
    idx = np.arange(int(np.prod(ndims)))
    multi = np.array(np.unravel_index(idx, ndims))
    neg = tuple((-(multi[ax])) % ndims[ax] for ax in range(len(ndims)))
    pair = np.ravel_multi_index(neg, ndims)
    val = np.einsum("xmst,xmts->", af, bf[:, pair])
    return complex(val / 2 ** g.dim)


def groenewold_residual(q_sym, g_sym):
    """max |(Q * G)(x,p) - 1| over the full grid (identity = unit matrix)."""
    r = star(q_sym, g_sym).values.copy()
    s = q_sym.geometry.internal_dim
    for orb in range(s):
        r[..., orb, orb] -= 1.0
    return float(np.abs(r).max())
