"""Operator symbols on the doubled lattice: W, B (degenerate), C (continuum
diagnostic), and the series construction, plus the inverse W-transform.

Data layout
-----------
Symbols of the W/B/SERIES flavors are dense complex fields of shape

    (2N_0, ..., 2N_{D-1},  2N_0, ..., 2N_{D-1},  S, S)
        x on doubled grid      p on momentum grid   orbitals

The C flavor keeps x on the doubled grid but p on the physical-zone grid
(N_j points per axis).

The exact transform is a scatter: an operator entry <x1|Q|x2> with per-axis
site indices (k1, k2) contributes to Fourier mode n = k2 - k1 at doubled-grid
rows j in {k1+k2, k1+k2+1} (mod 2N) per axis for the W flavor, and at
j = k1+k2 only for the B flavor.  This reproduces the quadrature-form
transforms exactly and is what makes every algebraic identity close at
machine precision.
"""

import csv
from itertools import product
from math import comb

import numpy as np

from .operators import LatticeOperator, MomentumKernel, momentum_kernel

FLAVORS = ("W", "B", "C", "SERIES")


class SymbolError(ValueError):
    """Raised for malformed or incompatible symbol input."""


class ReconstructionError(SymbolError):
    """Symbol is not in the image of the W-transform."""

    def __init__(self, residual, tol):
        self.residual = residual
        self.tol = tol
        super().__init__("inverse transform residual %.3e exceeds tolerance "
                         "%.3e; symbol not in the W-image" % (residual, tol))


class WeylSymbol:
    """Complex phase-space field tagged by flavor."""

    def __init__(self, geometry, flavor, values):
        if flavor not in FLAVORS:
            raise SymbolError("unknown flavor %r" % (flavor,))
        values = np.asarray(values, dtype=complex)
        if values.shape != _symbol_shape(geometry, flavor):
            raise SymbolError("values shape %r invalid for flavor %s (want %r)"
                              % (values.shape, flavor,
                                 _symbol_shape(geometry, flavor)))
        self.geometry = geometry
        self.flavor = flavor
        self.values = values

    def coarse_view(self):
        """Symbol on the physical phase-space grid: x on the doubled lattice,
        p in the physical zone.

        The internal field uses the half-spaced momentum grid, on which the
        doubled-lattice algebra closes exactly.  Folding the integration back
        to the physical zone is equivalent to averaging the field over the
        half-period coordinate shift x -> x + N*l per axis before sampling
        the physical-zone momentum columns, which is what this returns.  The
        textbook closed forms (identity, hops, functions of momentum) hold on
        this view at every point.
        """
        if self.flavor == "C":
            return self.values
        g = self.geometry
        d = g.dim
        v = self.values
        for a in range(d):
            v = (v + np.roll(v, -g.sites_per_axis[a], axis=a)) / 2
        sl = (slice(None),) * d + (slice(1, None, 2),) * d
        return v[sl]

    def fine_view(self):
        """Raw field on the full half-spaced momentum grid (all columns)."""
        return self.values

    def phys_rows(self):
        """Symbol restricted to physical-lattice rows (even x indices)."""
        d = self.geometry.dim
        sl = (slice(None, None, 2),) * d
        return self.values[sl]

    def _binary(self, other, fn):
        if not isinstance(other, WeylSymbol):
            return WeylSymbol(self.geometry, self.flavor, fn(self.values, other))
        if self.geometry != other.geometry or self.flavor != other.flavor:
            raise SymbolError("symbol geometry/flavor mismatch")
        return WeylSymbol(self.geometry, self.flavor,
                          fn(self.values, other.values))

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, scalar):
        return WeylSymbol(self.geometry, self.flavor, self.values * scalar)

    __rmul__ = __mul__


class ModeForm:
    """Fourier-mode representation F(x, p) = sum_n exp(2i p.n l) f_n(x).

    ``coefficients`` has shape (x axes..., mode axes..., S, S); the mode
    window is n_j in [-N_j, N_j) for fine flavors (stored at offset +N_j)
    and n_j in [-N_j/2, N_j/2) for the C flavor (offset +N_j/2).
    """

    def __init__(self, geometry, flavor, coefficients):
        self.geometry = geometry
        self.flavor = flavor
        self.coefficients = np.asarray(coefficients, dtype=complex)
        want = _mode_shape(geometry, flavor)
        if self.coefficients.shape != want:
            raise SymbolError("mode coefficients shape %r invalid (want %r)"
                              % (self.coefficients.shape, want))


class SymbolSeries:
    """Coefficient functions Q_k(p) of a polynomial-in-x operator series.

    ``coefficients`` has shape (n_max+1, N, S, S) over the physical-zone
    momentum grid (1D geometries only).
    """

    def __init__(self, geometry, coefficients):
        if geometry.dim != 1:
            raise SymbolError("SymbolSeries supports 1D geometries only")
        coefficients = np.asarray(coefficients, dtype=complex)
        n = geometry.sites_per_axis[0]
        s = geometry.internal_dim
        if coefficients.ndim != 4 or coefficients.shape[1:] != (n, s, s):
            raise SymbolError("coefficients must have shape (n_max+1, N, S, S)")
        if coefficients.shape[0] > 5:
            raise SymbolError("n_max <= 4 supported")
        self.geometry = geometry
        self.coefficients = coefficients


# --------------------------------------------------------------------------
# shapes and phase tables
# --------------------------------------------------------------------------

def _symbol_shape(g, flavor):
    s = g.internal_dim
    if flavor == "C":
        return g.ext_per_axis + g.sites_per_axis + (s, s)
    return g.ext_per_axis + g.ext_per_axis + (s, s)


def _mode_shape(g, flavor):
    s = g.internal_dim
    if flavor == "C":
        return g.ext_per_axis + g.sites_per_axis + (s, s)
    return g.ext_per_axis + g.ext_per_axis + (s, s)


def _synthesis_matrix(g, axis, flavor):
    """Phase matrix P[p_idx, n_idx] = exp(2i p n l) for one axis."""
    l = g.half_spacing[axis]
    if flavor == "C":
        p = g.coarse_momenta(axis)
        n = g.sites_per_axis[axis]
        win = np.arange(-(n // 2), n // 2)
    else:
        p = g.momenta(axis)
        win = g.mode_window(axis)
    return np.exp(2j * np.outer(p, win) * l)


def from_mode_form(mf):
    """Synthesize the symbol field from its mode coefficients (exact)."""
    g = mf.geometry
    if g.dim == 1:
        ph = _synthesis_matrix(g, 0, mf.flavor)
        vals = np.einsum("xnst,pn->xpst", mf.coefficients, ph)
    else:
        ph0 = _synthesis_matrix(g, 0, mf.flavor)
        ph1 = _synthesis_matrix(g, 1, mf.flavor)
        vals = np.einsum("xyuvst,pu,qv->xypqst", mf.coefficients, ph0, ph1,
                         optimize=True)
    return WeylSymbol(g, mf.flavor, vals)


def to_mode_form(sym):
    """Exact discrete Fourier analysis of a symbol in p at fixed x."""
    g = sym.geometry
    if g.dim == 1:
        ph = _synthesis_matrix(g, 0, sym.flavor)
        coeff = np.einsum("xpst,pn->xnst", sym.values, ph.conj()) / ph.shape[0]
    else:
        ph0 = _synthesis_matrix(g, 0, sym.flavor)
        ph1 = _synthesis_matrix(g, 1, sym.flavor)
        coeff = np.einsum("xypqst,pu,qv->xyuvst", sym.values,
                          ph0.conj(), ph1.conj(), optimize=True)
        coeff /= ph0.shape[0] * ph1.shape[0]
    return ModeForm(g, sym.flavor, coeff)


# --------------------------------------------------------------------------
# W and B transforms (exact scatter)
# --------------------------------------------------------------------------

def _scatter_mode_form(op, flavor):
    g = op.geometry
    s, ns, d = g.internal_dim, g.n_phys_sites, g.dim
    n_arr = np.array(g.sites_per_axis)
    krn = op.kernel.reshape(ns, s, ns, s).transpose(0, 2, 1, 3)  # (a, b, S, S)
    coords = g.site_coords()                                     # (ns, dim)
    k1 = coords[:, None, :]
    k2 = coords[None, :, :]
    n_idx = (k2 - k1) + n_arr          # mode index per axis, in [0, 2N)
    sigma = (k1 + k2) % (2 * n_arr)
    nflat = np.ravel_multi_index(tuple(n_idx[..., a] for a in range(d)),
                                 g.ext_per_axis).ravel()
    vals = krn.reshape(-1, s, s)

    coeffs = np.zeros((g.n_ext_sites, g.n_ext_sites, s, s), dtype=complex)
    offsets = [(0,) * d] if flavor == "B" else list(product((0, 1), repeat=d))
    for off in offsets:
        rows = (sigma + np.array(off)) % (2 * n_arr)
        xflat = np.ravel_multi_index(tuple(rows[..., a] for a in range(d)),
                                     g.ext_per_axis).ravel()
        np.add.at(coeffs, (xflat, nflat), vals)
    return ModeForm(g, flavor, coeffs.reshape(_mode_shape(g, flavor)))


def weyl_mode_form(op):
    """Mode coefficients of the W-symbol (scatter construction, exact)."""
    return _scatter_mode_form(op, "W")


def weyl_symbol(op):
    """Exact W-symbol of a lattice operator on the full doubled grid."""
    return from_mode_form(_scatter_mode_form(op, "W"))


def buot_symbol(op):
    """Degenerate lattice symbol: x-support only on rows j = k1+k2."""
    return from_mode_form(_scatter_mode_form(op, "B"))


# --------------------------------------------------------------------------
# C flavor (continuum-style diagnostic transform)
# --------------------------------------------------------------------------

def continuum_symbol(op):
    """Continuum-convention symbol: half-momentum convolution of the kernel.

    C(x, p) = sum_q exp(i x.q) <p + q/2| Q |p - q/2> with p on the
    physical-zone grid and the momentum transfer q restricted to even
    multiples of the zone spacing, so both shifted arguments stay on the
    physical-zone grid (the Bloch matrix elements there are alias-free;
    no interpolation is involved).  Homogeneous operators f(p-hat) map to
    the x-independent field f(p) exactly; the algebra is satisfied only
    approximately (weak-field diagnostic).
    """
    g = op.geometry
    kv = momentum_kernel(op).values
    s = g.internal_dim
    if g.dim == 1:
        n = g.sites_per_axis[0]
        kc = kv[1::2, 1::2]                    # physical-zone Bloch kernel
        x = g.ext_positions(0)
        qc = g.coarse_momenta(0)
        ip = np.arange(n)                      # coarse p index
        out = np.zeros((2 * n, n, s, s), dtype=complex)
        for iq in range(n):
            half = iq + 1 - n // 2             # q / (zone spacing)
            if half % 2:
                continue                       # p +- q/2 would leave the grid
            pplus = (ip + half // 2) % n
            pminus = (ip - half // 2) % n
            phase = np.exp(1j * x * qc[iq])
            out += phase[:, None, None, None] * kc[pplus, pminus][None]
        return WeylSymbol(g, "C", out)
    nx, ny = g.sites_per_axis
    xg = g.ext_positions(0)
    yg = g.ext_positions(1)
    qcx = g.coarse_momenta(0)
    qcy = g.coarse_momenta(1)
    ipx = np.arange(nx)[:, None]
    ipy = np.arange(ny)[None, :]
    out = np.zeros((2 * nx, 2 * ny, nx, ny, s, s), dtype=complex)
    for iqx in range(nx):
        hx = iqx + 1 - nx // 2
        if hx % 2:
            continue
        ppx = (ipx + hx // 2) % nx
        pmx = (ipx - hx // 2) % nx
        phx = np.exp(1j * xg * qcx[iqx])
        for iqy in range(ny):
            hy = iqy + 1 - ny // 2
            if hy % 2:
                continue
            ppy = (ipy + hy // 2) % ny
            pmy = (ipy - hy // 2) % ny
            phy = np.exp(1j * yg * qcy[iqy])
            pp = ((2 * ppx + 1) * (2 * ny) + 2 * ppy + 1).ravel()
            pm = ((2 * pmx + 1) * (2 * ny) + 2 * pmy + 1).ravel()
            block = kv[pp, pm].reshape(nx, ny, s, s)
            out += (phx[:, None, None, None, None, None]
                    * phy[None, :, None, None, None, None]
                    * block[None, None])
    return WeylSymbol(g, "C", out)


# --------------------------------------------------------------------------
# series symbol (1D)
# --------------------------------------------------------------------------

def series_symbol(series):
    """Symbol of sum_k x^k Q_k(p-hat) built from the coefficient series.

    Output is x^n-ordered with momentum-derivative corrections
    q_n(p) = sum_{k >= n} C(k, n) (i d_p / 2)^{k-n} Q_k(p), derivatives taken
    spectrally on the physical-zone grid; agrees with the integral W-symbol
    away from the coordinate wrap.
    """
    g = series.geometry
    n = g.sites_per_axis[0]
    l = g.half_spacing[0]
    s = g.internal_dim
    n_max = series.coefficients.shape[0] - 1
    pc = g.coarse_momenta(0)
    pf = g.momenta(0)
    win = np.arange(-(n // 2), n // 2)
    analysis = np.exp(-2j * np.outer(win, pc) * l) / n     # (modes, p)
    # coarse-grid modes of each Q_k
    cmodes = np.einsum("mp,kpst->kmst", analysis, series.coefficients)
    synth = np.exp(2j * np.outer(pf, win) * l)             # (p_fine, modes)
    x = g.ext_positions(0)
    vals = np.zeros((2 * n, 2 * n, s, s), dtype=complex)
    for order in range(n_max + 1):
        qn = np.zeros((2 * n, s, s), dtype=complex)
        for k in range(order, n_max + 1):
            # (i d_p / 2)^(k-order) acts as (-m l)^(k-order) on mode m
            factor = comb(k, order) * (-win * l) ** (k - order)
            qn += np.einsum("pm,mst->pst", synth * factor[None, :],
                            cmodes[k])
        vals += (x ** order)[:, None, None, None] * qn[None]
    return WeylSymbol(g, "SERIES", vals)


# --------------------------------------------------------------------------
# inverse W-transform
# --------------------------------------------------------------------------

def inverse_weyl(sym, tol=1e-8):
    """Reconstruct the operator whose W-symbol is ``sym``.

    Each operator entry appears as 2^dim identical copies in the mode
    coefficients; they are averaged, and the reconstruction residual (max
    deviation between the re-transformed symbol and the input, relative to
    the input scale) is checked against ``tol``.  Symbols outside the image
    of the W-transform raise :class:`ReconstructionError`.
    """
    if sym.flavor not in ("W", "SERIES"):
        raise SymbolError("inverse transform defined for W-flavor symbols")
    g = sym.geometry
    s, ns, d = g.internal_dim, g.n_phys_sites, g.dim
    n_arr = np.array(g.sites_per_axis)
    mf = to_mode_form(sym)
    cf = mf.coefficients.reshape(g.n_ext_sites, g.n_ext_sites, s, s)

    coords = g.site_coords()
    k1 = coords[:, None, :]
    k2 = coords[None, :, :]
    n_idx = (k2 - k1) + n_arr
    sigma = (k1 + k2) % (2 * n_arr)
    nflat = np.ravel_multi_index(tuple(n_idx[..., a] for a in range(d)),
                                 g.ext_per_axis).ravel()
    copies = []
    for off in product((0, 1), repeat=d):
        rows = (sigma + np.array(off)) % (2 * n_arr)
        xflat = np.ravel_multi_index(tuple(rows[..., a] for a in range(d)),
                                     g.ext_per_axis).ravel()
        copies.append(cf[xflat, nflat])
    mean = np.mean(copies, axis=0)                         # (ns*ns, S, S)
    krn = mean.reshape(ns, ns, s, s).transpose(0, 2, 1, 3)
    op = LatticeOperator(g, krn.reshape(g.matrix_dim, g.matrix_dim))

    scale = max(1.0, float(np.abs(sym.values).max()))
    resid = float(np.abs(weyl_symbol(op).values - sym.values).max()) / scale
    if resid > tol:
        raise ReconstructionError(resid, tol)
    return op


# --------------------------------------------------------------------------
# export
# --------------------------------------------------------------------------

def export_csv(sym, path):
    """Write the physical-grid symbol as rows (x idx, p idx, orbitals, re, im).

    Exports the :meth:`WeylSymbol.coarse_view` field: x on the doubled
    lattice, p on the physical-zone grid, where the closed-form expressions
    hold pointwise.
    """
    g = sym.geometry
    d = g.dim
    vals = sym.coarse_view()
    header = (["x%d" % a for a in range(d)] + ["p%d" % a for a in range(d)]
              + ["s", "t", "re", "im"])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for idx in np.ndindex(vals.shape):
            v = vals[idx]
            writer.writerow(list(idx) + [repr(float(v.real)),
                                         repr(float(v.imag))])
