"""Lattice operators, momentum-space kernels, and the Fourier bridge.

A :class:`LatticeOperator` is a dense complex matrix over
(physical site, orbital) pairs.  Its momentum kernel is

    Q(p, q) = (1/N_s) sum_{x1, x2} <x1|Q|x2> exp(i (x2.q - x1.p)),

sampled on the full symbol momentum grid (2N_j points per axis).  The
kernel is pi/l_j-periodic in each argument, so this grid supports exact
index arithmetic for all momentum shifts used by the symbol transforms.
"""

import json

import numpy as np

from .geometry import LatticeGeometry, make_geometry


class OperatorError(ValueError):
    """Raised for malformed operator input."""


class LatticeOperator:
    """Dense operator kernel over (site, orbital) x (site, orbital).

    The flat index is row-major: ``(site_multi_index) * S + orbital``.
    """

    def __init__(self, geometry, kernel):
        kernel = np.asarray(kernel, dtype=complex)
        m = geometry.matrix_dim
        if kernel.shape != (m, m):
            raise OperatorError("kernel shape %r does not match geometry "
                                "matrix dimension %d" % (kernel.shape, m))
        self.geometry = geometry
        self.kernel = kernel

    def is_hermitian(self, tol=1e-12):
        return np.abs(self.kernel - self.kernel.conj().T).max() <= tol

    def __add__(self, other):
        self._check(other)
        return LatticeOperator(self.geometry, self.kernel + other.kernel)

    def __sub__(self, other):
        self._check(other)
        return LatticeOperator(self.geometry, self.kernel - other.kernel)

    def __matmul__(self, other):
        self._check(other)
        return LatticeOperator(self.geometry, self.kernel @ other.kernel)

    def __mul__(self, scalar):
        return LatticeOperator(self.geometry, self.kernel * scalar)

    __rmul__ = __mul__

    def _check(self, other):
        if self.geometry != other.geometry:
            raise OperatorError("geometry mismatch")

    # ----- serialization --------------------------------------------------
    def to_json_dict(self):
        """Documented JSON schema: geometry block + (re, im) kernel arrays."""
        return {"schema_version": 1,
                "geometry": self.geometry.to_dict(),
                "kernel": {"re": self.kernel.real.tolist(),
                           "im": self.kernel.imag.tolist()}}

    def save_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def from_json_dict(cls, d):
        geom = LatticeGeometry.from_dict(d["geometry"])
        kernel = (np.asarray(d["kernel"]["re"], dtype=float)
                  + 1j * np.asarray(d["kernel"]["im"], dtype=float))
        return cls(geom, kernel)

    @classmethod
    def load_json(cls, path):
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def identity_operator(geometry):
    return LatticeOperator(geometry, np.eye(geometry.matrix_dim, dtype=complex))


def shift_operator(geometry, axis=0, steps=1):
    """Shift by ``steps`` physical sites along ``axis``: <x|S|y> = d_{y, x+2l}."""
    ns, s_orb = geometry.n_phys_sites, geometry.internal_dim
    coords = geometry.site_coords()
    dest = coords.copy()
    dest[:, axis] = (dest[:, axis] + steps) % geometry.sites_per_axis[axis]
    src = np.ravel_multi_index(coords.T, geometry.sites_per_axis)
    dst = np.ravel_multi_index(dest.T, geometry.sites_per_axis)
    kernel = np.zeros((ns * s_orb, ns * s_orb), dtype=complex)
    for orb in range(s_orb):
        kernel[src * s_orb + orb, dst * s_orb + orb] = 1.0
    return LatticeOperator(geometry, kernel)


class MomentumKernel:
    """Momentum-space kernel Q(p, q) over the full symbol momentum grid.

    ``values`` has shape (n_momenta, n_momenta, S, S) with the momentum
    multi-index flattened row-major over axes.
    """

    def __init__(self, geometry, values):
        values = np.asarray(values, dtype=complex)
        m, s_orb = geometry.n_momenta, geometry.internal_dim
        if values.shape != (m, m, s_orb, s_orb):
            raise OperatorError("kernel values shape %r invalid"
                                % (values.shape,))
        self.geometry = geometry
        self.values = values


def _phase_matrix(geometry):
    """E[p_flat, site_flat] = exp(-i p.x) over fine momenta x physical sites."""
    mats = []
    for axis in range(geometry.dim):
        p = geometry.momenta(axis)
        x = geometry.phys_positions(axis)
        mats.append(np.exp(-1j * np.outer(p, x)))
    e = mats[0]
    for m in mats[1:]:
        e = np.kron(e, m)
    return e


def momentum_kernel(op):
    """Forward Fourier transform of a lattice operator."""
    g = op.geometry
    ns, s_orb = g.n_phys_sites, g.internal_dim
    krn = op.kernel.reshape(ns, s_orb, ns, s_orb)
    e = _phase_matrix(g)                  # (Mtot, ns), rows e^{-i p x}
    eq = e.conj().T                       # (ns, Mtot), cols e^{+i x q}
    vals = np.einsum("pa,asbt,bq->pqst", e, krn, eq, optimize=True) / ns
    return MomentumKernel(g, vals)


def kernel_to_operator(k):
    """Exact inverse of :func:`momentum_kernel` on the grid."""
    g = k.geometry
    ns, s_orb, mtot = g.n_phys_sites, g.internal_dim, g.n_momenta
    e = _phase_matrix(g)
    krn = np.einsum("pa,pqst,bq->asbt", e.conj(), k.values, e.T,
                    optimize=True) * (ns / mtot**2)
    return LatticeOperator(g, krn.reshape(ns * s_orb, ns * s_orb))


def spectral_gap(h, mu):
    """min_j |eps_j - mu| over the eigenvalues of a Hermitian operator."""
    if not h.is_hermitian(tol=1e-10):
        raise OperatorError("spectral_gap requires a Hermitian operator")
    evals = np.linalg.eigvalsh(h.kernel)
    return float(np.abs(evals - mu).min())
