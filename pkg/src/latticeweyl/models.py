"""Model Hamiltonian builders: Hofstadter at rational flux, inhomogeneous
flux fields, a dimerized chain, and seeded gap-preserving perturbations.

Magnetic fields enter through link phases (Peierls substitution); the
per-plaquette flux equals the discrete curl of the link phases modulo one
flux quantum.  The default homogeneous gauge puts phase 2*pi*phi*ix on the
y-link at column ix.
"""

from fractions import Fraction

import numpy as np

from .operators import LatticeOperator, spectral_gap


class ModelError(ValueError):
    """Raised for inconsistent model parameters."""


class GapClosedError(ModelError):
    """Raised when a perturbation closes the spectral gap."""

    def __init__(self, gap, threshold):
        self.gap = gap
        self.threshold = threshold
        super().__init__("perturbation closed the gap: %.3e < %.3e"
                         % (gap, threshold))


class ModelSpec:
    """Bundled description of a model for reporting and oracle evaluation."""

    def __init__(self, geometry, kind, t, mu, flux=None, flux_field=None,
                 params=None):
        self.geometry = geometry
        self.kind = kind
        self.t = t
        self.mu = mu
        self.flux = flux                     # Fraction for homogeneous flux
        self.flux_field = flux_field         # (Nx, Ny) array, per plaquette
        self.params = dict(params or {})


def _as_fraction(flux):
    if isinstance(flux, Fraction):
        return flux
    if isinstance(flux, (tuple, list)) and len(flux) == 2:
        return Fraction(int(flux[0]), int(flux[1]))
    raise ModelError("flux must be a Fraction or (p, q) pair, got %r"
                     % (flux,))


def _square_lattice_hamiltonian(geometry, t, mu, x_link_phase, y_link_phase):
    """Nearest-neighbor Hamiltonian from per-link phase arrays (Nx, Ny)."""
    nx, ny = geometry.sites_per_axis
    h = np.zeros((geometry.matrix_dim,) * 2, dtype=complex)

    def site(ix, iy):
        return ix * ny + iy

    for ix in range(nx):
        for iy in range(ny):
            a = site(ix, iy)
            h[a, a] = -mu
            b = site((ix + 1) % nx, iy)
            amp = -t * np.exp(1j * x_link_phase[ix, iy])
            h[a, b] += amp
            h[b, a] += np.conj(amp)
            c = site(ix, (iy + 1) % ny)
            amp = -t * np.exp(1j * y_link_phase[ix, iy])
            h[a, c] += amp
            h[c, a] += np.conj(amp)
    return LatticeOperator(geometry, h)


def plaquette_curl(x_link_phase, y_link_phase):
    """Discrete curl of link phases per plaquette, in units of 2*pi.

    Plaquette (ix, iy) is bounded by the x-link at (ix, iy), the y-link at
    (ix+1, iy), the x-link at (ix, iy+1), and the y-link at (ix, iy); the
    result is reduced to (-1/2, 1/2].
    """
    curl = (x_link_phase
            + np.roll(y_link_phase, -1, axis=0)
            - np.roll(x_link_phase, -1, axis=1)
            - y_link_phase) / (2 * np.pi)
    return curl - np.floor(curl + 0.5)


def hofstadter(geometry, t, flux, mu):
    """Square-lattice Hofstadter Hamiltonian at rational flux p/q."""
    if geometry.dim != 2:
        raise ModelError("hofstadter requires a 2D geometry")
    if geometry.internal_dim != 1:
        raise ModelError("hofstadter is a single-orbital model")
    phi = _as_fraction(flux)
    nx, ny = geometry.sites_per_axis
    if nx % phi.denominator != 0:
        raise ModelError("flux denominator %d must divide N_x = %d for the "
                         "homogeneous gauge" % (phi.denominator, nx))
    x_phase = np.zeros((nx, ny))
    y_phase = 2 * np.pi * float(phi) * np.arange(nx)[:, None] * np.ones((1, ny))
    return _square_lattice_hamiltonian(geometry, t, mu, x_phase, y_phase)


def hofstadter_gauge(geometry, flux):
    """Link phases of the homogeneous gauge (for gauge-covariance tests)."""
    phi = _as_fraction(flux)
    nx, ny = geometry.sites_per_axis
    x_phase = np.zeros((nx, ny))
    y_phase = 2 * np.pi * float(phi) * np.arange(nx)[:, None] * np.ones((1, ny))
    return x_phase, y_phase


def inhomogeneous_flux(geometry, t, flux_field, mu):
    """Hamiltonian whose link phases realize an arbitrary per-plaquette flux.

    The total flux through the torus must be an integer (otherwise no link
    phase assignment exists); the discrete curl then matches ``flux_field``
    per plaquette modulo one flux quantum.
    """
    if geometry.dim != 2:
        raise ModelError("inhomogeneous_flux requires a 2D geometry")
    nx, ny = geometry.sites_per_axis
    flux_field = np.asarray(flux_field, dtype=float)
    if flux_field.shape != (nx, ny):
        raise ModelError("flux_field must have shape (Nx, Ny) = %r"
                         % ((nx, ny),))
    total = flux_field.sum()
    if abs(total - round(total)) > 1e-9:
        raise ModelError("total flux %.6f is not an integer; incompatible "
                         "with periodic boundaries" % total)
    # column-accumulated gauge: y-links carry the running row sums, the
    # wrap x-links absorb the per-row totals
    y_phase = 2 * np.pi * np.concatenate(
        [np.zeros((1, ny)), np.cumsum(flux_field, axis=0)[:-1]], axis=0)
    x_phase = np.zeros((nx, ny))
    row_sum = flux_field.sum(axis=0)
    x_phase[nx - 1, :] = -2 * np.pi * np.concatenate(
        [[0.0], np.cumsum(row_sum)[:-1]])
    return _square_lattice_hamiltonian(geometry, t, mu, x_phase, y_phase)


def inhomogeneous_gauge(geometry, flux_field):
    """Link phases used by :func:`inhomogeneous_flux`."""
    nx, ny = geometry.sites_per_axis
    flux_field = np.asarray(flux_field, dtype=float)
    y_phase = 2 * np.pi * np.concatenate(
        [np.zeros((1, ny)), np.cumsum(flux_field, axis=0)[:-1]], axis=0)
    x_phase = np.zeros((nx, ny))
    row_sum = flux_field.sum(axis=0)
    x_phase[nx - 1, :] = -2 * np.pi * np.concatenate(
        [[0.0], np.cumsum(row_sum)[:-1]])
    return x_phase, y_phase


def gauge_transform(op, chi):
    """Conjugate an operator by site phases exp(i chi): H -> U H U^dagger."""
    g = op.geometry
    chi = np.asarray(chi, dtype=float).ravel()
    if chi.size != g.n_phys_sites:
        raise ModelError("chi must have one phase per physical site")
    u = np.repeat(np.exp(1j * chi), g.internal_dim)
    return LatticeOperator(g, (u[:, None] * op.kernel) * u.conj()[None, :])


def dimerized_chain(geometry, t1, t2, mu):
    """1D chain with alternating bond strengths t1, t2.

    Bands are +-sqrt(t1^2 + t2^2 + 2 t1 t2 cos k); the gap at half filling
    has full width 2|t1 - t2|.
    """
    if geometry.dim != 1:
        raise ModelError("dimerized_chain requires a 1D geometry")
    if geometry.internal_dim != 1:
        raise ModelError("dimerized_chain is a single-orbital model")
    n = geometry.sites_per_axis[0]
    h = np.zeros((n, n), dtype=complex)
    for k in range(n):
        t = t1 if k % 2 == 0 else t2
        h[k, (k + 1) % n] += -t
        h[(k + 1) % n, k] += -t
    h -= mu * np.eye(n)
    return LatticeOperator(geometry, h)


def random_gapped_perturbation(h, eps, seed, mu=0.0, gap_threshold=1e-6):
    """h + eps * (seeded random Hermitian on the same hopping graph).

    The random matrix is scaled to the magnitude of the largest entry of h,
    so ``eps`` is a relative perturbation strength.  The spectral gap at
    ``mu`` is re-checked; closing it raises :class:`GapClosedError`.
    """
    g = h.geometry
    if eps == 0:
        return LatticeOperator(g, h.kernel.copy())
    rng = np.random.default_rng(seed)
    m = g.matrix_dim
    mask = np.abs(h.kernel) > 0
    v = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    v = np.where(mask, v, 0.0)
    v = (v + v.conj().T) / 2
    scale = np.abs(h.kernel).max() / max(np.abs(v).max(), 1e-300)
    hp = LatticeOperator(g, h.kernel + eps * scale * v)
    gap = spectral_gap(hp, mu)
    if gap < gap_threshold:
        raise GapClosedError(gap, gap_threshold)
    return hp


def gap_midpoints(h, min_gap=0.2):
    """Midpoints of all spectral gaps wider than ``min_gap``.

    Returns a list of (mu, gap_width) sorted by energy.
    """
    evals = np.sort(np.linalg.eigvalsh(h.kernel))
    out = []
    diffs = np.diff(evals)
    for i, dlt in enumerate(diffs):
        if dlt > min_gap:
            out.append((float((evals[i] + evals[i + 1]) / 2), float(dlt)))
    return out
