"""Finite periodic lattice geometry: site grids, momentum grids, index maps.

The calculus lives on two nested grids per axis.  The physical lattice has
N_j sites with spacing 2*l_j (period L_j = 2*l_j*N_j).  Symbols live on the
doubled lattice (spacing l_j, 2*N_j points per axis) and on a momentum grid
of 2*N_j points spanning the zone (-pi/(2 l_j), pi/(2 l_j)]:

    p_m = -pi/(2 l_j) + (m + 1) * pi / (2 l_j N_j),   m = 0 .. 2 N_j - 1.

The odd-index subset (N_j points spaced pi/(l_j N_j)) is the physical-zone
grid; closed-form identities quoted on the physical zone hold exactly there.
All momentum equality tests are integer index arithmetic on these grids.
"""

import numpy as np


class GeometryError(ValueError):
    """Raised for inconsistent lattice geometry parameters."""


def _as_tuple(value, dim, name):
    if np.isscalar(value):
        return (value,) * dim
    value = tuple(value)
    if len(value) != dim:
        raise GeometryError("%s must have %d entries, got %d"
                            % (name, dim, len(value)))
    return value


class LatticeGeometry:
    """Immutable description of a finite periodic lattice.

    Attributes
    ----------
    dim : int
        Number of spatial axes (1 or 2).
    sites_per_axis : tuple of int
        Physical site counts N_j (even, >= 4).
    half_spacing : tuple of float
        Half lattice constants l_j (physical spacing is 2*l_j).
    internal_dim : int
        Orbital/spin dimension S.
    """

    def __init__(self, dim, sites_per_axis, half_spacing, internal_dim=1):
        if dim not in (1, 2):
            raise GeometryError("dim must be 1 or 2, got %r" % (dim,))
        sites = _as_tuple(sites_per_axis, dim, "sites_per_axis")
        spacing = _as_tuple(half_spacing, dim, "half_spacing")
        for n in sites:
            if int(n) != n or n < 4 or n % 2 != 0:
                raise GeometryError(
                    "sites_per_axis entries must be even integers >= 4, "
                    "got %r" % (n,))
        for l in spacing:
            if not l > 0:
                raise GeometryError("half_spacing must be positive, got %r"
                                    % (l,))
        if int(internal_dim) != internal_dim or internal_dim < 1:
            raise GeometryError("internal_dim must be a positive integer")

        self.dim = dim
        self.sites_per_axis = tuple(int(n) for n in sites)
        self.half_spacing = tuple(float(l) for l in spacing)
        self.internal_dim = int(internal_dim)

        self.n_phys_sites = int(np.prod(self.sites_per_axis))
        self.matrix_dim = self.n_phys_sites * self.internal_dim
        # doubled-lattice and momentum-grid sizes
        self.ext_per_axis = tuple(2 * n for n in self.sites_per_axis)
        self.n_ext_sites = int(np.prod(self.ext_per_axis))
        self.n_momenta = self.n_ext_sites  # symbol momentum grid size

    # ----- per-axis grids -------------------------------------------------
    def phys_positions(self, axis):
        """Physical site coordinates {0, 2l, ..., 2l(N-1)} on one axis."""
        n, l = self.sites_per_axis[axis], self.half_spacing[axis]
        return 2.0 * l * np.arange(n)

    def ext_positions(self, axis):
        """Doubled-lattice coordinates {0, l, ..., l(2N-1)} on one axis."""
        n, l = self.sites_per_axis[axis], self.half_spacing[axis]
        return l * np.arange(2 * n)

    def momenta(self, axis):
        """Symbol momentum grid: 2N points spanning (-pi/2l, pi/2l]."""
        n, l = self.sites_per_axis[axis], self.half_spacing[axis]
        d = np.pi / (2.0 * l * n)
        return -np.pi / (2.0 * l) + (np.arange(2 * n) + 1) * d

    def coarse_momenta(self, axis):
        """Physical-zone momentum grid: N points spaced pi/(l N).

        Equals ``momenta(axis)[1::2]``.
        """
        return self.momenta(axis)[1::2]

    def extended_momenta(self, axis):
        """Dual grid of the doubled lattice: 2N points spanning (-pi/l, pi/l]."""
        n, l = self.sites_per_axis[axis], self.half_spacing[axis]
        d = np.pi / (l * n)
        return -np.pi / l + (np.arange(2 * n) + 1) * d

    def mode_window(self, axis):
        """Centered Fourier-mode window n in [-N, N) for symbol momenta."""
        n = self.sites_per_axis[axis]
        return np.arange(-n, n)

    # ----- integer index maps on the momentum grid ------------------------
    def momentum_add_index(self, axis, i, j):
        """Index of p_i + p_j folded into the zone (exact integer map)."""
        n = self.sites_per_axis[axis]
        return (np.asarray(i) + np.asarray(j) + 1 - n) % (2 * n)

    def momentum_sub_index(self, axis, i, j):
        """Index of p_i - p_j folded into the zone."""
        n = self.sites_per_axis[axis]
        return (np.asarray(i) - np.asarray(j) + n - 1) % (2 * n)

    def momentum_neg_index(self, axis, i):
        """Index of -p_i folded into the zone."""
        n = self.sites_per_axis[axis]
        return (2 * n - 2 - np.asarray(i)) % (2 * n)

    # ----- doubling factor ------------------------------------------------
    def doubling_factor(self, q):
        """f(q) = prod_j (1 + exp(-2i q_j l_j)) for a momentum vector q."""
        q = np.atleast_1d(np.asarray(q, dtype=float))
        out = 1.0 + 0.0j
        for j in range(self.dim):
            out = out * (1.0 + np.exp(-2j * q[j] * self.half_spacing[j]))
        return out

    # ----- site index maps ------------------------------------------------
    def site_index(self, coords):
        """Flat physical-site index (row-major over axes) of a multi-index."""
        return int(np.ravel_multi_index(tuple(coords), self.sites_per_axis))

    def site_coords(self):
        """(n_phys_sites, dim) array of per-axis site integer coordinates."""
        return np.indices(self.sites_per_axis).reshape(self.dim, -1).T

    # ----- misc -----------------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, LatticeGeometry)
                and self.dim == other.dim
                and self.sites_per_axis == other.sites_per_axis
                and self.half_spacing == other.half_spacing
                and self.internal_dim == other.internal_dim)

    def __hash__(self):
        return hash((self.dim, self.sites_per_axis, self.half_spacing,
                     self.internal_dim))

    def __repr__(self):
        return ("LatticeGeometry(dim=%d, sites_per_axis=%r, half_spacing=%r, "
                "internal_dim=%d)" % (self.dim, self.sites_per_axis,
                                      self.half_spacing, self.internal_dim))

    def to_dict(self):
        return {"dim": self.dim,
                "sites_per_axis": list(self.sites_per_axis),
                "half_spacing": list(self.half_spacing),
                "internal_dim": self.internal_dim}

    @classmethod
    def from_dict(cls, d):
        return cls(d["dim"], d["sites_per_axis"], d["half_spacing"],
                   d.get("internal_dim", 1))


def make_geometry(dim, sites_per_axis, half_spacing, internal_dim=1):
    """Construct a :class:`LatticeGeometry`, validating all preconditions."""
    return LatticeGeometry(dim, sites_per_axis, half_spacing, internal_dim)
