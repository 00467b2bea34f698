"""Exact phase-space calculus for finite periodic tight-binding lattices.

Operator symbols on a doubled lattice, an exact Moyal star product, trace
identities, and the Hall conductivity as a topological invariant, verified
against operator-algebra and Chern-number oracles.
"""

from .geometry import GeometryError, LatticeGeometry, make_geometry
from .operators import (LatticeOperator, MomentumKernel, OperatorError,
                        identity_operator, kernel_to_operator,
                        momentum_kernel, shift_operator, spectral_gap)
from .symbols import (ModeForm, ReconstructionError, SymbolError,
                      SymbolSeries, WeylSymbol, buot_symbol, continuum_symbol,
                      export_csv, from_mode_form, inverse_weyl, series_symbol,
                      to_mode_form, weyl_mode_form, weyl_symbol)
from .algebra import (dp, groenewold_residual, mode_pair_trace,
                      pointwise_product, star, star_mode_forms, star_rhombus,
                      trace_cO, trace_fO)
from .models import (GapClosedError, ModelError, ModelSpec, dimerized_chain,
                     gap_midpoints, gauge_transform, hofstadter,
                     inhomogeneous_flux, plaquette_curl,
                     random_gapped_perturbation)
from .response import (FrequencyQuadrature, ResponseError, ResponseReport,
                       fhs_chern, green_symbol, hall_invariant,
                       invariance_probe, local_current, total_current)
from . import kernels

__version__ = "0.1.0"

__all__ = [
    "GeometryError", "LatticeGeometry", "make_geometry",
    "LatticeOperator", "MomentumKernel", "OperatorError",
    "identity_operator", "kernel_to_operator", "momentum_kernel",
    "shift_operator", "spectral_gap",
    "ModeForm", "ReconstructionError", "SymbolError", "SymbolSeries",
    "WeylSymbol", "buot_symbol", "continuum_symbol", "export_csv",
    "from_mode_form", "inverse_weyl", "series_symbol", "to_mode_form",
    "weyl_mode_form", "weyl_symbol",
    "dp", "groenewold_residual", "mode_pair_trace", "pointwise_product",
    "star", "star_mode_forms", "star_rhombus", "trace_cO", "trace_fO",
    "GapClosedError", "ModelError", "ModelSpec", "dimerized_chain",
    "gap_midpoints", "gauge_transform", "hofstadter", "inhomogeneous_flux",
    "plaquette_curl", "random_gapped_perturbation",
    "FrequencyQuadrature", "ResponseError", "ResponseReport", "fhs_chern",
    "green_symbol", "hall_invariant", "invariance_probe", "local_current",
    "total_current",
    "kernels",
]
