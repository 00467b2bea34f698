from fractions import Fraction

import numpy as np
import pytest

import latticeweyl as lw
from latticeweyl import GapClosedError, ModelError
from latticeweyl.models import hofstadter_gauge, inhomogeneous_gauge


def test_hofstadter_flux_per_plaquette(grid66):
    x_phase, y_phase = hofstadter_gauge(grid66, Fraction(1, 3))
    curl = lw.plaquette_curl(x_phase, y_phase)
    assert np.abs(curl - 1.0 / 3.0).max() < 1e-12


def test_hofstadter_validation(grid66):
    with pytest.raises(ModelError):
        lw.hofstadter(grid66, 1.0, Fraction(1, 4), 0.0)  # 4 does not divide 6
    g1 = lw.make_geometry(1, (8,), 1.0)
    with pytest.raises(ModelError):
        lw.hofstadter(g1, 1.0, Fraction(1, 3), 0.0)
    with pytest.raises(ModelError):
        lw.hofstadter(grid66, 1.0, 0.25, 0.0)  # bare float flux


def test_hofstadter_spectrum_q3(grid66):
    # flux 1/3 splits into 3 bands of 12 states with two true gaps
    h = lw.hofstadter(grid66, 1.0, Fraction(1, 3), 0.0)
    assert h.is_hermitian()
    evals = np.sort(np.linalg.eigvalsh(h.kernel))
    assert evals[11] < evals[12] - 0.5
    assert evals[23] < evals[24] - 0.5
    # spectrum is symmetric under chiral reflection for this flux
    assert np.abs(evals + evals[::-1]).max() < 1e-10


def test_inhomogeneous_flux_realizes_field(grid66):
    rng = np.random.default_rng(2)
    field = rng.uniform(-0.2, 0.2, size=(6, 6))
    field -= field.mean()  # integer (zero) total flux
    x_phase, y_phase = inhomogeneous_gauge(grid66, field)
    curl = lw.plaquette_curl(x_phase, y_phase)
    assert np.abs(curl - field).max() < 1e-10
    h = lw.inhomogeneous_flux(grid66, 1.0, field, 0.0)
    assert h.is_hermitian()
    with pytest.raises(ModelError):
        lw.inhomogeneous_flux(grid66, 1.0, field + 0.01, 0.0)  # frac. total


def test_gauge_transform_preserves_invariants(grid66):
    h = lw.hofstadter(grid66, 1.0, Fraction(1, 3), 0.0)
    rng = np.random.default_rng(4)
    chi = rng.uniform(0, 2 * np.pi, size=grid66.n_phys_sites)
    h2 = lw.gauge_transform(h, chi)
    e1 = np.sort(np.linalg.eigvalsh(h.kernel))
    e2 = np.sort(np.linalg.eigvalsh(h2.kernel))
    assert np.abs(e1 - e2).max() < 1e-10
    assert np.abs(np.abs(h.kernel) - np.abs(h2.kernel)).max() < 1e-10


def test_dimerized_chain_gap():
    g = lw.make_geometry(1, (8,), 1.0)
    t1, t2 = 1.0, 0.4
    h = lw.dimerized_chain(g, t1, t2, 0.0)
    evals = np.sort(np.linalg.eigvalsh(h.kernel))
    # band edges at +-|t1 - t2|: full gap 2|t1 - t2| at half filling
    assert np.isclose(evals[4] - evals[3], 2 * abs(t1 - t2), atol=1e-10)
    gaps = lw.gap_midpoints(h, min_gap=0.5)
    assert len(gaps) == 1
    mu, width = gaps[0]
    assert abs(mu) < 1e-10 and np.isclose(width, 1.2)


def test_random_gapped_perturbation_determinism_and_graph(grid66):
    h = lw.hofstadter(grid66, 1.0, Fraction(1, 3), 0.0)
    hp1 = lw.random_gapped_perturbation(h, 0.01, seed=7, mu=-1.366)
    hp2 = lw.random_gapped_perturbation(h, 0.01, seed=7, mu=-1.366)
    assert np.abs(hp1.kernel - hp2.kernel).max() == 0.0
    assert hp1.is_hermitian()
    # perturbation lives on the hopping graph of h
    off_graph = (np.abs(h.kernel) == 0) & (np.abs(hp1.kernel) > 0)
    assert not off_graph.any()
    # mu pinned to an eigenvalue: any gap threshold trips the check
    e0 = float(np.linalg.eigvalsh(h.kernel)[0])
    with pytest.raises(GapClosedError):
        lw.random_gapped_perturbation(h, 1e-12, seed=7, mu=e0,
                                      gap_threshold=1e-6)


def test_fhs_chern_q3(grid66):
    spec = lw.ModelSpec(grid66, "hofstadter", 1.0, 0.0, flux=Fraction(1, 3))
    cherns = [lw.fhs_chern(spec, [b]) for b in range(3)]
    assert cherns == [1, -2, 1]
    assert lw.fhs_chern(spec, [0, 1, 2]) == 0
