"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

import latticeweyl as lw


def random_operator(geometry, rng):
    m = geometry.matrix_dim
    k = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return lw.LatticeOperator(geometry, k)


def random_invertible(geometry, rng, shift=3.0):
    """Random operator kept well away from singularity."""
    op = random_operator(geometry, rng)
    return lw.LatticeOperator(geometry,
                              op.kernel + shift * np.eye(geometry.matrix_dim))


@pytest.fixture
def chain8():
    return lw.make_geometry(dim=1, sites_per_axis=(8,), half_spacing=(1.0,))


@pytest.fixture
def chain8_wide():
    return lw.make_geometry(dim=1, sites_per_axis=(8,), half_spacing=(0.7,))


@pytest.fixture
def grid66():
    return lw.make_geometry(dim=2, sites_per_axis=(6, 6),
                            half_spacing=(1.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
