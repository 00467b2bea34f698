import numpy as np
import pytest

import latticeweyl as lw
from latticeweyl import OperatorError
from conftest import random_operator


def test_momentum_kernel_roundtrip_1d(chain8_wide, rng):
    op = random_operator(chain8_wide, rng)
    back = lw.kernel_to_operator(lw.momentum_kernel(op))
    assert np.abs(back.kernel - op.kernel).max() < 1e-12


def test_momentum_kernel_roundtrip_2d_orbitals(rng):
    g = lw.make_geometry(2, (4, 6), (1.0, 0.5), internal_dim=2)
    op = random_operator(g, rng)
    back = lw.kernel_to_operator(lw.momentum_kernel(op))
    assert np.abs(back.kernel - op.kernel).max() < 1e-11


def test_momentum_kernel_diagonal_on_physical_zone(chain8):
    # a pure hop is diagonal in momentum on the physical-zone subgrid
    # (odd indices of the half-spaced grid), carrying the Bloch phase
    hop = lw.shift_operator(chain8, 0, 1)
    kv = lw.momentum_kernel(hop).values[..., 0, 0]
    coarse = kv[1::2, 1::2]
    off = coarse - np.diag(np.diag(coarse))
    assert np.abs(off).max() < 1e-12
    pc = chain8.coarse_momenta(0)
    assert np.abs(np.diag(coarse) - np.exp(2j * pc * 1.0)).max() < 1e-12


def test_shift_operator_action(chain8):
    s = lw.shift_operator(chain8, 0, 1)
    v = np.zeros(8)
    v[2] = 1.0
    # <x|S|y> = delta_{y, x+1 site}: amplitude at site 2 moves to site 1
    assert np.isclose((s.kernel @ v)[1], 1.0)
    assert np.isclose(s.kernel[2, 3], 1.0)
    # N-fold shift is the identity
    acc = lw.identity_operator(chain8)
    for _ in range(8):
        acc = acc @ s
    assert np.abs(acc.kernel - np.eye(8)).max() < 1e-12


def test_spectral_gap():
    g = lw.make_geometry(1, (4,), 1.0)
    h = lw.LatticeOperator(g, np.diag([-2.0, -1.0, 1.0, 3.0]))
    assert np.isclose(lw.spectral_gap(h, 0.0), 1.0)
    assert np.isclose(lw.spectral_gap(h, 2.5), 0.5)
    with pytest.raises(OperatorError):
        lw.spectral_gap(lw.LatticeOperator(g, 1j * np.eye(4)), 0.0)


def test_operator_arithmetic_and_geometry_check(chain8, grid66, rng):
    a = random_operator(chain8, rng)
    b = random_operator(chain8, rng)
    assert np.allclose((a + b).kernel, a.kernel + b.kernel)
    assert np.allclose((2.0 * a).kernel, 2.0 * a.kernel)
    assert np.allclose((a @ b).kernel, a.kernel @ b.kernel)
    with pytest.raises(OperatorError):
        a @ random_operator(grid66, rng)
    with pytest.raises(OperatorError):
        lw.LatticeOperator(chain8, np.eye(7))


def test_json_roundtrip(tmp_path, chain8, rng):
    op = random_operator(chain8, rng)
    path = tmp_path / "op.json"
    op.save_json(path)
    back = lw.LatticeOperator.load_json(path)
    assert back.geometry == op.geometry
    assert np.abs(back.kernel - op.kernel).max() < 1e-15
