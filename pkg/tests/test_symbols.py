import csv

import numpy as np
import pytest

import latticeweyl as lw
from latticeweyl import ReconstructionError, SymbolError
from latticeweyl.symbols import SymbolSeries
from conftest import random_operator


def _closed_form_identity_b(g):
    """(x, p) field prod_a (1 + cos(pi x_a / l_a)) / 2 on the physical grid."""
    out = 1.0
    for a in range(g.dim):
        x = g.ext_positions(a)
        f = (1 + np.cos(np.pi * x / g.half_spacing[a])) / 2
        shape = [1] * (2 * g.dim)
        shape[a] = len(x)
        out = out * f.reshape(shape)
    return np.broadcast_to(out, g.ext_per_axis + g.sites_per_axis).copy()


def test_identity_weyl_symbol_is_one_everywhere(chain8_wide, grid66):
    for g in (chain8_wide, grid66):
        sym = lw.weyl_symbol(lw.identity_operator(g))
        assert np.abs(sym.values - 1.0).max() < 1e-12
        assert np.abs(sym.coarse_view() - 1.0).max() < 1e-12


def test_identity_buot_symbol_closed_form(chain8_wide, grid66):
    for g in (chain8_wide, grid66):
        got = lw.buot_symbol(lw.identity_operator(g)).coarse_view()[..., 0, 0]
        assert np.abs(got - _closed_form_identity_b(g)).max() < 1e-12


def test_hop_symbols_closed_forms(chain8_wide):
    g = chain8_wide
    l = g.half_spacing[0]
    hop = lw.shift_operator(g, 0, 1)
    x = g.ext_positions(0)[:, None]
    p = g.coarse_momenta(0)[None, :]
    w = lw.weyl_symbol(hop).coarse_view()[..., 0, 0]
    assert np.abs(w - np.exp(2j * p * l)).max() < 1e-12
    b = lw.buot_symbol(hop).coarse_view()[..., 0, 0]
    want = 0.5 * np.exp(2j * p * l) * (1 - np.cos(np.pi * x / l))
    assert np.abs(b - want).max() < 1e-12


def test_momentum_function_symbol_closed_form(chain8_wide):
    # W-symbol of f(p-hat) on the physical grid is f(p), independent of x
    g = chain8_wide
    n, l = 8, g.half_spacing[0]
    pc = g.coarse_momenta(0)
    rng = np.random.default_rng(5)
    coeffs = [(rng.normal(), m) for m in range(-3, 4)]
    fp = sum(c * np.exp(2j * pc * m * l) for c, m in coeffs)
    e = np.exp(1j * np.outer(2 * l * np.arange(n), pc)) / np.sqrt(n)
    op = lw.LatticeOperator(g, (e * fp[None, :]) @ e.conj().T)
    got = lw.weyl_symbol(op).coarse_view()[..., 0, 0]
    assert np.abs(got - fp[None, :]).max() < 1e-12
    # B-symbol: (f(p) + f(p + pi/2l) cos(pi x / l)) / 2
    fp_shift = sum(c * np.exp(2j * (pc + np.pi / (2 * l)) * m * l)
                   for c, m in coeffs)
    x = g.ext_positions(0)
    want = (fp[None, :] + np.outer(np.cos(np.pi * x / l), fp_shift)) / 2
    got_b = lw.buot_symbol(op).coarse_view()[..., 0, 0]
    assert np.abs(got_b - want).max() < 1e-12
    # C-symbol of a homogeneous operator is f(p), independent of x
    got_c = lw.continuum_symbol(op).values[..., 0, 0]
    assert np.abs(got_c - fp[None, :]).max() < 1e-12


def test_weyl_is_sum_of_shifted_buot(chain8, grid66, rng):
    # W(x) = B(x) + B(x - l) on the raw field, per axis in 2D
    for g in (chain8, grid66):
        op = random_operator(g, rng)
        w = lw.weyl_symbol(op).values
        b = lw.buot_symbol(op).values
        acc = np.zeros_like(b)
        from itertools import product
        for off in product((0, 1), repeat=g.dim):
            acc += np.roll(b, shift=off, axis=tuple(range(g.dim)))
        assert np.abs(w - acc).max() < 1e-12


def test_mode_form_roundtrip(chain8_wide, grid66, rng):
    for g in (chain8_wide, grid66):
        op = random_operator(g, rng)
        for transform in (lw.weyl_symbol, lw.buot_symbol, lw.continuum_symbol):
            sym = transform(op)
            back = lw.from_mode_form(lw.to_mode_form(sym))
            assert np.abs(back.values - sym.values).max() < 1e-10


def test_inverse_weyl_roundtrip(chain8_wide, grid66, rng):
    for g in (chain8_wide, grid66):
        op = random_operator(g, rng)
        back = lw.inverse_weyl(lw.weyl_symbol(op))
        assert np.abs(back.kernel - op.kernel).max() < 1e-10


def test_inverse_weyl_rejects_non_image(chain8, rng):
    # a symbol depending on x through odd modes only is not a W-image
    vals = lw.weyl_symbol(lw.identity_operator(chain8)).values.copy()
    x = chain8.ext_positions(0)
    vals[..., 0, 0] += np.cos(np.pi * x / 1.0)[:, None]
    bad = lw.WeylSymbol(chain8, "W", vals)
    with pytest.raises(ReconstructionError):
        lw.inverse_weyl(bad)


def test_inverse_weyl_flavor_guard(chain8):
    b = lw.buot_symbol(lw.identity_operator(chain8))
    with pytest.raises(SymbolError):
        lw.inverse_weyl(b)


def test_series_symbol_degree_zero_matches_weyl_interior():
    # constant-in-x series: symbol is f(p) synthesized on the fine grid;
    # matches the integral W-symbol away from the coordinate wrap
    n = 16
    g = lw.make_geometry(1, (n,), 1.0)
    pc = g.coarse_momenta(0)
    rng = np.random.default_rng(3)
    coeffs = np.zeros((1, n, 1, 1), complex)
    f = sum(rng.normal() * np.exp(2j * pc * m) for m in (-2, -1, 0, 1, 2))
    coeffs[0, :, 0, 0] = f
    e = np.exp(1j * np.outer(2 * np.arange(n), pc)) / np.sqrt(n)
    op = lw.LatticeOperator(g, (e * f[None, :]) @ e.conj().T)
    w = lw.weyl_symbol(op).values[..., 0, 0]
    s = lw.series_symbol(SymbolSeries(g, coeffs)).values[..., 0, 0]
    interior = [j for j in range(2 * n)
                if min(j, 2 * n - j) > 4 and abs(j - n) > 4]
    assert max(np.abs(w[j] - s[j]).max() for j in interior) < 1e-12


def test_series_validation():
    g2 = lw.make_geometry(2, (6, 6), 1.0)
    with pytest.raises(SymbolError):
        SymbolSeries(g2, np.zeros((1, 6, 1, 1)))
    g1 = lw.make_geometry(1, (8,), 1.0)
    with pytest.raises(SymbolError):
        SymbolSeries(g1, np.zeros((6, 8, 1, 1)))   # n_max > 4
    with pytest.raises(SymbolError):
        SymbolSeries(g1, np.zeros((2, 7, 1, 1)))


def test_export_csv(tmp_path, chain8):
    sym = lw.buot_symbol(lw.identity_operator(chain8))
    path = tmp_path / "sym.csv"
    lw.export_csv(sym, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x0", "p0", "s", "t", "re", "im"]
    vals = sym.coarse_view()
    assert len(rows) - 1 == vals.size
    x = (1 + np.cos(np.pi * chain8.ext_positions(0) / 1.0)) / 2
    for row in rows[1:]:
        ix, ip = int(row[0]), int(row[1])
        assert abs(float(row[4]) - x[ix]) < 1e-12
        assert abs(float(row[5])) < 1e-12
