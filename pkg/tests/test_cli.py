import csv
import json

import numpy as np
import pytest

from latticeweyl import cli


def write_config(path, **overrides):
    cfg = {"schema_version": 1,
           "seed": 0,
           "geometry": {"dim": 1, "sites_per_axis": [8],
                        "half_spacing": [1.0], "internal_dim": 1}}
    cfg.update(overrides)
    with open(path, "w") as fh:
        json.dump(cfg, fh)
    return str(path)


HOFSTADTER_66 = {
    "geometry": {"dim": 2, "sites_per_axis": [6, 6],
                 "half_spacing": [1.0, 1.0], "internal_dim": 1},
    "model": {"kind": "hofstadter", "t": 1.0, "mu": 0.0, "flux": [1, 3]},
    "mu": -1.3660254,
    "n_nodes": 32,
}


def test_verify_passes(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", n_operators=5, tolerance=1e-10)
    assert cli.main(["verify", "--config", cfg]) == cli.EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is True
    assert all(v < 1e-10 for v in report["deviations"].values())


def test_missing_config_is_config_error(tmp_path):
    assert cli.main(["verify", "--config",
                     str(tmp_path / "nope.json")]) == cli.EXIT_CONFIG


def test_bad_json_is_config_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert cli.main(["verify", "--config", str(path)]) == cli.EXIT_CONFIG


def test_bad_schema_version(tmp_path):
    cfg = write_config(tmp_path / "c.json", schema_version=2)
    assert cli.main(["verify", "--config", cfg]) == cli.EXIT_CONFIG


def test_missing_seed(tmp_path):
    path = tmp_path / "c.json"
    with open(path, "w") as fh:
        json.dump({"schema_version": 1,
                   "geometry": {"dim": 1, "sites_per_axis": [8],
                                "half_spacing": [1.0]}}, fh)
    assert cli.main(["verify", "--config", str(path)]) == cli.EXIT_CONFIG


def test_bad_geometry_section(tmp_path):
    cfg = write_config(tmp_path / "c.json",
                       geometry={"dim": 1, "sites_per_axis": [7],
                                 "half_spacing": [1.0]})
    assert cli.main(["verify", "--config", cfg]) == cli.EXIT_CONFIG


def test_symbols_export_matches_closed_form(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json")
    out = tmp_path / "sym.csv"
    code = cli.main(["symbols", "--config", cfg, "--flavor", "B",
                     "--op", "identity", "--output", str(out)])
    assert code == cli.EXIT_OK
    capsys.readouterr()
    with open(out) as fh:
        rows = list(csv.reader(fh))
    x = np.arange(16) * 1.0
    want = (1 + np.cos(np.pi * x)) / 2
    for row in rows[1:]:
        assert abs(float(row[4]) - want[int(row[0])]) < 1e-12
        assert abs(float(row[5])) < 1e-12


def test_hall_command_and_oracle(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", **HOFSTADTER_66)
    code = cli.main(["hall", "--config", cfg])
    out = json.loads(capsys.readouterr().out)
    assert code == cli.EXIT_OK
    res = out["result"]
    assert res["converged"] is True
    assert res["chern_oracle"] == 1
    assert res["occupied_bands"] == [0]
    assert abs(res["hall_invariant"] - 1.8434478) < 1e-4


def test_hall_gapless_mu_is_verify_error(tmp_path):
    from fractions import Fraction
    import latticeweyl as lw
    g = lw.make_geometry(2, (6, 6), 1.0)
    h = lw.hofstadter(g, 1.0, Fraction(1, 3), 0.0)
    e0 = float(np.linalg.eigvalsh(h.kernel)[0])
    over = dict(HOFSTADTER_66, mu=e0)  # mu exactly on an eigenvalue
    cfg = write_config(tmp_path / "c.json", **over)
    assert cli.main(["hall", "--config", cfg]) == cli.EXIT_VERIFY


def test_hall_determinism_byte_identical(tmp_path):
    cfg = write_config(tmp_path / "c.json", **HOFSTADTER_66)
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert cli.main(["hall", "--config", cfg, "--output", str(out1)]) == 0
    assert cli.main(["hall", "--config", cfg, "--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_current_command(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", **HOFSTADTER_66)
    assert cli.main(["current", "--config", cfg]) == cli.EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert max(abs(v) for v in out["total_current"]) < 1e-12


def test_probe_command(tmp_path, capsys):
    over = dict(HOFSTADTER_66, n_nodes=8, eps_list=[0.01], trials=2)
    cfg = write_config(tmp_path / "c.json", **over)
    assert cli.main(["probe", "--config", cfg]) == cli.EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["probe"]["max_delta_hall"] < 1e-2
    assert out["probe"]["max_delta_current"] < 1e-6


def test_unknown_model_kind(tmp_path):
    over = dict(HOFSTADTER_66)
    over["model"] = {"kind": "mystery"}
    cfg = write_config(tmp_path / "c.json", **over)
    assert cli.main(["hall", "--config", cfg]) == cli.EXIT_CONFIG
