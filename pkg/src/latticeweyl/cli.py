"""Command-line front door: identity-verification suites, symbol exports,
and response computations driven by JSON config files.

Subcommands
-----------
verify   run the symbol-calculus identity suite on seeded random operators
symbols  transform an operator and export the phase-space field as CSV
hall     Hall invariant of a gapped 2D model, with the Chern oracle
current  total and local equilibrium currents
sweep    Hall invariant across every spectral gap (mu scan)
probe    invariance of the Hall invariant under seeded perturbations

Config schema (JSON, ``schema_version`` 1)::

    {
      "schema_version": 1,
      "seed": 0,                          # mandatory
      "geometry": {"dim": 2, "sites_per_axis": [6, 6],
                   "half_spacing": [1.0, 1.0], "internal_dim": 1},
      "model": {"kind": "hofstadter", "t": 1.0, "mu": 0.0,
                "flux": [1, 3]},          # or dimerized/inhomogeneous
      "mu": -1.366,                       # response chemical potential
      "n_nodes": 64,                      # frequency quadrature nodes
      "n_operators": 20,                  # verify: random operators
      "tolerance": 1e-10,                 # verify: identity tolerance
      "eps_list": [0.01], "trials": 5,    # probe
      "parallelism": 1
    }

Exit codes: 0 success, 2 config error, 3 verification failure,
4 numerical non-convergence.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from .algebra import star, trace_fO
from .geometry import GeometryError, make_geometry
from .models import (GapClosedError, ModelError, ModelSpec, dimerized_chain,
                     gap_midpoints, hofstadter, inhomogeneous_flux)
from .operators import LatticeOperator, OperatorError, identity_operator, \
    shift_operator
from .response import (FrequencyQuadrature, ResponseError, fhs_chern,
                       hall_invariant, invariance_probe, local_current,
                       total_current)
from .symbols import (SymbolError, buot_symbol, continuum_symbol, export_csv,
                      weyl_symbol)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_NONCONV = 4


class ConfigError(ValueError):
    """Raised for malformed or incomplete config files."""


# --------------------------------------------------------------------------
# config handling
# --------------------------------------------------------------------------

def load_config(path):
    if not os.path.exists(path):
        raise ConfigError("config file not found: %s" % path)
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("config is not valid JSON: %s" % exc)
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    if cfg.get("schema_version") != 1:
        raise ConfigError("unsupported schema_version %r (want 1)"
                          % (cfg.get("schema_version"),))
    if "seed" not in cfg or not isinstance(cfg["seed"], int):
        raise ConfigError("config must carry an integer 'seed'")
    if "geometry" not in cfg:
        raise ConfigError("config must carry a 'geometry' section")
    return cfg


def build_geometry(cfg):
    g = cfg["geometry"]
    try:
        return make_geometry(dim=int(g["dim"]),
                             sites_per_axis=tuple(g["sites_per_axis"]),
                             half_spacing=tuple(g["half_spacing"]),
                             internal_dim=int(g.get("internal_dim", 1)))
    except (KeyError, TypeError, GeometryError) as exc:
        raise ConfigError("bad geometry section: %s" % exc)


def build_model(cfg, geometry):
    """Return (hamiltonian, ModelSpec) from the config's model section."""
    m = cfg.get("model")
    if m is None:
        raise ConfigError("this command needs a 'model' section")
    kind = m.get("kind")
    t = float(m.get("t", 1.0))
    mu0 = float(m.get("mu", 0.0))
    try:
        if kind == "hofstadter":
            flux = Fraction(int(m["flux"][0]), int(m["flux"][1]))
            h = hofstadter(geometry, t, flux, mu0)
            return h, ModelSpec(geometry, kind, t, mu0, flux=flux)
        if kind == "inhomogeneous":
            field = np.asarray(m["flux_field"], dtype=float)
            h = inhomogeneous_flux(geometry, t, field, mu0)
            return h, ModelSpec(geometry, kind, t, mu0, flux_field=field)
        if kind == "dimerized":
            h = dimerized_chain(geometry, float(m["t1"]), float(m["t2"]), mu0)
            return h, ModelSpec(geometry, kind, t, mu0,
                                params={"t1": m["t1"], "t2": m["t2"]})
    except (KeyError, TypeError, IndexError, ModelError) as exc:
        raise ConfigError("bad model section: %s" % exc)
    raise ConfigError("unknown model kind %r" % (kind,))


def _quadrature(cfg):
    return FrequencyQuadrature.build(int(cfg.get("n_nodes", 64)))


def _write_report(report, path):
    text = json.dumps(report, sort_keys=True, indent=1,
                      default=_json_default)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError("cannot serialize %r" % (obj,))


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _random_operator(geometry, rng):
    m = geometry.matrix_dim
    k = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return LatticeOperator(geometry, k)


def cmd_verify(cfg, args):
    g = build_geometry(cfg)
    rng = np.random.default_rng(cfg["seed"])
    n_ops = int(cfg.get("n_operators", 20))
    tol = float(cfg.get("tolerance", 1e-10))

    dev = {"star_def": 0.0, "trace_1": 0.0, "trace_2": 0.0, "id_def": 0.0}
    ident = identity_operator(g)
    dev["id_def"] = float(np.abs(weyl_symbol(ident).values - 1.0).max())
    for _ in range(n_ops):
        a = _random_operator(g, rng)
        b = _random_operator(g, rng)
        aw, bw = weyl_symbol(a), weyl_symbol(b)
        ab = a @ b
        dev["star_def"] = max(dev["star_def"], float(
            np.abs(star(aw, bw).values - weyl_symbol(ab).values).max()))
        dev["trace_1"] = max(dev["trace_1"],
                             abs(trace_fO(aw) - np.trace(a.kernel)))
        dev["trace_2"] = max(dev["trace_2"],
                             abs(trace_fO(star(aw, bw))
                                 - np.trace(ab.kernel)))
    ok = all(v < tol for v in dev.values())
    report = {"command": "verify", "schema_version": 1,
              "seed": cfg["seed"], "n_operators": n_ops, "tolerance": tol,
              "deviations": dev, "passed": bool(ok)}
    _write_report(report, args.output)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_symbols(cfg, args):
    g = build_geometry(cfg)
    if args.op == "identity":
        op = identity_operator(g)
    elif args.op == "hop":
        op = shift_operator(g, 0, 1)
    elif args.op == "model":
        op, _ = build_model(cfg, g)
    else:
        raise ConfigError("unknown --op %r" % (args.op,))
    transforms = {"W": weyl_symbol, "B": buot_symbol, "C": continuum_symbol}
    if args.flavor not in transforms:
        raise ConfigError("unknown --flavor %r" % (args.flavor,))
    sym = transforms[args.flavor](op)
    out = args.output or "symbol_%s_%s.csv" % (args.flavor, args.op)
    export_csv(sym, out)
    report = {"command": "symbols", "schema_version": 1,
              "flavor": args.flavor, "op": args.op, "csv": out,
              "max_abs": float(np.abs(sym.coarse_view()).max())}
    _write_report(report, None)
    return EXIT_OK


def _hall_point(h, spec, mu, quad, conv_tol):
    rep = hall_invariant(h, mu, quad)
    point = rep.to_json_dict()
    if spec.flux is not None:
        q = spec.flux.denominator
        per_band = spec.geometry.matrix_dim // q
        evals = np.sort(np.linalg.eigvalsh(h.kernel))
        occ = int(np.searchsorted(evals, mu))
        bands = [b for b in range(q) if (b + 1) * per_band <= occ]
        point["chern_oracle"] = sum(fhs_chern(spec, [b]) for b in bands)
        point["occupied_bands"] = bands
    converged = rep.quadrature_error is None or rep.quadrature_error < conv_tol
    point["converged"] = bool(converged)
    return point, converged


def cmd_hall(cfg, args):
    g = build_geometry(cfg)
    h, spec = build_model(cfg, g)
    if "mu" not in cfg:
        raise ConfigError("hall needs a top-level 'mu'")
    quad = _quadrature(cfg)
    conv_tol = float(cfg.get("convergence_tolerance", 1e-3))
    point, converged = _hall_point(h, spec, float(cfg["mu"]), quad, conv_tol)
    report = {"command": "hall", "schema_version": 1, "seed": cfg["seed"],
              "result": point}
    _write_report(report, args.output)
    return EXIT_OK if converged else EXIT_NONCONV


def cmd_current(cfg, args):
    g = build_geometry(cfg)
    h, _ = build_model(cfg, g)
    if "mu" not in cfg:
        raise ConfigError("current needs a top-level 'mu'")
    quad = _quadrature(cfg)
    mu = float(cfg["mu"])
    j_total = total_current(h, mu, quad)
    j_local = local_current(h, mu, quad)
    report = {"command": "current", "schema_version": 1, "seed": cfg["seed"],
              "mu": mu, "total_current": j_total.tolist(),
              "local_current_max": float(np.abs(j_local).max())}
    if args.output and args.output.endswith(".csv"):
        with open(args.output, "w") as fh:
            fh.write("axis," + ",".join("x%d" % a for a in range(g.dim))
                     + ",j\n")
            for axis in range(g.dim):
                for idx in np.ndindex(*g.ext_per_axis):
                    fh.write("%d,%s,%r\n" % (
                        axis, ",".join(str(i) for i in idx),
                        float(j_local[(axis,) + idx])))
        report["csv"] = args.output
        _write_report(report, None)
    else:
        _write_report(report, args.output)
    return EXIT_OK


def cmd_sweep(cfg, args):
    g = build_geometry(cfg)
    h, spec = build_model(cfg, g)
    quad = _quadrature(cfg)
    conv_tol = float(cfg.get("convergence_tolerance", 1e-3))
    min_gap = float(cfg.get("min_gap", 0.2))
    points = []
    all_ok = True
    for mu, width in gap_midpoints(h, min_gap):
        point, converged = _hall_point(h, spec, mu, quad, conv_tol)
        point["gap_width"] = width
        points.append(point)
        all_ok = all_ok and converged
    report = {"command": "sweep", "schema_version": 1, "seed": cfg["seed"],
              "points": points}
    _write_report(report, args.output)
    return EXIT_OK if all_ok else EXIT_NONCONV


def cmd_probe(cfg, args):
    g = build_geometry(cfg)
    _, spec = build_model(cfg, g)
    if "mu" not in cfg:
        raise ConfigError("probe needs a top-level 'mu'")
    quad = _quadrature(cfg)
    out = invariance_probe(spec, float(cfg["mu"]),
                           [float(e) for e in cfg.get("eps_list", [0.01])],
                           int(cfg.get("trials", 5)), quad,
                           base_seed=cfg["seed"])
    report = {"command": "probe", "schema_version": 1, "seed": cfg["seed"],
              "probe": out}
    _write_report(report, args.output)
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="latticeweyl",
        description="Exact phase-space calculus for finite periodic "
                    "tight-binding lattices.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--output", default=None,
                       help="report path (default: stdout)")
        if name == "symbols":
            p.add_argument("--flavor", default="B")
            p.add_argument("--op", default="identity")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.fn(cfg, args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (GapClosedError, ResponseError) as exc:
        print("response error: %s" % exc, file=sys.stderr)
        return EXIT_VERIFY
    except (ModelError, OperatorError, SymbolError, GeometryError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG


COMMANDS = {"verify": cmd_verify, "symbols": cmd_symbols, "hall": cmd_hall,
            "current": cmd_current, "sweep": cmd_sweep, "probe": cmd_probe}


if __name__ == "__main__":
    sys.exit(main())
