"""Command-line front end: fit, oracle, check and dump-boundary.

Settings come from built-in defaults, then an optional JSON config file
(``--config``), then command-line flags, each overriding the one before.
Result documents are JSON with sorted keys and no timestamps, so identical
runs give byte-identical files.
"""
import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .checks import run_checks
from .domain import Ellipse, FourierBoundary, circle, shape_symmetry
from .fitter import FitError, OptimConfig, QuadratureGrid, fit_flow, fit_gauss_newton, objective_rms
from .levelset import DEFAULT_ROOT, LevelSetError, LevelSetParams, levelset_radius
from .oracle import OracleError, oracle_eigenvalue

log = logging.getLogger("fbeig")

DEFAULTS = {
    "shape": "ellipse",
    "a": 0.5,
    "b": 1.0,
    "radius": 1.0,
    "r0": 1.0,
    "cos": [],
    "sin": [],
    "terms": 30,
    "sym": None,
    "grid": 60,
    "optimizer": "gauss-newton",
    "tol": 1e-13,
    "max_iter": 500,
    "hadamard": True,
    "out": None,
    "seed": 0,
    "h": [0.01, 0.005, 0.0025],
}

SHAPES = ("ellipse", "circle", "fourier")
OPTIMIZERS = ("gauss-newton", "flow")

EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3


class ConfigError(ValueError):
    pass


def _float_list(values):
    return [float(v) for v in values]


def load_config_file(path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return data


def resolve_config(args):
    """Merge defaults, config file and explicit flags; validate the result."""
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(load_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    validate_config(cfg)
    return cfg


def validate_config(cfg):
    if cfg["shape"] not in SHAPES:
        raise ConfigError(f"shape must be one of {SHAPES}, got {cfg['shape']!r}")
    if cfg["optimizer"] not in OPTIMIZERS:
        raise ConfigError(f"optimizer must be one of {OPTIMIZERS}, got {cfg['optimizer']!r}")
    for key in ("a", "b", "radius", "r0", "tol"):
        v = cfg[key]
        if not isinstance(v, (int, float)) or not (v > 0 and math.isfinite(v)):
            raise ConfigError(f"{key} must be a positive finite number, got {v!r}")
    for key, low in (("terms", 0), ("grid", 8), ("max_iter", 1), ("seed", 0)):
        v = cfg[key]
        if not isinstance(v, int) or isinstance(v, bool) or v < low:
            raise ConfigError(f"{key} must be an integer >= {low}, got {v!r}")
    if cfg["sym"] is not None and (not isinstance(cfg["sym"], int) or cfg["sym"] < 1):
        raise ConfigError(f"sym must be a positive integer, got {cfg['sym']!r}")
    if cfg["tol"] < 1e-13:
        raise ConfigError("tol must be >= 1e-13")
    if not isinstance(cfg["hadamard"], bool):
        raise ConfigError("hadamard must be true or false")
    if not cfg["h"] or not all(isinstance(v, (int, float)) and v > 0 for v in cfg["h"]):
        raise ConfigError("h must be a non-empty list of positive spacings")
    # building the shape runs its own checks (e.g. Fourier positivity)
    try:
        build_shape(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_shape(cfg):
    if cfg["shape"] == "ellipse":
        return Ellipse(float(cfg["a"]), float(cfg["b"]))
    if cfg["shape"] == "circle":
        return circle(float(cfg["radius"]))
    return FourierBoundary(float(cfg["r0"]), _float_list(cfg["cos"]), _float_list(cfg["sin"]))


def shape_spec(cfg):
    if cfg["shape"] == "ellipse":
        return {"kind": "ellipse", "a": float(cfg["a"]), "b": float(cfg["b"])}
    if cfg["shape"] == "circle":
        return {"kind": "circle", "radius": float(cfg["radius"])}
    return {"kind": "fourier", "r0": float(cfg["r0"]), "cos": _float_list(cfg["cos"]),
            "sin": _float_list(cfg["sin"])}


def shape_from_spec(spec):
    kind = spec["kind"]
    if kind == "ellipse":
        return Ellipse(spec["a"], spec["b"])
    if kind == "circle":
        return circle(spec["radius"])
    if kind == "fourier":
        return FourierBoundary(spec["r0"], spec["cos"], spec["sin"])
    raise ConfigError(f"unknown shape kind {kind!r}")


def run_fit(cfg):
    shape = build_shape(cfg)
    sym = cfg["sym"] if cfg["sym"] is not None else shape_symmetry(shape)
    grid = QuadratureGrid(cfg["grid"])
    opt = OptimConfig(max_iterations=cfg["max_iter"], objective_tol=cfg["tol"], hadamard=cfg["hadamard"])
    fit = fit_gauss_newton if cfg["optimizer"] == "gauss-newton" else fit_flow
    return shape, grid, fit(shape, cfg["terms"], grid, opt, sym_step=sym)


def result_document(cfg, result):
    p = result.params
    return {
        "shape": shape_spec(cfg),
        "grid": {"m_angles": cfg["grid"]},
        "optimizer": result.method,
        "n_terms": p.n_terms,
        "sym_step": p.sym_step,
        "rho": p.rho,
        "coefficients": list(p.coeffs),
        "eigenvalue_raw": result.eigenvalue_raw,
        "eigenvalue_hadamard": result.eigenvalue_hadamard,
        "rms": result.rms_residual,
        "iterations": result.iterations,
        "converged": result.converged,
        "log": [{"iteration": i, "rho": rho, "rms": rms} for i, rho, rms in result.per_iteration_log],
        "version": __version__,
    }


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_result(path):
    """Rebuild (params, shape, grid, doc) from a result document."""
    doc = json.loads(Path(path).read_text())
    params = LevelSetParams(doc["rho"], tuple(doc["coefficients"]), doc["sym_step"])
    return params, shape_from_spec(doc["shape"]), QuadratureGrid(doc["grid"]["m_angles"]), doc


def boundary_table(params, shape, grid, cfg=DEFAULT_ROOT):
    """Rows (theta, R, r_u, D) at the grid angles."""
    rows = []
    for t in grid.thetas:
        big_r = float(shape.radius(t))
        r_u = levelset_radius(params, t, big_r, cfg)
        rows.append((float(t), big_r, r_u, big_r - r_u))
    return rows


def format_table(header, rows):
    lines = ["\t".join(header)]
    lines += ["\t".join(repr(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def coefficient_rows(params):
    return [(k, abs(c)) for k, c in enumerate(params.coeffs, start=1)]


def _write(out_dir, files):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out_dir / name).write_text(text)


def cmd_fit(cfg):
    shape, grid, result = run_fit(cfg)
    doc = dumps(result_document(cfg, result))
    if cfg["out"] is None:
        sys.stdout.write(doc)
    else:
        _write(cfg["out"], {
            "result.json": doc,
            "boundary.tsv": format_table(("theta", "R", "r_u", "D"), boundary_table(result.params, shape, grid)),
            "coefficients.tsv": format_table(("k", "abs_P"), coefficient_rows(result.params)),
        })
        print(f"eigenvalue_raw={result.eigenvalue_raw!r} eigenvalue_hadamard={result.eigenvalue_hadamard!r} "
              f"rms={result.rms_residual:.3e}")
    if not result.converged:
        log.error("fit did not converge in %d iterations (rms %.3e)", result.iterations, result.rms_residual)
        return EXIT_NOT_CONVERGED
    return 0


def cmd_oracle(cfg):
    shape = build_shape(cfg)
    res = oracle_eigenvalue(shape, hs=tuple(float(h) for h in cfg["h"]), seed=cfg["seed"])
    doc = dumps({
        "shape": shape_spec(cfg),
        "estimates": [{"h": h, "eigenvalue": lam} for h, lam in res.eigenvalue_estimates],
        "extrapolated": res.extrapolated,
        "estimated_error": res.estimated_error,
        "version": __version__,
    })
    if cfg["out"] is None:
        sys.stdout.write(doc)
    else:
        _write(cfg["out"], {
            "oracle.json": doc,
            "oracle.tsv": format_table(("h", "eigenvalue"), res.eigenvalue_estimates),
        })
        print(f"extrapolated={res.extrapolated!r} estimated_error={res.estimated_error:.3e}")
    return 0


def cmd_check(cfg):
    outcomes = run_checks(cfg["seed"])
    for o in outcomes:
        print(o.line())
    failed = sum(not o.passed for o in outcomes)
    print(f"{len(outcomes) - failed}/{len(outcomes)} properties passed (seed {cfg['seed']})")
    return 0 if failed == 0 else EXIT_RUNTIME


def cmd_dump_boundary(cfg, result_path=None):
    if result_path is not None:
        params, shape, grid, _ = load_result(result_path)
    else:
        shape, grid, result = run_fit(cfg)
        params = result.params
    table = format_table(("theta", "R", "r_u", "D"), boundary_table(params, shape, grid))
    if cfg["out"] is None:
        sys.stdout.write(table)
    else:
        _write(cfg["out"], {"boundary.tsv": table})
    return 0


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with the same keys as the flags")
    common.add_argument("--shape", choices=SHAPES)
    common.add_argument("--a", type=_positive_float, help="ellipse semiaxis along x")
    common.add_argument("--b", type=_positive_float, help="ellipse semiaxis along y")
    common.add_argument("--radius", type=_positive_float, help="circle radius")
    common.add_argument("--r0", type=_positive_float, help="Fourier boundary mean radius")
    common.add_argument("--cos", type=float, nargs="*", help="Fourier cosine coefficients, k = 1, 2, ...")
    common.add_argument("--sin", type=float, nargs="*", help="Fourier sine coefficients, k = 1, 2, ...")
    common.add_argument("--terms", type=int, help="number of coefficients P_1..P_N")
    common.add_argument("--sym", type=int, help="angular symmetry step (default: detected from the shape)")
    common.add_argument("--grid", type=int, help="number of quadrature angles")
    common.add_argument("--optimizer", choices=OPTIMIZERS)
    common.add_argument("--tol", type=_positive_float, help="stop once the RMS gap is below this")
    common.add_argument("--max-iter", dest="max_iter", type=int)
    common.add_argument("--hadamard", action=argparse.BooleanOptionalAction, default=None,
                        help="report the Hadamard-corrected eigenvalue")
    common.add_argument("--out", help="output directory (default: print to stdout)")
    common.add_argument("--seed", type=int, help="seed for randomized checks and the oracle start vector")
    common.add_argument("-q", "--quiet", action="store_true", help="suppress per-iteration log lines")

    parser = argparse.ArgumentParser(prog="fbeig", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fit", parents=[common], help="fit the level set and report the eigenvalue")
    p_oracle = sub.add_parser("oracle", parents=[common], help="finite-difference reference eigenvalue")
    p_oracle.add_argument("--h", type=_positive_float, nargs="+", help="grid spacings, each half the previous")
    sub.add_parser("check", parents=[common], help="run the seeded property suite")
    p_dump = sub.add_parser("dump-boundary", parents=[common], help="write the (theta, R, r_u, D) table")
    p_dump.add_argument("--result", help="take parameters from this result.json instead of fitting")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, stream=sys.stderr,
                        format="%(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        parser.error(str(exc))
    try:
        if args.command == "fit":
            return cmd_fit(cfg)
        if args.command == "oracle":
            return cmd_oracle(cfg)
        if args.command == "check":
            return cmd_check(cfg)
        return cmd_dump_boundary(cfg, args.result)
    except (FitError, LevelSetError, OracleError, ConfigError, OSError, KeyError, ValueError) as exc:
        print(f"fbeig {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
