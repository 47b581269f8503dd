"""Command-line entry point: ``varrestrict <subcommand> [options]``.

Each subcommand writes one JSON report to ``--output`` (or standard output)
wrapping the library result with the tool name, version, subcommand and a
fingerprint of the resolved configuration.  Validation errors exit with code 2
and a JSON error object on standard error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings

import numpy as np

from . import __version__
from .errors import DomainError
from ._jsonio import fingerprint, jsonable
from .estimates import (condition_a_l2_probe, condition_c_probe, maximal_ratio, theorem1_ratio,
                        tomas_stein_ratio)
from .fourier import EpsLadder, Grid3D, TestFunction
from .gaussdom import domination_ratio, radius_profile, write_profile_csv
from .measures import (MeasureSpec, check_ring_identity, decay_exponents, grad_mu_hat, mu_hat,
                       mu_hat_quadrature, vartheta)
from .search import SearchConfig, optimize_ratio
from .sphere import build_sphere_grid
from .variation import SampledCurve, SampledSurface, bivar_seminorm, var_norm, var_seminorm

TOOL = "varrestrict"


class CliError(Exception):
    """Invalid invocation or configuration; reported with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# --- I/O helpers ---------------------------------------------------------------

def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}") from None


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def _atomic(path: str, write) -> None:
    """Call ``write(tmp)`` on a temporary file next to ``path``, then rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    os.close(fd)
    try:
        write(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write(path: str, text: str) -> None:
    def write(tmp):
        with open(tmp, "w") as fh:
            fh.write(text)
    _atomic(path, write)


def _config_file(args, allowed: set) -> dict:
    if args.config is None:
        return {}
    data = _read_json(args.config)
    if not isinstance(data, dict):
        raise CliError("a config file must hold a JSON object")
    unknown = set(data) - allowed
    if unknown:
        raise CliError(f"unknown config keys: {sorted(unknown)}")
    return data


def _measure(data) -> MeasureSpec:
    return MeasureSpec.from_dict(data)


def _measure_from_args(args) -> MeasureSpec:
    if args.measure == "gaussian":
        return MeasureSpec.gaussian(1.0 if args.alpha is None else args.alpha)
    if args.alpha is not None:
        raise CliError("--alpha only applies to the gaussian measure")
    return MeasureSpec(args.measure)


def _rho_value(v) -> float:
    if isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return math.inf
    return float(v)


def _random_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    d = rng.normal(size=(n, 3))
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def _sample_points(cfg: dict, default_count: int = 16) -> tuple[np.ndarray, np.ndarray | None]:
    """Explicit ``samples`` or ``sample_count`` Gaussian points from ``seed``."""
    if "samples" in cfg:
        pts = np.asarray(cfg["samples"], dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] == 0:
            raise CliError("samples must be a nonempty list of 3-vectors")
    else:
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        pts = rng.normal(scale=float(cfg.get("sample_spread", 1.0)),
                         size=(int(cfg.get("sample_count", default_count)), 3))
    w = cfg.get("weights")
    return pts, None if w is None else np.asarray(w, dtype=float)


# --- subcommands -----------------------------------------------------------------

def cmd_variation(args):
    data = _read_json(args.input)
    rho = _rho_value(args.rho)
    if isinstance(data, dict) and "eps_params" in data:
        surface = SampledSurface.from_dict(data)
        res = bivar_seminorm(surface, rho, mode=args.mode)
        config = {"surface": surface.to_dict(), "rho": rho, "mode": args.mode}
    else:
        curve = SampledCurve.from_dict(data)
        res = (var_norm if args.which == "norm" else var_seminorm)(curve, rho)
        config = {"curve": curve.to_dict(), "rho": rho, "which": args.which}
    return config, res.to_dict()


def cmd_muhat(args):
    spec = _measure_from_args(args)
    if args.points is not None:
        pts = np.asarray(_read_json(args.points), dtype=float)
    else:
        pts = np.asarray([args.point], dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise CliError("points must be a list of 3-vectors")
    result = {"points": pts, "mu_hat": np.atleast_1d(mu_hat(spec, pts)),
              "vartheta": np.atleast_1d(vartheta(spec, pts)),
              "grad_mu_hat": grad_mu_hat(spec, pts)}
    if args.check_quadrature:
        quad = np.atleast_1d(mu_hat_quadrature(spec, pts))
        result["quadrature_abs_diff"] = np.abs(quad - result["mu_hat"])
    config = {"spec": spec.to_dict(), "points": pts, "check_quadrature": args.check_quadrature}
    return config, result


def cmd_ring_check(args):
    spec = _measure_from_args(args)
    x = np.asarray(args.x, dtype=float)
    residual = check_ring_identity(spec, x, args.a, args.b, args.quad_points)
    config = {"spec": spec.to_dict(), "x": x, "a": args.a, "b": args.b,
              "quad_points": args.quad_points}
    return config, {"residual": residual}


def cmd_decay(args):
    spec = _measure_from_args(args)
    radii = np.geomspace(args.r_min, args.r_max, args.count)
    est = decay_exponents(spec, radii, directions=args.directions, seed=args.seed)
    config = {"spec": spec.to_dict(), "radii": radii, "directions": args.directions,
              "seed": args.seed}
    return config, est.to_dict()


_SPHERE_KEYS = {"f", "measure", "rho", "grid_level", "ladder", "grid3d"}


def _sphere_setup(cfg: dict):
    f = TestFunction.from_dict(cfg["f"]) if "f" in cfg else TestFunction.gaussian()
    spec = _measure(cfg.get("measure", {"kind": "gaussian", "alpha": 1.0}))
    grid_level = int(cfg.get("grid_level", 8))
    ladder = EpsLadder.from_dict(cfg.get("ladder", {}))
    grid3d = Grid3D.from_dict(cfg.get("grid3d", {}))
    return f, spec, grid_level, ladder, grid3d


def cmd_verify_theorem1(args):
    cfg = _config_file(args, _SPHERE_KEYS)
    f, spec, level, ladder, grid3d = _sphere_setup(cfg)
    rho = _rho_value(cfg.get("rho", 3.0))
    report = theorem1_ratio(f, spec, rho, build_sphere_grid(level), ladder, grid3d)
    config = {"f": f.to_dict(), "measure": spec.to_dict(), "rho": rho, "grid_level": level,
              "ladder": ladder.to_dict(), "grid3d": grid3d.to_dict()}
    return config, report.to_dict()


def cmd_maximal(args):
    cfg = _config_file(args, _SPHERE_KEYS - {"rho"})
    f, spec, level, ladder, grid3d = _sphere_setup(cfg)
    report = maximal_ratio(f, spec, build_sphere_grid(level), ladder, grid3d)
    config = {"f": f.to_dict(), "measure": spec.to_dict(), "grid_level": level,
              "ladder": ladder.to_dict(), "grid3d": grid3d.to_dict()}
    return config, report.to_dict()


_PROBE_KEYS = {"h", "measure", "rho", "samples", "sample_count", "sample_spread", "seed",
               "weights", "grid3d"}


def _default_h(cfg: dict) -> TestFunction:
    if "h" in cfg:
        return TestFunction.from_dict(cfg["h"])
    return TestFunction.gaussian(1.0, (0.2, -0.1, 0.3), 1.0, (0.3, 0.0, -0.4))


def cmd_condition_a(args):
    cfg = _config_file(args, _PROBE_KEYS | {"ladder", "growth_check"})
    h = _default_h(cfg)
    spec = _measure(cfg.get("measure", {"kind": "gaussian", "alpha": 1.0}))
    rho = _rho_value(cfg.get("rho", 3.0))
    pts, w = _sample_points(cfg)
    ladder = EpsLadder.from_dict(cfg.get("ladder", {"count": 16}))
    grid3d = Grid3D.from_dict(cfg.get("grid3d", {}))
    growth = bool(cfg.get("growth_check", True))
    report = condition_a_l2_probe(h, spec, rho, pts, ladder, grid3d, w, growth)
    config = {"h": h.to_dict(), "measure": spec.to_dict(), "rho": rho, "samples": pts,
              "weights": w, "ladder": ladder.to_dict(), "grid3d": grid3d.to_dict(),
              "growth_check": growth}
    return config, report.to_dict()


def cmd_condition_c(args):
    cfg = _config_file(args, _PROBE_KEYS | {"eps_ladder", "eta_ladder", "mode"})
    h = _default_h(cfg)
    spec = _measure(cfg.get("measure", {"kind": "gaussian", "alpha": 1.0}))
    rho = _rho_value(cfg.get("rho", 3.0))
    pts, w = _sample_points(cfg, default_count=4)
    eps_l = EpsLadder.from_dict(cfg.get("eps_ladder", {"count": 6}))
    eta_l = EpsLadder.from_dict(cfg.get("eta_ladder", {"count": 6}))
    grid3d = Grid3D.from_dict(cfg.get("grid3d", {}))
    mode = cfg.get("mode", "exact")
    report = condition_c_probe(h, spec, rho, pts, eps_l, eta_l, grid3d, w, mode)
    config = {"h": h.to_dict(), "measure": spec.to_dict(), "rho": rho, "samples": pts,
              "weights": w, "eps_ladder": eps_l.to_dict(), "eta_ladder": eta_l.to_dict(),
              "grid3d": grid3d.to_dict(), "mode": mode}
    return config, report.to_dict()


def cmd_tomas_stein(args):
    cfg = _config_file(args, {"grid_level", "g", "h", "grid3d"})
    level = int(cfg.get("grid_level", 8))
    grid = build_sphere_grid(level)
    g_spec = cfg.get("g", "ones")
    if g_spec == "ones":
        g = np.ones(len(grid), dtype=complex)
    elif isinstance(g_spec, list):
        g = np.array([complex(*v) if isinstance(v, list) else complex(v) for v in g_spec])
    else:
        raise CliError("g must be \"ones\" or a list of per-node values")
    h = TestFunction.from_dict(cfg["h"]) if "h" in cfg else TestFunction.gaussian()
    grid3d = Grid3D.from_dict(cfg.get("grid3d", {}))
    report = tomas_stein_ratio(grid, g, h, grid3d)
    config = {"grid_level": level, "g": g, "h": h.to_dict(), "grid3d": grid3d.to_dict()}
    return config, report.to_dict()


def cmd_gauss_dom(args):
    spec = _measure_from_args(args)
    rng = np.random.default_rng(args.seed)
    radii = np.geomspace(args.r_min, args.r_max, args.samples)
    pts = radii[:, None] * _random_directions(rng, args.samples)
    report = domination_ratio(spec, args.delta, pts)
    config = {"spec": spec.to_dict(), "delta": args.delta, "samples": args.samples,
              "seed": args.seed, "r_min": args.r_min, "r_max": args.r_max}
    if args.profile_csv:
        profile = radius_profile(spec, args.delta, np.geomspace(args.r_min, args.r_max, 200))
        _atomic(args.profile_csv, lambda p: write_profile_csv(p, profile))
    return config, report.to_dict()


def cmd_search(args):
    data = _read_json(args.config) if args.config else {}
    if not isinstance(data, dict):
        raise CliError("a config file must hold a JSON object")
    config = SearchConfig.from_dict(data)
    trace = optimize_ratio(config)
    if args.trace_csv:
        _atomic(args.trace_csv, trace.to_csv)
    return config.to_dict(), trace.to_dict()


# --- parser ----------------------------------------------------------------------

def _add_measure(p):
    p.add_argument("--measure", choices=("gaussian", "ball", "sphere"), default="gaussian")
    p.add_argument("--alpha", type=float, default=None, help="gaussian parameter (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=TOOL, description="Variational Fourier restriction laboratory.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def command(name, fn, help_text, config=False, csv_flag=None):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        p.add_argument("--output", "-o", default=None, help="report path (default stdout)")
        if config:
            p.add_argument("--config", default=None, help="JSON experiment config")
        if csv_flag:
            p.add_argument(csv_flag, default=None, help="optional CSV profile path")
        return p

    p = command("variation", cmd_variation, "variation of a sampled curve or surface")
    p.add_argument("--input", required=True)
    p.add_argument("--rho", required=True)
    p.add_argument("--which", choices=("seminorm", "norm"), default="seminorm")
    p.add_argument("--mode", choices=("exact", "greedy"), default="exact")

    p = command("muhat", cmd_muhat, "Fourier transform of a catalogued measure")
    _add_measure(p)
    p.add_argument("--point", type=float, nargs=3, default=[0.0, 0.0, 1.0])
    p.add_argument("--points", default=None, help="JSON list of points")
    p.add_argument("--check-quadrature", action="store_true")

    p = command("ring-check", cmd_ring_check, "residual of the ring identity")
    _add_measure(p)
    p.add_argument("--x", type=float, nargs=3, default=[0.0, 0.0, 3.0])
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--b", type=float, default=4.0)
    p.add_argument("--quad-points", type=int, default=200)

    p = command("decay", cmd_decay, "fitted decay exponents of mu_hat and its gradient")
    _add_measure(p)
    p.add_argument("--r-min", type=float, default=10.0)
    p.add_argument("--r-max", type=float, default=1e4)
    p.add_argument("--count", type=int, default=24)
    p.add_argument("--directions", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)

    command("verify-theorem1", cmd_verify_theorem1, "variational restriction ratio", True)
    command("maximal", cmd_maximal, "maximal restriction ratio", True)
    command("condition-a", cmd_condition_a, "one-parameter variation probe", True)
    command("condition-c", cmd_condition_c, "biparameter variation probe", True)
    command("tomas-stein", cmd_tomas_stein, "bilinear restriction ratio", True)

    p = command("gauss-dom", cmd_gauss_dom, "Gaussian domination of vartheta",
                csv_flag="--profile-csv")
    _add_measure(p)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--r-min", type=float, default=1e-3)
    p.add_argument("--r-max", type=float, default=1e3)

    command("search", cmd_search, "seeded search for large ratios", True,
            csv_flag="--trace-csv")
    return parser


def _error(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")
    return 2


def run(argv=None) -> int:
    """Parse ``argv``, run the subcommand and emit its report; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            raise CliError("a subcommand is required")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            config, result = args.func(args)
    except CliError as exc:
        return _error("usage", str(exc))
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        return _error("validation", str(exc))
    payload = {
        "tool": TOOL,
        "version": __version__,
        "command": args.command,
        "config": config,
        "config_fingerprint": fingerprint({"command": args.command, **config}),
        "result": result,
        "warnings": sorted({str(w.message) for w in caught}),
    }
    text = dumps(payload)
    if args.output:
        try:
            atomic_write(args.output, text)
        except OSError as exc:
            return _error("io", f"cannot write {args.output}: {exc.strerror}")
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
