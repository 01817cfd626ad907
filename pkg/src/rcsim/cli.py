"""Command-line interface: scenario runs, sweeps, mapping inspection, plotting.

Exit codes: 0 success, 2 validation error, 3 solver failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

from . import mapping
from .errors import (
    CapacityError,
    ConvergenceError,
    DegeneracyError,
    IntegrationError,
    RcsimError,
    ValidationError,
)
from .plotting import plot as render_plot
from .runner import run_scenario
from .scenarios import builtin_scenarios, config_from_dict, load_config

CM1_PER_DELTA = 200.0  # human-readable anchor: delta = 200 cm^-1

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcsim",
        description="Spin-boson dynamics, steady states, and correlation measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, need_out=True):
        p.add_argument("--config", help="JSON scenario config file")
        if need_out:
            p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--solver", help="comma-separated solver list override")
        p.add_argument("--tol", type=float, help="integrator tolerance override")
        p.add_argument("--ratio", type=float, help="Omega/omega_c ratio override")
        p.add_argument("--threads", type=int, default=1, help="sweep worker count")

    for name in ("dynamics", "steady", "measures", "sweep"):
        add_common(sub.add_parser(name))

    p_scen = sub.add_parser("scenario", help="run a builtin named scenario")
    p_scen.add_argument("name", choices=sorted(builtin_scenarios()))
    p_scen.add_argument("--out", required=True)
    p_scen.add_argument("--threads", type=int, default=1)

    p_map = sub.add_parser("map", help="print reaction-coordinate parameters")
    p_map.add_argument("--config", help="JSON scenario config file")
    p_map.add_argument("--pi-alpha", type=float, help="coupling pi*alpha (with no config)")
    p_map.add_argument("--omega-c", type=float, default=0.05)
    p_map.add_argument("--epsilon", type=float, default=0.5)
    p_map.add_argument("--beta", type=float, default=0.95)
    p_map.add_argument("--ratio", type=float, default=100.0)

    p_plot = sub.add_parser("plot", help="render CSV columns as an SVG line plot")
    p_plot.add_argument("--csv", required=True)
    p_plot.add_argument("--x", required=True)
    p_plot.add_argument("--y", required=True, help="comma-separated y columns")
    p_plot.add_argument("--out", required=True, help="output SVG path")
    return parser


def _resolve_config(args, default_measures=None):
    if args.config:
        config = load_config(args.config)
    else:
        raise ValidationError("--config is required for this command")
    overrides = {}
    if getattr(args, "solver", None):
        overrides["solvers"] = tuple(s.strip() for s in args.solver.split(","))
    if getattr(args, "ratio", None) is not None:
        overrides["ratio"] = args.ratio
    if getattr(args, "tol", None) is not None:
        tols = dict(config.tolerances)
        tols["solver"] = args.tol
        overrides["tolerances"] = tols
    if default_measures is not None and "measures" not in overrides:
        overrides["measures"] = default_measures
    if overrides:
        config = dataclasses.replace(config, **overrides)
    return config


def _cmd_run(args, default_measures=None, require_sweep=False):
    config = _resolve_config(args, default_measures)
    if require_sweep and config.sweep is None:
        raise ValidationError("sweep: this command needs a sweep section in the config")
    if not require_sweep and config.sweep is not None and args.command != "sweep":
        config = dataclasses.replace(config, sweep=None)
    run_scenario(config, args.out, threads=args.threads)
    return EXIT_OK


def _cmd_map(args):
    if args.config:
        params = load_config(args.config).params
        ratio = args.ratio
    else:
        if args.pi_alpha is None:
            raise ValidationError("map: give --config or --pi-alpha")
        from .core import SpinBosonParams

        params = SpinBosonParams(
            epsilon=args.epsilon,
            alpha=args.pi_alpha / math.pi,
            omega_c=args.omega_c,
            beta=args.beta,
        )
        ratio = args.ratio
    mapped = mapping.map_to_rc(params, ratio)
    out = {
        "lambda": mapped.lam,
        "Omega": mapped.Omega,
        "gamma": mapped.gamma,
        "ratio": ratio,
        "physical": {
            "anchor_delta_cm1": CM1_PER_DELTA,
            "lambda_cm1": mapped.lam * CM1_PER_DELTA,
            "Omega_cm1": mapped.Omega * CM1_PER_DELTA,
        },
    }
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_scenario(args):
    config = builtin_scenarios()[args.name]
    run_scenario(config, args.out, threads=args.threads)
    return EXIT_OK


def _cmd_plot(args):
    render_plot(args.csv, args.x, [c.strip() for c in args.y.split(",")], args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "dynamics":
            return _cmd_run(args, default_measures=("population",))
        if args.command == "steady":
            return _cmd_run(args, default_measures=("steady", "eigenbasis"))
        if args.command == "measures":
            return _cmd_run(args, default_measures=("qmi", "nongauss"))
        if args.command == "sweep":
            return _cmd_run(args, require_sweep=True)
        if args.command == "scenario":
            return _cmd_scenario(args)
        if args.command == "map":
            return _cmd_map(args)
        if args.command == "plot":
            return _cmd_plot(args)
        raise ValidationError(f"unknown command {args.command!r}")
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConvergenceError, IntegrationError, DegeneracyError, CapacityError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RcsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
