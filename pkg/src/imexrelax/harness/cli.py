"""Command-line front end.

    imexrelax run <config-file>
    imexrelax tableau check <registry-file> <name> [--order N]
    imexrelax list-models

Exit codes for `run`: 0 success, 2 any aborted cell, 1 configuration error.
"""

from __future__ import annotations

import argparse
import sys

from ..errors import ConfigurationError, ImexRelaxError, RegistryParseError, TableauValidationError
from ..tableau import (
    check_order_conditions,
    classify,
    is_globally_stiffly_accurate,
    is_stiffly_accurate,
    load_tableau,
    validate,
)
from .config import KNOWN_MODELS, load_config
from .experiments import run_experiment

MODEL_BLURBS = {
    "r13": "channel model (velocity / shear stress / heat flux) in the diffusive scaling",
    "diffusive2x2": "2x2 relaxation system with p(u), q(u) closures and the parabolic limit",
    "klf": "nonlinear |v|^(m-1) v relaxation with degenerate diffusion limit",
    "broadwell": "3x3 discrete-velocity model with WENO flux-split convection",
    "vdp": "Van der Pol oscillator in relaxation form (stiff ODE benchmark)",
}


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        report = run_experiment(cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    if cfg.output_path:
        print(f"wrote {len(report.rows)} rows to {cfg.output_path}")
    else:
        print(report.to_csv(), end="")
    if report.aborted:
        print("warning: aborted cells present (flag=abort)", file=sys.stderr)
        return 2
    return 0


def _cmd_tableau_check(args) -> int:
    try:
        with open(args.registry) as fh:
            text = fh.read()
        tab = load_tableau(text, args.name)
    except (OSError, RegistryParseError, TableauValidationError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    rep = validate(tab)
    print(f"scheme {tab.name}: stages {tab.s}")
    if rep.violations:
        print("validation violations:")
        for v in rep.violations:
            print("  -", v)
        return 1
    print("validation: ok")
    try:
        cls = classify(tab)
        print(f"class: {cls.kind} ({cls.diagnostic})")
    except ImexRelaxError as exc:
        print(f"class: unclassifiable ({exc})")
    print(f"stiffly accurate (implicit): {is_stiffly_accurate(tab.implicit)}")
    print(f"globally stiffly accurate:   {is_globally_stiffly_accurate(tab)}")
    preport = check_order_conditions(tab, args.order)
    print(f"satisfied order (target {args.order}): {preport.satisfied_order}")
    if preport.nonstandard_coupling:
        print("note: ctilde != c, coupling conditions flagged nonstandard")
    if preport.failed_conditions:
        print("failed conditions:")
        for ident, res in preport.failed_conditions:
            print(f"  - {ident}: residual {res:.3e}")
    return 0


def _cmd_list_models(args) -> int:
    for name in KNOWN_MODELS:
        print(f"{name:14s} {MODEL_BLURBS[name]}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="imexrelax",
                                     description="IMEX Runge-Kutta relaxation-system toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.set_defaults(func=_cmd_run)

    p_tab = sub.add_parser("tableau", help="tableau utilities")
    tab_sub = p_tab.add_subparsers(dest="tableau_command", required=True)
    p_check = tab_sub.add_parser("check", help="validate and property-check a registry entry")
    p_check.add_argument("registry")
    p_check.add_argument("name")
    p_check.add_argument("--order", type=int, default=3)
    p_check.set_defaults(func=_cmd_tableau_check)

    p_list = sub.add_parser("list-models", help="list available models")
    p_list.set_defaults(func=_cmd_list_models)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
