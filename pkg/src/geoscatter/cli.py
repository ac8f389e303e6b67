"""Command-line interface: run sweeps, validate scenarios, run the oracle.

    geoscatter run <scenario.json> -o <out.csv> [--plot-script <out.py>]
    geoscatter validate <scenario.json>
    geoscatter oracle <scenario.json>

``run`` evaluates the scenario's sweep and writes the figure-ready CSV
(and optionally a matplotlib script).  ``oracle`` cross-checks the radial
central-defect integrals against brute-force planar quadrature at the
scenario's surface parameters and prints a pass/fail table.  The
GEOSCATTER_THREADS environment variable caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .experiment import (
    ScenarioParseError,
    ScenarioValidationError,
    SweepError,
    emit_csv,
    emit_plot_script,
    load_scenario,
    run_sweep,
    scenario_comment_lines,
)
from .geom_amp import (
    central_defect_integrals,
    plane_integrand_central_i11,
    plane_integrand_central_i1111,
)
from .plane_defects import Kinematics
from .quad import QuadratureSpec, integrate_plane

_ORACLE_TOL = 1e-6


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    t0 = time.perf_counter()
    rows = run_sweep(scenario)
    elapsed = time.perf_counter() - t0
    emit_csv(rows, args.output, comments=scenario_comment_lines(scenario))
    print(f"wrote {args.output} ({len(rows)} rows, {elapsed:.2f} s)")
    if args.plot_script:
        emit_plot_script(rows, args.plot_script, csv_name=args.output)
        print(f"wrote {args.plot_script}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    print(f"OK: {scenario.name}")
    for line in scenario_comment_lines(scenario):
        print(f"  {line}")
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.surface is None or not scenario.surface.bumps:
        print("flat surface: geometric integrals vanish identically; nothing to check")
        return 0
    from .geom_amp import _bump_profile  # shared cache with the sweep path

    params = scenario.surface.bumps[0][0]
    profile = _bump_profile(params)
    sweep = scenario.sweep
    if sweep.kind == "theta_sweep":
        k_sigma = sweep.fixed
    else:
        k_sigma = 0.5 * (sweep.grid.min + sweep.grid.max)
    kin = Kinematics(
        k=k_sigma / params.sigma,
        theta0=scenario.theta0,
        theta=scenario.theta0 + np.pi / 3,
    )
    l1, l2 = scenario.lambda1, scenario.lambda2
    print(
        f"central-defect oracle at eta={params.eta:g}, k*sigma={k_sigma:g}, "
        f"lambda1={l1:g}, lambda2={l2:g}"
    )
    radial = central_defect_integrals(profile, kin.k, l1, l2, scenario.quadrature)
    plane_spec = QuadratureSpec(
        rel_tol=1e-8,
        abs_tol=1e-11,
        truncation_radius=scenario.quadrature.truncation_radius,
        max_subdivisions=scenario.quadrature.max_subdivisions,
    )
    radius = scenario.quadrature.truncation_radius * params.sigma
    planar = (
        integrate_plane(plane_integrand_central_i11(profile, kin, l1, l2), radius, plane_spec),
        integrate_plane(plane_integrand_central_i1111(profile, kin, l1, l2), radius, plane_spec),
    )
    print(f"{'integral':>10} {'radial':>28} {'planar':>28} {'rel diff':>12} {'':>6}")
    all_ok = True
    for name, rad, pla in zip(("I11", "I1111"), radial, planar):
        denom = max(abs(pla), 1e-300)
        rel = abs(rad - pla) / denom
        ok = rel <= _ORACLE_TOL
        all_ok = all_ok and ok
        print(f"{name:>10} {rad:>28.15g} {pla:>28.15g} {rel:>12.3e} {'PASS' if ok else 'FAIL':>6}")
    return 0 if all_ok else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoscatter",
        description="Scattering on a curved surface with point defects",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario sweep and write CSV")
    p_run.add_argument("scenario", help="scenario JSON file")
    p_run.add_argument("-o", "--output", required=True, help="output CSV path")
    p_run.add_argument("--plot-script", help="also write a matplotlib script here")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="validate a scenario file")
    p_val.add_argument("scenario", help="scenario JSON file")
    p_val.set_defaults(func=_cmd_validate)

    p_orc = sub.add_parser(
        "oracle", help="cross-check radial integrals against planar quadrature"
    )
    p_orc.add_argument("scenario", help="scenario JSON file")
    p_orc.set_defaults(func=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioParseError, ScenarioValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
