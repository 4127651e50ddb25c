"""``hawkes`` command-line entry point.

Exit codes: 0 ok, 2 configuration error, 3 infeasible tilt, 4 unstable model.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness
from .branching import naive_transient_estimate
from .errors import ConfigError, HawkesError
from .model import validate_model
from .optimize import optimize_eta
from .tilt import complexity_X, solve_psi_B


def _model(args):
    return harness.resolve_model(args.config)


def cmd_validate(args) -> int:
    report = validate_model(_model(args), raise_on_error=False)
    print(json.dumps(report.to_dict(), indent=2))
    if not report.positive_background:
        return ConfigError.exit_code
    return 0 if report.stable else 4


def cmd_cgf(args) -> int:
    params = _model(args)
    validate_model(params)
    sol = solve_psi_B(params, args.theta).require_feasible()
    out = {
        "theta": args.theta,
        "psi_B": sol.psi_B.tolist(),
        "h_tilde": sol.h_tilde.tolist(),
        "s_tilde_rowsums": sol.s_tilde_rowsums.tolist(),
        "X": complexity_X(params, np.full(params.d, args.theta)) if args.theta > 0 else None,
    }
    print(json.dumps(out, indent=2))
    return 0


def cmd_optimize(args) -> int:
    print(json.dumps(optimize_eta(_model(args), tol=args.tol).to_dict(), indent=2))
    return 0


def cmd_sample(args) -> int:
    config = harness.RunConfig(
        model=args.config,
        horizon=args.horizon,
        reps=args.reps,
        eta=args.eta,
        seed=args.seed,
        events_out=args.out,
        summary_out=args.summary,
        workers=args.workers,
    )
    summary = harness.run_replications(config)
    if args.summary is None:
        print(summary.to_json())
    return 0


def cmd_naive(args) -> int:
    table = naive_transient_estimate(_model(args), args.horizon, args.window, args.reps, args.seed)
    if args.out is None:
        for t, j, m, h in table.rows():
            print(f"{t:.12g},{j},{m:.12g},{h:.12g}")
    harness.write_window_csv(args.out, table)
    return 0


def cmd_table1(args) -> int:
    rows = harness.reproduce_table1(args.out, reps=args.reps, seed=args.seed, workers=args.workers)
    _echo(rows, args.out)
    return 0


def cmd_table2(args) -> int:
    rows = harness.reproduce_table2(args.out, reps=args.reps, seed=args.seed, workers=args.workers)
    _echo(rows, args.out)
    return 0


def cmd_figure1(args) -> int:
    table = harness.reproduce_figure1(args.out, reps=args.reps, seed=args.seed)
    if args.out is None:
        for t, j, m, h in table.rows():
            print(f"{t:.12g},{j},{m:.12g},{h:.12g}")
    return 0


def _echo(rows, out):
    if out is None:
        print(json.dumps(rows, indent=2))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hawkes", description="Perfect sampling of stationary multivariate Hawkes processes.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument(
            "--config", required=True, help="model JSON file, or a bundled name: " + ", ".join(harness.BUNDLED)
        )
        return sp

    sp = with_config(sub.add_parser("validate", help="check positivity and stability"))
    sp.set_defaults(func=cmd_validate)

    sp = with_config(sub.add_parser("cgf", help="cumulant solution and cost at one tilt"))
    sp.add_argument("--theta", type=float, required=True)
    sp.set_defaults(func=cmd_cgf)

    sp = with_config(sub.add_parser("optimize-eta", help="cost-minimizing tilt vector"))
    sp.add_argument("--tol", type=float, default=1e-5)
    sp.set_defaults(func=cmd_optimize)

    sp = with_config(sub.add_parser("sample", help="stationary paths by perfect sampling"))
    sp.add_argument("--horizon", type=float, default=1.0)
    sp.add_argument("--reps", type=int, default=10_000)
    sp.add_argument("--eta", default="auto", help="'auto' or comma-separated tilts")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path)
    sp.add_argument("--summary", type=Path)
    sp.add_argument("--workers", type=int)
    sp.set_defaults(func=cmd_sample)

    sp = with_config(sub.add_parser("naive", help="forward simulation from an empty start, windowed rates"))
    sp.add_argument("--horizon", type=float, default=10.0)
    sp.add_argument("--window", type=float, default=1.0)
    sp.add_argument("--reps", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path)
    sp.set_defaults(func=cmd_naive)

    for name, func, helptext in (
        ("reproduce-table1", cmd_table1, "symmetric 2-d model over the tilt grid"),
        ("reproduce-table2", cmd_table2, "5-d model, perfect vs naive"),
        ("reproduce-figure1", cmd_figure1, "5-d naive window rates"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--reps", type=int, default=10_000)
        sp.add_argument("--seed", type=int, default=2020)
        sp.add_argument("--out", type=Path)
        if func is not cmd_figure1:
            sp.add_argument("--workers", type=int)
        sp.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except HawkesError as exc:
        print(f"hawkes: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"hawkes: error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
