"""Command-line interface.

Subcommands::

    mladlasso fit --y Y.csv --x X.csv [--lambda L | --cv-folds K]
                  [--adaptive/--no-adaptive] [--add-intercept] [--header]
                  [--seed S] [--out DIR] [--strict] [--config FILE]
    mladlasso simulate --scenario {genotype|zeros} [--replicates R]
                  [--contaminate] [--seed S] [--out DIR]
    mladlasso reproduce [--only NAME] [--seed S]

Inputs are headerless numeric CSV (rows = observations); ``--header`` skips
one line.  Floats are written in shortest round-trip decimal form, so a
write-then-read cycle is exact.  Option precedence: command-line flags >
config file (flat ``key=value`` lines) > built-in defaults.

Exit codes: 0 success, 1 failed reproduction criterion, 2 malformed input,
3 solver non-convergence under ``--strict``.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import sim
from .core import ensure_intercept, row_group_norms
from .lad_solver import SolverOptions
from .lasso import AdaptiveFitOptions, fit_adaptive, fit_lad_lasso

EXIT_OK = 0
EXIT_CRITERION_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NOT_CONVERGED = 3


class InputError(Exception):
    """Malformed input file or option combination (exit code 2)."""


def _fmt(value):
    # shortest round-trip decimal representation
    return repr(float(value))


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])


def write_matrix_csv(path, M, header=None):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w", newline="") as fh:
        if header is not None:
            fh.write(",".join(header) + "\n")
        for row in M:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_matrix_csv(path, header=False):
    try:
        M = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"{path}: malformed numeric CSV ({exc})") from exc
    if M.size == 0:
        raise InputError(f"{path}: no data rows")
    return M


def read_config(path):
    """Flat key=value config file; '#' starts a comment line."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{path}: line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _resolve(flag_value, config, key, default, cast):
    if flag_value is not None:
        return flag_value
    if key in config:
        raw = config[key]
        if cast is bool:
            if raw.lower() in ("1", "true", "yes"):
                return True
            if raw.lower() in ("0", "false", "no"):
                return False
            raise InputError(f"config key {key}: expected a boolean, got {raw!r}")
        try:
            return cast(raw)
        except ValueError as exc:
            raise InputError(f"config key {key}: {exc}") from exc
    return default


def cmd_fit(args):
    config = read_config(args.config) if args.config else {}
    lam = _resolve(getattr(args, "lambda"), config, "lambda", None, float)
    folds = _resolve(args.cv_folds, config, "cv_folds", 5, int)
    adaptive = _resolve(args.adaptive, config, "adaptive", True, bool)
    add_intercept = _resolve(args.add_intercept, config, "add_intercept", False, bool)
    header = _resolve(args.header, config, "header", False, bool)
    seed = _resolve(args.seed, config, "seed", 0, int)
    strict = _resolve(args.strict, config, "strict", False, bool)
    out_dir = Path(_resolve(args.out, config, "out", ".", str))
    out_dir.mkdir(parents=True, exist_ok=True)

    Y = read_matrix_csv(args.y, header)
    X = read_matrix_csv(args.x, header)
    if X.shape[0] != Y.shape[0]:
        raise InputError(
            f"{args.x} has {X.shape[0]} rows but {args.y} has {Y.shape[0]}"
        )
    intercept_added = False
    if add_intercept:
        X, intercept_added = ensure_intercept(X)
    elif not np.all(X[:, 0] == 1.0):
        raise InputError(
            f"{args.x}: first column is not an all-ones intercept column "
            "(pass --add-intercept to prepend one)"
        )

    solver_opts = SolverOptions()
    lambda_path = []
    if adaptive:
        opts = AdaptiveFitOptions(
            lambda_grid=np.array([lam]) if lam is not None else None,
            folds=folds,
            rng_seed=seed,
        )
        fit, trace = fit_adaptive(Y, X, opts, solver_opts)
        lambda_path = list(trace.lambda_path)
    else:
        if lam is not None:
            fit = fit_lad_lasso(Y, X, lam, solver_options=solver_opts)
        else:
            from .lasso import default_lambda_grid
            from .model_select import make_folds, select_lambda

            grid = default_lambda_grid(Y, X, solver_options=solver_opts)
            cv = select_lambda(Y, X, grid, np.ones(X.shape[1] - 1),
                               make_folds(X.shape[0], folds, seed), solver_opts)
            fit = fit_lad_lasso(Y, X, cv.selected_lambda, solver_options=solver_opts)
        lambda_path = [fit.lam]

    p = Y.shape[1]
    write_matrix_csv(out_dir / "coefficients.csv", fit.coefficients,
                     header=[f"outcome_{k + 1}" for k in range(p)])
    _write_csv(
        out_dir / "support.csv",
        ["covariate_index", "row_norm"],
        [(j, float(fit.group_norms[j - 1])) for j in sorted(fit.support)],
    )
    diagnostics = {
        "selected_lambda": fit.lam,
        "lambda_path": lambda_path,
        "iterations": fit.iterations,
        "objective": fit.objective,
        "converged": fit.converged,
        "adaptive": adaptive,
        "intercept_added": intercept_added,
        "seed": seed,
        "n": int(Y.shape[0]),
        "q": int(X.shape[1]),
        "p": int(p),
    }
    (out_dir / "diagnostics.json").write_text(json.dumps(diagnostics, indent=2) + "\n")
    if strict and not fit.converged:
        print("solver did not converge within the iteration budget", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_simulate(args):
    config = read_config(args.config) if args.config else {}
    scenario = _resolve(args.scenario, config, "scenario", None, str)
    if scenario not in ("genotype", "zeros"):
        raise InputError(f"unknown scenario {scenario!r} (expected genotype or zeros)")
    replicates = _resolve(args.replicates, config, "replicates", None,
                          int) or (20 if scenario == "genotype" else 100)
    seed = _resolve(args.seed, config, "seed", 0, int)
    contaminated = _resolve(args.contaminate, config, "contaminate", False, bool)
    out_dir = Path(_resolve(args.out, config, "out", ".", str))
    out_dir.mkdir(parents=True, exist_ok=True)

    result = sim.run_study(scenario, replicates=replicates, seed=seed,
                           contaminated=contaminated)
    _write_csv(
        out_dir / "metrics.csv",
        ["scenario_id", "method", "replicate", "metric_name", "value"],
        [(r["scenario_id"], r["method"], r["replicate"], r["metric_name"],
          float(r["value"])) for r in result.rows],
    )
    agg_keys = sorted({k for a in result.aggregates for k in a})
    front = [k for k in ("scenario_id", "method", "metric_name") if k in agg_keys]
    rest = [k for k in agg_keys if k not in front]
    _write_csv(
        out_dir / "aggregates.csv",
        front + rest,
        [tuple(a.get(k, "") for k in front + rest) for a in result.aggregates],
    )
    if scenario == "genotype":
        _write_csv(
            out_dir / "marker_effects.csv",
            ["scenario_id", "marker", "method", "effect_norm"],
            [(m["scenario_id"], m["marker"], m["method"], float(m["effect_norm"]))
             for m in result.marker_profiles],
        )
        _write_csv(
            out_dir / "bias_long.csv",
            ["scenario_id", "method", "replicate", "marker", "outcome", "bias"],
            [(r["scenario_id"], r["method"], r["replicate"],
              int(r["metric_name"].split("_")[1].removeprefix("marker")),
              int(r["metric_name"].split("_")[2].removeprefix("outcome")),
              float(r["value"])) for r in result.rows],
        )
    return EXIT_OK


def cmd_reproduce(args):
    from . import acceptance

    ok = acceptance.run(only=args.only, seed=args.seed)
    return EXIT_OK if ok else EXIT_CRITERION_FAILED


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mladlasso",
        description="Multioutcome adaptive LAD-lasso: fitting, simulation "
                    "studies, and result reproduction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit a (adaptive) LAD-lasso model from CSV data")
    fit.add_argument("--y", required=True, help="response matrix CSV (rows = observations)")
    fit.add_argument("--x", required=True, help="design matrix CSV")
    fit.add_argument("--lambda", type=float, default=None,
                     help="fixed penalty value (skips cross-validation)")
    fit.add_argument("--cv-folds", type=int, default=None,
                     help="cross-validation folds (default 5)")
    fit.add_argument("--adaptive", action=argparse.BooleanOptionalAction, default=None,
                     help="adaptive reweighting (default: on)")
    fit.add_argument("--add-intercept", action=argparse.BooleanOptionalAction,
                     default=None, help="prepend an all-ones intercept column")
    fit.add_argument("--header", action=argparse.BooleanOptionalAction, default=None,
                     help="input CSVs carry one header line")
    fit.add_argument("--strict", action=argparse.BooleanOptionalAction, default=None,
                     help="exit 3 if the solver did not converge")
    fit.add_argument("--seed", type=int, default=None)
    fit.add_argument("--out", default=None, help="output directory (default: cwd)")
    fit.add_argument("--config", default=None, help="key=value config file")
    fit.set_defaults(func=cmd_fit)

    simulate = sub.add_parser("simulate", help="run a simulation study")
    simulate.add_argument("--scenario", choices=("genotype", "zeros"), default=None)
    simulate.add_argument("--replicates", type=int, default=None)
    simulate.add_argument("--contaminate", action=argparse.BooleanOptionalAction,
                          default=None, help="genotype study: scale two responses by 100")
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--out", default=None)
    simulate.add_argument("--config", default=None)
    simulate.set_defaults(func=cmd_simulate)

    reproduce = sub.add_parser("reproduce", help="run the acceptance suite")
    reproduce.add_argument("--only", default=None,
                           help="run only criteria whose name contains this string")
    reproduce.add_argument("--seed", type=int, default=None,
                           help="override the default seeds of stochastic criteria")
    reproduce.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
