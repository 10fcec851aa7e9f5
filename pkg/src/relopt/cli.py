"""Command-line front end.

Subcommands:

    run       solve a model and write trajectory.jsonl / summary.json /
              trajectory.csv plus rendered figures into --out
    residual  print the stationarity residual at a state
    check     sampled audits of the cost floor, triangle inequality and
              over-estimate-vs-cost bound
    plot      re-render the figures from a saved run directory

Exit codes: 0 for a converged or certified run (and for successful
residual/check/plot calls), 2 when a run stopped on budget, 1 for
configuration or model errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .core import DomainError, RelOptError, StatePoint, Termination, ValidationError
from .diagnostics import (check_b1_conditions, check_triangle_inequality,
                          scan_overestimate_vs_cost, stationarity_residual)
from .models import MODEL_NAMES, make_model
from .reporting import (SUMMARY_NAME, TRAJECTORY_NAME, read_summary,
                        read_trajectory_jsonl, write_run_files)
from .solvers import (Budget, ScriptedPolicy, SearchMode, SearchPolicy,
                      ThresholdSchedule, sdm_solve, tdm_solve)

_POLICY_MODES = {"first": SearchMode.FIRST_IMPROVING,
                 "best": SearchMode.BEST_OF_BATCH}


def _add_model_flags(parser):
    parser.add_argument("--model", required=True, choices=MODEL_NAMES,
                        help="registered model name")
    parser.add_argument("--params", default=None, metavar="FILE",
                        help="JSON file with model parameters")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relopt",
        description="descent solvers for relative optimization models")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve a model and record the run")
    _add_model_flags(run)
    run.add_argument("--solver", choices=("tdm", "sdm"), default="tdm")
    run.add_argument("--x0", required=True,
                     help="starting state, comma-separated coordinates")
    run.add_argument("--delta0", type=float, default=0.1)
    run.add_argument("--gamma", type=float, default=0.5)
    run.add_argument("--delta-min", type=float, default=1e-6)
    run.add_argument("--samples", type=int, default=64,
                     help="candidate draws per search round")
    run.add_argument("--rounds", type=int, default=4,
                     help="search rounds before a stall")
    run.add_argument("--policy", choices=sorted(_POLICY_MODES), default="first")
    run.add_argument("--max-moves", type=int, default=100_000)
    run.add_argument("--max-evals", type=int, default=10_000_000)
    run.add_argument("--out", default=None, metavar="DIR",
                     help="directory for run artifacts; omit to print the "
                          "summary instead")
    run.add_argument("--no-figures", action="store_true",
                     help="skip figure rendering")

    residual = sub.add_parser("residual",
                              help="stationarity residual at a state")
    _add_model_flags(residual)
    residual.add_argument("--at", required=True,
                          help="state, comma-separated coordinates")
    residual.add_argument("--samples", type=int, default=1024)

    check = sub.add_parser("check", help="sampled model audits")
    _add_model_flags(check)
    check.add_argument("--pairs", type=int, default=1000)
    check.add_argument("--triples", type=int, default=1000)

    plot = sub.add_parser("plot", help="re-render figures for a saved run")
    plot.add_argument("--out", required=True, metavar="DIR",
                      help="run directory holding trajectory.jsonl and "
                           "summary.json")
    return parser


def _load_params(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            params = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read params file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"params file is not valid JSON: {exc}") from exc
    if not isinstance(params, dict):
        raise ValidationError("params file must hold a JSON object")
    return params


def _parse_point(text: str) -> StatePoint:
    try:
        coords = tuple(float(tok) for tok in text.split(","))
        return StatePoint(coords)
    except ValueError as exc:
        raise ValidationError(f"bad state {text!r}: {exc}") from exc


def cmd_run(args) -> int:
    params = _load_params(args.params)
    problem = make_model(args.model, params)
    x0 = _parse_point(args.x0)
    if not problem.state_contains(x0):
        raise DomainError(f"x0 {list(x0.coords)} is not in the state space "
                          f"of model {args.model!r}")
    schedule = ThresholdSchedule(args.delta0, args.gamma, args.delta_min)
    policy = SearchPolicy(mode=_POLICY_MODES[args.policy],
                          samples_per_round=args.samples,
                          rounds_before_stall=args.rounds)
    budget = Budget(max_moves=args.max_moves, max_evaluations=args.max_evals)
    if args.solver == "tdm":
        report = tdm_solve(problem, x0, schedule, policy, budget, args.seed)
    else:
        report = sdm_solve(problem, x0, policy, budget, args.seed)
    config = {
        "model": args.model,
        "params": params,
        "solver": args.solver,
        "x0": list(x0.coords),
        "delta0": args.delta0,
        "gamma": args.gamma,
        "delta_min": args.delta_min,
        "samples": args.samples,
        "rounds": args.rounds,
        "policy": args.policy,
        "max_moves": args.max_moves,
        "max_evals": args.max_evals,
        "seed": args.seed,
    }
    termination = report.trajectory.termination
    if args.out:
        paths = write_run_files(args.out, report, config)
        if not args.no_figures:
            from .plotting import render_run_figures
            from .reporting import build_summary
            render_run_figures(report.trajectory.moves,
                               build_summary(report, config), args.out)
        print(f"wrote {paths['summary'].parent}")
    else:
        from .reporting import build_summary
        print(json.dumps(build_summary(report, config), indent=2))
    print(f"termination={termination.value} "
          f"final_state={list(report.final_state.coords)} "
          f"moves={len(report.trajectory.moves)} "
          f"residual={report.residual_estimate:.6g}")
    return 2 if termination is Termination.BUDGET_EXHAUSTED else 0


def cmd_residual(args) -> int:
    problem = make_model(args.model, _load_params(args.params))
    x = _parse_point(args.at)
    value = stationarity_residual(problem, x, n_samples=args.samples,
                                  rng=np.random.default_rng(args.seed))
    print(f"{value:.12g}")
    return 0


def cmd_check(args) -> int:
    problem = make_model(args.model, _load_params(args.params))
    rng = np.random.default_rng(args.seed)
    min_cost, holds = check_b1_conditions(problem, pairs=args.pairs, rng=rng)
    declared = getattr(problem, "b1_delta", None)
    cost_str = "inf" if min_cost == float("inf") else f"{min_cost:.6g}"
    declared_str = "none" if declared is None else f"{declared:.6g}"
    print(f"cost-floor: min_offdiag_cost={cost_str} "
          f"declared_delta={declared_str} -> "
          f"{'holds' if holds else 'fails'}")
    violations = check_triangle_inequality(problem, triples=args.triples,
                                           rng=rng)
    print(f"triangle-inequality: violations={violations} of {args.triples} "
          f"-> {'pass' if violations == 0 else 'fail'}")
    count, excess = scan_overestimate_vs_cost(problem, pairs=args.pairs,
                                              rng=rng)
    print(f"overestimate-vs-cost: violations={count} of {args.pairs} "
          f"max_excess={excess:.6g} -> {'pass' if count == 0 else 'fail'}")
    return 0


def cmd_plot(args) -> int:
    out = Path(args.out)
    traj_path = out / TRAJECTORY_NAME
    summary_path = out / SUMMARY_NAME
    if not traj_path.exists() or not summary_path.exists():
        raise ValidationError(
            f"{out} does not hold {TRAJECTORY_NAME} and {SUMMARY_NAME}")
    from .plotting import render_run_figures
    moves = read_trajectory_jsonl(traj_path)
    paths = render_run_figures(moves, read_summary(summary_path), out)
    for path in paths:
        print(f"wrote {path}")
    return 0


_DISPATCH = {"run": cmd_run, "residual": cmd_residual,
             "check": cmd_check, "plot": cmd_plot}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except RelOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
