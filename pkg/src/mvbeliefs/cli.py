"""Command-line interface.

Three subcommands, all driven by JSON configs:

``run``         simulate one experiment; writes trajectory.csv and
                final_state.json into the output directory
``analyze``     model-level predictions (stationary distributions, condition
                values, predicted limit) without simulating
``montecarlo``  a placement campaign comparing the combined learner against
                the two single-type relaxations

Exit codes: 0 success, 2 config validation failure, 3 numerical failure.
Validation failures print a machine-readable JSON object naming the violated
assumption. ``--plot`` additionally renders PNG figures next to the data
files; outputs are byte-identical across re-runs with the same config and
seed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import reporting
from .analysis import build_report
from .config import (
    load_json,
    parse_campaign_config,
    parse_experiment_config,
)
from .errors import ConvergenceFailure, ModelError
from .learning import run as run_dynamics
from .scenarios import monte_carlo

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvbeliefs",
        description="Networked belief dynamics with multiview observations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="path to a JSON config")
    common.add_argument("--out", help="output directory", default=None)
    common.add_argument("--seed", type=int, default=None, help="override config seed")
    common.add_argument(
        "--horizon", type=int, default=None, help="override config horizon"
    )
    common.add_argument(
        "--plot", action="store_true", help="also render PNG figures"
    )

    run_cmd = sub.add_parser(
        "run", parents=[common], help="simulate one experiment"
    )
    run_cmd.set_defaults(handler=_cmd_run)

    analyze_cmd = sub.add_parser(
        "analyze", parents=[common], help="model-level predictions, no simulation"
    )
    analyze_cmd.set_defaults(handler=_cmd_analyze)

    mc_cmd = sub.add_parser(
        "montecarlo", parents=[common], help="placement campaign"
    )
    mc_cmd.add_argument(
        "--jobs", type=int, default=1, help="parallel trial executors"
    )
    mc_cmd.set_defaults(handler=_cmd_montecarlo)
    return parser


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_run(args) -> int:
    if args.out is None:
        raise ModelError("run requires --out <directory>")
    cfg = parse_experiment_config(load_json(args.config))
    horizon = args.horizon if args.horizon is not None else cfg.horizon
    seed = args.seed if args.seed is not None else cfg.seed
    trajectory = run_dynamics(
        cfg.problem,
        horizon,
        seed,
        record_stride=cfg.record_stride,
        convergence=cfg.convergence,
    )
    out = _out_dir(args)
    hyp = cfg.problem.hypotheses
    reporting.write_trajectory_csv(trajectory, hyp, out / "trajectory.csv")
    summary = reporting.final_state_summary(trajectory, hyp)
    summary["seed"] = seed
    reporting.write_json(summary, out / "final_state.json")
    if args.plot:
        reporting.render_belief_figures(trajectory, hyp, out)
    print(f"wrote {out / 'trajectory.csv'} and {out / 'final_state.json'}", file=sys.stderr)
    return 0


def _cmd_analyze(args) -> int:
    cfg = parse_experiment_config(load_json(args.config))
    problem = cfg.problem
    report = build_report(
        problem.network, problem.gamma, problem.model, problem.hypotheses
    )
    payload = report.to_dict(labels=problem.hypotheses.labels)
    if args.out is None:
        if args.plot:
            raise ModelError("--plot requires --out <directory>")
        sys.stdout.write(reporting.json_text(payload))
        return 0
    out = _out_dir(args)
    reporting.write_json(payload, out / "analysis.json")
    if args.plot:
        reporting.render_condition_figure(
            report, problem.hypotheses, out / "condition_values.png"
        )
    print(f"wrote {out / 'analysis.json'}", file=sys.stderr)
    return 0


def _cmd_montecarlo(args) -> int:
    campaign = parse_campaign_config(load_json(args.config))
    if args.seed is not None:
        campaign = replace(campaign, seed=args.seed)
    if args.horizon is not None:
        campaign = replace(campaign, horizon=args.horizon)
    summary = monte_carlo(campaign, jobs=args.jobs)
    payload = summary.to_dict()
    if args.out is None:
        if args.plot:
            raise ModelError("--plot requires --out <directory>")
        sys.stdout.write(reporting.json_text(payload))
        return 0
    out = _out_dir(args)
    reporting.write_json(payload, out / "montecarlo.json")
    if args.plot:
        reporting.render_success_figure(summary, out / "success_counts.png")
    print(f"wrote {out / 'montecarlo.json'}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConvergenceFailure as exc:
        sys.stdout.write(reporting.json_text({"error": exc.to_dict()}))
        return 3
    except ModelError as exc:
        sys.stdout.write(reporting.json_text({"error": exc.to_dict()}))
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
