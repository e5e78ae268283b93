"""
Command line entry point: plan, run, batch, serve, client and plot.

Exit codes: 0 on success, 1 on usage errors, 2 when planning, the trial
inputs or the networked protocol fail.
"""

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from config import LiveSearchSettings, get_settings

from ..observability import (
    ObservabilityService,
    TracingConfig,
    configure_logging,
    create_observability_config,
    get_observability_service,
    set_observability_service,
)
from ..planner import PlannerMode, PlanningError, write_plan_file
from ..simulator import FailureMode, load_scenario, plan_for, run_trial
from .batch import RESULT_COLUMNS, load_experiment_matrix, run_batch, write_csv
from .client import run_client
from .plotting import render_trial
from .protocol import ProtocolError
from .server import serve

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class UsageError(Exception):
    """Raised instead of argparse's exit so usage problems map to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _mode(name: str) -> PlannerMode:
    try:
        return PlannerMode.from_cli(name)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser(settings: Optional[LiveSearchSettings] = None) -> argparse.ArgumentParser:
    settings = settings or LiveSearchSettings.model_construct()
    parser = _Parser(prog="run_live_search", description="Multi-robot search with LIVE inspection")
    parser.add_argument("--log-level", choices=["error", "info", "debug"], default=None,
                        help="Overrides LIVE_LOG")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def scenario_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", required=True, help="Scenario JSON file")
        p.add_argument("--seed", type=int, default=None, help="Overrides the scenario seed")
        p.add_argument("--mode", type=_mode, default=None, help="lidar | visual | live")

    p = sub.add_parser("plan", help="Write the coverage plan of a scenario")
    scenario_args(p)
    p.add_argument("--out", default=settings.default_out_dir)

    p = sub.add_parser("run", help="Run one trial in-process")
    scenario_args(p)
    p.add_argument("--out", default=settings.default_out_dir)

    p = sub.add_parser("batch", help="Run an experiment matrix")
    p.add_argument("--matrix", required=True, help="Experiment matrix JSON file")
    p.add_argument("--out", default=settings.default_out_dir)
    p.add_argument("--workers", type=int, default=settings.batch_workers)

    p = sub.add_parser("serve", help="Coordinate a networked trial")
    scenario_args(p)
    p.add_argument("--listen", required=True, help="host:port")
    p.add_argument("--out", default=settings.default_out_dir)

    p = sub.add_parser("client", help="Simulate one robot of a networked trial")
    scenario_args(p)
    p.add_argument("--connect", required=True, help="host:port")
    p.add_argument("--robot", required=True, help="Robot name from the scenario")

    p = sub.add_parser("plot", help="Render a trajectory log")
    p.add_argument("--scenario", required=True)
    p.add_argument("--log", required=True, help="Trajectory CSV")
    p.add_argument("--out", required=True, help="Output PNG")
    return parser


def _scenario(args):
    scenario = load_scenario(args.scenario)
    if getattr(args, "seed", None) is not None or getattr(args, "mode", None) is not None:
        scenario = scenario.with_run(mode=args.mode, seed=args.seed)
    return scenario


def _cmd_plan(args) -> int:
    scenario = _scenario(args)
    plan = plan_for(scenario, scenario.load_map())
    path = write_plan_file(plan, Path(args.out) / "plan.txt")
    print(f"{scenario.mode.value}: {plan.viewpoint_count} viewpoints, {plan.total_length:.1f} m -> {path}")
    return EXIT_OK


def _cmd_run(args) -> int:
    scenario = _scenario(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = run_trial(scenario, log_path=out / "trajectory.csv", search_map_path=out / "search_map.pgm")
    write_csv(out / "results.csv", RESULT_COLUMNS, [result.to_row()])
    print(f"{result.failure_mode.value}: {result.objects_found}/{len(result.detected)} found, "
          f"path {result.total_path_length:.1f} m in {result.ticks} ticks")
    return EXIT_OK


def _cmd_batch(args) -> int:
    report = run_batch(load_experiment_matrix(args.matrix), args.out, workers=max(1, args.workers))
    for mode in report.modes:
        print(f"{mode}: success {report.success_rate[mode]:.0%}, "
              f"combined path {report.combined_path_length[mode][0]:.1f} m")
    return EXIT_OK


def _cmd_serve(args) -> int:
    scenario = _scenario(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = asyncio.run(serve(scenario, args.listen, log_path=out / "trajectory.csv"))
    write_csv(out / "results.csv", RESULT_COLUMNS, [result.to_row()])
    print(f"{result.failure_mode.value}: {result.objects_found}/{len(result.detected)} found")
    return EXIT_FAILURE if result.failure_mode is FailureMode.TRANSPORT else EXIT_OK


def _cmd_client(args) -> int:
    scenario = _scenario(args)
    ticks = asyncio.run(run_client(args.connect, scenario, args.robot))
    print(f"{args.robot}: {ticks} ticks")
    return EXIT_OK


def _cmd_plot(args) -> int:
    scenario = load_scenario(args.scenario)
    out = render_trial(scenario.load_map(), scenario.objects, args.log, args.out)
    print(f"Wrote {out}")
    return EXIT_OK


COMMANDS = {
    "plan": _cmd_plan,
    "run": _cmd_run,
    "batch": _cmd_batch,
    "serve": _cmd_serve,
    "client": _cmd_client,
    "plot": _cmd_plot,
}


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Parse ``argv`` and run the selected subcommand.

    Returns:
        Process exit code.
    """
    try:
        settings = get_settings()
    except ValidationError as e:
        print(f"run_live_search: invalid environment: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        args = build_parser(settings).parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE

    level = args.log_level or settings.log_level
    configure_logging(level)
    set_observability_service(ObservabilityService(create_observability_config(
        tracing=TracingConfig(enabled=settings.tracing_enabled, console_export=settings.trace_console),
        log_level=level,
    )))
    try:
        return COMMANDS[args.command](args)
    except (PlanningError, ProtocolError, KeyError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return EXIT_FAILURE
    finally:
        get_observability_service().shutdown()
        set_observability_service(None)
