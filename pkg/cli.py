"""
Command-line experiment runner: synth, ingest and verify-theorem
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import dotenv_values

from config import Config
from models.experiment import ExperimentConfig
from services.experiment_service import ExperimentService
from services.metrics_service import MetricsService
from utils.exceptions import ConfigError

USAGE_ERRORS = ("ArgumentError", "ConfigError")
EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltm-thresholds",
        description="Estimate node thresholds of Linear Threshold Model diffusions.",
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="Run the synthetic experiment grid.")
    _add_run_arguments(synth)
    synth.add_argument("--save-data", action="store_true", default=None,
                       help="Also write each repetition's graph, attributes, thresholds and activations.")
    synth.add_argument("--sweep", action="store_true", default=None,
                       help="Run once per value of the graph model's sweep parameter.")

    ingest = commands.add_parser("ingest", help="Estimate thresholds on ingested CSV data.")
    _add_run_arguments(ingest)
    ingest.add_argument("--edges", dest="edges_path", help="Edge list CSV (src,dst).")
    ingest.add_argument("--attributes", dest="attributes_path", help="Attribute CSV (node,f0,...).")
    ingest.add_argument("--activations", dest="activations_path", help="Activation log CSV (node,activation_time).")
    ingest.add_argument("--thresholds", dest="thresholds_path",
                        help="Optional true thresholds CSV (node,threshold); enables threshold MSE.")
    ingest.add_argument("--directed", action="store_true", default=None, help="Treat edges as directed.")

    verify = commands.add_parser("verify-theorem", help="Check trigger recovery by exhaustive enumeration.")
    verify.add_argument("--trials", type=int, default=200)
    verify.add_argument("--max-neighbors", type=int, default=8)
    verify.add_argument("--seed", type=int, default=Config.DEFAULT_SEED)
    return parser


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="Flat key=value configuration file.")
    parser.add_argument("--out", dest="out_dir", help="Output directory.")
    parser.add_argument("--seed", type=int, help="Master random seed.")
    parser.add_argument("--estimators", help="Comma-separated estimator tags.")
    parser.add_argument("--reps", type=int, help="Number of repetitions.")
    parser.add_argument("--workers", type=int, help="Repetitions run in parallel.")
    parser.add_argument("--rows", choices=["per-step", "final"], help="Training rows per snapshot.")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="Override any configuration field (repeatable).")


def resolve_config(args: argparse.Namespace, mode: str) -> ExperimentConfig:
    """Config file < --set overrides < named flags"""
    values: Dict[str, object] = {}
    if args.config is not None:
        if not args.config.is_file():
            raise ConfigError("config", f"configuration file not found: {args.config}")
        values.update({key.strip().lower(): value for key, value in dotenv_values(args.config).items()})

    for override in args.overrides:
        key, separator, value = override.partition("=")
        if not separator or not key.strip():
            raise ConfigError("set", f"expected KEY=VALUE, got '{override}'")
        values[key.strip().lower()] = value.strip()

    for name in ("out_dir", "seed", "estimators", "reps", "workers", "rows", "save_data", "sweep",
                 "edges_path", "attributes_path", "activations_path", "thresholds_path", "directed"):
        value = getattr(args, name, None)
        if value is not None:
            values[name] = value
    values["mode"] = mode
    return ExperimentConfig.from_mapping(values)


def run_command(args: argparse.Namespace, service: ExperimentService) -> int:
    if args.command == "verify-theorem":
        result = service.verify_theorem(args.trials, args.max_neighbors, args.seed)
        if not result["success"]:
            return _report_error(result)
        summary = result["data"]
        print(f"trials={summary.trials} conclusive={summary.conclusive} "
              f"inconclusive={summary.inconclusive} failed={summary.failed}")
        for failure in summary.failures:
            print(f"  FAILED {failure}")
        return EXIT_FAILURE if summary.failed else EXIT_OK

    mode = "synthetic" if args.command == "synth" else "ingest"
    try:
        config = resolve_config(args, mode)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    result = service.run_experiment(config)
    if not result["success"]:
        return _report_error(result)
    print(result["message"])
    data = result["data"]
    if "files" in data:
        print(MetricsService().summarize(data["report"]).to_string(index=False))
        print(f"Results written to {config.out_dir}")
    return EXIT_OK


def _report_error(result: Dict[str, object]) -> int:
    print(f"error: {result['error']}", file=sys.stderr)
    return EXIT_USAGE if result.get("error_type") in USAGE_ERRORS else EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        Config.validate_config()
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return run_command(args, ExperimentService())


if __name__ == "__main__":
    sys.exit(main())
