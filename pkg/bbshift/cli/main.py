#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Command Line Interface (CLI) for BBShift.

This module serves as the entry point for the BBShift CLI application.

Exit codes: 0 success (no shift detected), 1 usage or configuration error,
2 data error, 3 shift detected by ``detect``.
"""

import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from bbshift import __version__
from bbshift.cli.commands import (
    EXIT_DATA,
    EXIT_USAGE,
    correct_command,
    detect_command,
    estimate_command,
    experiment_command,
    simulate_command,
)
from bbshift.core.exceptions import BBShiftError, ConfigError
from bbshift.utils.logger import get_logger

logger = get_logger(__name__)


class UsageError(Exception):
    """Raised instead of exiting when the command line cannot be parsed."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_prediction_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--source", required=True, help="Source prediction file (CSV with header)")
    parser.add_argument("--target", required=True, help="Target prediction file (CSV with header)")
    parser.add_argument("--k", type=int, required=True, help="Number of classes")
    parser.add_argument("--mode", choices=["hard", "soft"], help="Expected prediction schema")


def _add_output(parser: argparse.ArgumentParser, default_format: str = "json") -> None:
    parser.add_argument("--out", help="Output path (default: stdout)")
    parser.add_argument("--format", choices=["csv", "json"], default=default_format, help="Output format")
    parser.add_argument("--seed", type=int, help="Random seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    parser = _Parser(
        prog="bbshift",
        description="BBShift CLI - black box label-shift estimation, detection and correction",
    )
    parser.add_argument("--version", action="version", version=f"bbshift {__version__}")

    subparsers = parser.add_subparsers(dest="command", help="Commands", parser_class=_Parser)

    # Estimate command
    estimate_parser = subparsers.add_parser("estimate", help="Estimate importance weights q(y)/p(y)")
    _add_prediction_inputs(estimate_parser)
    estimate_parser.add_argument("--delta", type=float, help="Fallback threshold, 0 < delta < 1/k (default 1/(10k))")
    estimate_parser.add_argument("--solver", choices=["lu", "pseudoinverse"], help="Linear solver")
    estimate_parser.add_argument("--normalize", action="store_true", help="Also report mu_y rescaled to the simplex")
    _add_output(estimate_parser)

    # Detect command
    detect_parser = subparsers.add_parser("detect", help="Test whether the label distribution shifted")
    _add_prediction_inputs(detect_parser)
    detect_parser.add_argument("--method", choices=["ks", "chi2"], help="Two-sample test (default chi2)")
    detect_parser.add_argument("--alpha", type=float, help="Significance level (default 0.05)")
    _add_output(detect_parser)

    # Correct command
    correct_parser = subparsers.add_parser("correct", help="Retrain with estimated importance weights")
    correct_parser.add_argument("--source", required=True, help="Labeled training data (y_true,x0,...)")
    correct_parser.add_argument("--target", required=True, help="Target features (x0,... with optional y_true)")
    correct_parser.add_argument("--k", type=int, required=True, help="Number of classes")
    correct_parser.add_argument("--mode", choices=["hard", "soft"], help="Black-box outputs used for estimation")
    correct_parser.add_argument("--delta", type=float, help="Fallback threshold, 0 < delta < 1/k")
    correct_parser.add_argument("--solver", choices=["lu", "pseudoinverse"], help="Linear solver")
    correct_parser.add_argument("--split-fraction", type=float, help="Share of training data for the black box")
    correct_parser.add_argument("--retrain-on", choices=["split", "full"], help="Data for the weighted retraining")
    correct_parser.add_argument("--detect-first", action="store_true", help="Only reweight if a shift is detected")
    correct_parser.add_argument("--reuse-split", action="store_true", help="Train and estimate on the same data")
    correct_parser.add_argument("--method", choices=["ks", "chi2"], help="Test used with --detect-first")
    correct_parser.add_argument("--alpha", type=float, help="Significance level used with --detect-first")
    correct_parser.add_argument("--learning-rate", type=float, help="Gradient-descent step size")
    correct_parser.add_argument("--iterations", type=int, help="Gradient-descent steps")
    correct_parser.add_argument("--l2", type=float, help="L2 penalty on the weights")
    correct_parser.add_argument("--normalize", action="store_true", help="Also report mu_y rescaled to the simplex")
    _add_output(correct_parser)

    # Simulate command
    simulate_parser = subparsers.add_parser("simulate", help="Write a label-shifted dataset")
    simulate_parser.add_argument("--source", help="Labeled pool to resample (default: Gaussian mixture)")
    simulate_parser.add_argument("--k", type=int, required=True, help="Number of classes")
    simulate_parser.add_argument("--n", type=int, default=1000, help="Number of examples")
    simulate_parser.add_argument("--shift", choices=["knockout", "tweak_one", "dirichlet"], help="Shift protocol")
    simulate_parser.add_argument("--shift-class", type=int, help="Class for knockout / tweak_one")
    simulate_parser.add_argument("--knockout-fraction", type=float, help="Fraction of the class removed")
    simulate_parser.add_argument("--rho", type=float, help="Tweak-one probability of the class")
    simulate_parser.add_argument("--concentration", type=float, help="Dirichlet concentration alpha")
    simulate_parser.add_argument("--separation", type=float, default=6.0, help="Mixture mean separation")
    simulate_parser.add_argument("--scale", type=float, default=1.0, help="Mixture standard deviation")
    _add_output(simulate_parser, default_format="csv")

    # Experiment command
    experiment_parser = subparsers.add_parser("experiment", help="Run a Monte-Carlo experiment")
    experiment_parser.add_argument("--preset", help="Preset name from experiments.yaml")
    experiment_parser.add_argument("--config", help="Experiment YAML file")
    experiment_parser.add_argument("--workers", type=int, help="Worker threads")
    experiment_parser.add_argument("--replications", type=int, help="Override the replication count")
    _add_output(experiment_parser, default_format="csv")

    return parser


COMMANDS = {
    "estimate": estimate_command,
    "detect": detect_command,
    "correct": correct_command,
    "simulate": simulate_command,
    "experiment": experiment_command,
}

REQUIRES_OUT = {"correct", "simulate", "experiment"}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse command-line arguments and execute the appropriate command.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return int(e.code or 0)

    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    if args.command in REQUIRES_OUT and not args.out:
        print(f"Error: {args.command} needs --out", file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValidationError) as e:
        logger.debug(f"{args.command} failed: {e!r}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (BBShiftError, OSError) as e:
        logger.debug(f"{args.command} failed: {e!r}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
