"""
BBShift CLI package

This module contains the command line interface: estimate, detect, correct,
simulate and experiment subcommands.
"""

from bbshift.cli.main import build_parser, main

__all__ = ["build_parser", "main"]
