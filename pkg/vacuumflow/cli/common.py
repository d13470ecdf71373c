"""
Helpers shared by the subcommands.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List

from vacuumflow.cli.configfile import read_config
from vacuumflow.core.config import settings
from vacuumflow.core.errors import ConfigError
from vacuumflow.schemas.experiment import ExperimentSpec


def flag_overrides(args: argparse.Namespace) -> List[str]:
    """``--set`` items followed by the ``--out`` and ``--seed`` shortcuts."""
    overrides = list(args.overrides or [])
    if args.out is not None:
        overrides.append(f"experiment.output_dir={args.out}")
    if args.seed is not None:
        overrides.append(f"experiment.seed={args.seed}")
    return overrides


def load_spec(args: argparse.Namespace) -> ExperimentSpec:
    """
    Read ``--config`` with the command-line overrides applied.

    The resolved output directory is stored on ``args`` so that errors raised
    later can still be written next to the other artifacts.
    """
    if args.config is None:
        raise ConfigError(f"{args.command} needs --config", key="config")
    spec = read_config(args.config, overrides=flag_overrides(args))
    args.output_path = Path(spec.output_dir)
    return spec


def output_path(args: argparse.Namespace) -> Path:
    """Output directory of commands that may run without a config file."""
    path = Path(args.out or settings.DEFAULT_OUTPUT_DIR)
    args.output_path = path
    return path


def emit(payload: Dict[str, Any]) -> None:
    """Print the one-line JSON result of a command on stdout."""
    sys.stdout.write(json.dumps(payload, separators=(",", ":")) + "\n")
    sys.stdout.flush()
