"""
``decay-fit``: fit log E = log C − δt to a column of an existing ``series.csv``.
"""
import argparse
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from vacuumflow.cli.common import emit, load_spec, output_path
from vacuumflow.core.errors import ConfigError
from vacuumflow.physics.energy import fit_decay
from vacuumflow.schemas.experiment import DecayFitReport
from vacuumflow.storage.output import output_directory
from vacuumflow.storage.writers import write_json


def parse_window(text: Optional[str]) -> Optional[Tuple[float, float]]:
    """``"10,36"`` -> ``(10.0, 36.0)``."""
    if text is None:
        return None
    parts = [part.strip() for part in text.split(",")]
    try:
        lo, hi = (float(part) for part in parts)
    except ValueError:
        raise ConfigError(f"--window must read lo,hi, got {text!r}", key="window") from None
    return lo, hi


def read_series(path: Path, column: str) -> Tuple[np.ndarray, np.ndarray]:
    """
    Load ``t`` and ``column`` from a series file.

    Args:
        path: CSV written by ``simulate``
        column: Energy column to fit

    Returns:
        (times, values)
    """
    try:
        data = np.atleast_1d(np.genfromtxt(path, delimiter=",", names=True, dtype=float, encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read series {path}: {exc}", key="series") from None
    names = data.dtype.names or ()
    for name in ("t", column):
        if name not in names:
            raise ConfigError(f"series has no column {name!r}", key="column")
    return data["t"], data[column]


def handle(args: argparse.Namespace) -> None:
    window = parse_window(args.window)
    if args.config is not None:
        spec = load_spec(args)
        out = args.output_path
        if window is None:
            window = spec.window()
    else:
        out = output_path(args)
    series = Path(args.series) if args.series else out / "series.csv"

    times, values = read_series(series, args.column)
    fit = fit_decay(times, values, window)
    report = DecayFitReport(source=str(series), column=args.column, fit=fit)
    with output_directory(out) as directory:
        write_json(directory / "decay.json", report)
    emit({
        "command": "decay-fit",
        "out": str(out),
        "delta": fit.delta,
        "amplitude": fit.amplitude,
        "r_squared": fit.r_squared,
    })


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("decay-fit", help="fit an exponential decay to a series.csv column")
    parser.add_argument("--series", help="series file (default: <out>/series.csv)")
    parser.add_argument("--column", default="E_total", help="column to fit (default: E_total)")
    parser.add_argument("--window", help="fit window lo,hi (default: all samples, or the config's window)")
    parser.set_defaults(handler=handle)
