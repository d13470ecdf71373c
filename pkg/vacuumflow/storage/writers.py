"""
Artifact writers: CSV series, JSON reports and the optional energy plot.

Every file is written to a temporary sibling and moved into place, so a
failed run never leaves a truncated artifact behind.
"""
import csv
import io
import logging
import os
from pathlib import Path
from typing import Iterable, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from pydantic import BaseModel  # noqa: E402

from vacuumflow.schemas.experiment import RunResult  # noqa: E402

logger = logging.getLogger(__name__)

SERIES_COLUMNS = (
    "t",
    "E_total",
    "E_00",
    "E_10",
    "E_01",
    "E_20",
    "E_11",
    "E_02",
    "D_total",
    "gamma_boundary",
    "max_abs_v",
    "mass_rel_err",
)
# Fixed salt keeps the SVG element ids identical between runs
SVG_HASH_SALT = "vacuumflow"


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    os.replace(str(tmp), str(path))


def format_float(value: float) -> str:
    """Shortest decimal that reads back to the same double."""
    return repr(float(value))


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    """
    Write a numeric table with a header row.

    Args:
        path: Destination file
        header: Column names
        rows: Rows of numbers, one per line

    Returns:
        The written path
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} values, header has {len(header)}")
        writer.writerow([format_float(v) for v in row])
    _atomic_write_text(path, buffer.getvalue())
    logger.info("Wrote %s", path)
    return path


def series_rows(result: RunResult) -> Iterable[Sequence[float]]:
    """Rows of ``series.csv`` in ``SERIES_COLUMNS`` order."""
    for k, report in enumerate(result.reports):
        row = report.flat()
        row.update(
            t=result.times[k],
            gamma_boundary=result.boundary[k],
            max_abs_v=result.max_abs_v[k],
            mass_rel_err=result.mass_rel_err[k],
        )
        yield [row[column] for column in SERIES_COLUMNS]


def write_series(path: Path, result: RunResult) -> Path:
    """Write the per-record energy and diagnostic series of a run."""
    return write_csv(path, SERIES_COLUMNS, series_rows(result))


def write_json(path: Path, model: BaseModel) -> Path:
    """
    Serialise a pydantic model with a fixed key order.

    Args:
        path: Destination file
        model: Report to serialise

    Returns:
        The written path
    """
    _atomic_write_text(path, model.model_dump_json(indent=2) + "\n")
    logger.info("Wrote %s", path)
    return path


def plot_energy_svg(
    path: Path,
    times: np.ndarray,
    energies: np.ndarray,
    envelope: Optional[np.ndarray] = None,
) -> Path:
    """
    Log-scale plot of E_total(t), with the fitted envelope when given.

    Args:
        path: Destination ``.svg`` file
        times: Record times
        energies: E_total at the record times
        envelope: C·e^{−δt} at the record times

    Returns:
        The written path
    """
    positive = energies > 0
    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        try:
            if np.any(positive):
                ax.semilogy(times[positive], energies[positive], label="E_total")
                if envelope is not None:
                    ax.semilogy(times, envelope, "--", label="fit")
            else:
                ax.plot(times, energies, label="E_total")
            ax.set_xlabel("t")
            ax.set_ylabel("energy")
            ax.legend()
            tmp = path.with_name(path.name + ".tmp")
            fig.savefig(tmp, format="svg", metadata={"Date": None})
            os.replace(str(tmp), str(path))
        finally:
            plt.close(fig)
    logger.info("Wrote %s", path)
    return path
