"""
Output directory management.
Provides the artifact directory a command writes into.
"""
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Generator, Union

from vacuumflow.core.errors import OutputError

logger = logging.getLogger(__name__)


@contextmanager
def output_directory(path: Union[str, Path]) -> Generator[Path, None, None]:
    """
    Create the artifact directory and yield it.

    Usage:
        with output_directory(spec.output_dir) as out:
            write_json(out / "summary.json", summary)

    Args:
        path: Directory to create (parents included)

    Yields:
        Resolved directory path

    Raises:
        OutputError: The directory cannot be created, or a file is in the way
    """
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"Cannot create output directory: {exc.strerror or exc}", path=str(out)) from exc
    logger.debug("Writing artifacts to %s", out)
    yield out
