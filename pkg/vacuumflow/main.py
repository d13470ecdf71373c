"""
CLI entry point.
Runs one subcommand and turns every package error into an exit code and an error document.
"""
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from vacuumflow.cli.router import parse_args
from vacuumflow.core.errors import EXIT_OK, ConfigError, OutputError, VacuumFlowError
from vacuumflow.core.log import configure_logging

logger = logging.getLogger(__name__)


def report_error(payload: Dict[str, Any], output_path: Optional[Path]) -> None:
    """Write the error document to stderr and, when the output directory exists, to ``error.json``."""
    text = json.dumps(payload, indent=2, default=str)
    sys.stderr.write(text + "\n")
    if output_path is not None and output_path.is_dir():
        try:
            (output_path / "error.json").write_text(text + "\n", encoding="utf-8")
        except OSError as exc:
            logger.warning("Could not write error.json: %s", exc)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the command named on the command line.

    Args:
        argv: Arguments without the program name; ``sys.argv[1:]`` when omitted

    Returns:
        Process exit code (0 ok, 2 config, 3 runtime, 4 failed check)
    """
    args = parse_args(argv)
    configure_logging(quiet=args.quiet)
    try:
        args.handler(args)
    except ValidationError as exc:
        error = ConfigError(str(exc.errors()[0]["msg"]))
        report_error(error.to_dict(), args.output_path)
        return error.exit_code
    except VacuumFlowError as exc:
        logger.error("%s: %s", type(exc).__name__, exc.message)
        report_error(exc.to_dict(), args.output_path)
        return exc.exit_code
    except OSError as exc:
        error = OutputError(exc.strerror or str(exc), path=exc.filename and str(exc.filename))
        logger.error("OutputError: %s", error.message)
        report_error(error.to_dict(), args.output_path)
        return error.exit_code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
