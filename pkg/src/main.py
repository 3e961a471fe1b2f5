#!/usr/bin/env python3

"""Main entry point for the phaseaug command-line tool."""

import sys
from collections.abc import Sequence

from src.cli.commands import COMMANDS
from src.cli.parser import build_parser
from src.utils.enums import ExitCode
from src.utils.logging import get_logger, setup_logging

logger = get_logger(__name__)


def run(argv: Sequence[str] | None = None) -> int:
    """Parse `argv`, dispatch to the command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors and 0 for --help/--version
        return int(e.code) if isinstance(e.code, int) else ExitCode.USAGE

    setup_logging()
    logger.debug(f"Running command {args.command}")
    return int(COMMANDS[args.command](args))


def main() -> None:
    try:
        sys.exit(run())
    except Exception as e:
        logger.critical(f"phaseaug crashed: {e}", exc_info=True)
        raise


if __name__ == "__main__":
    main()
