import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from selfroute import __version__

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"


class BaseCommand:
    """
    Base for command-line runs.

    Owns argument parsing and logging setup. Logs go to stderr so that stdout
    carries nothing but the JSON or CSV artifact.
    """

    def __init__(self, argv: Optional[Sequence[str]] = None):
        self.parser = self.build_parser()
        self.config = self.parser.parse_args(argv)
        self.setup_logging()

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="selfroute",
            description="Selfish routing games with uncertain users",
        )
        parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
        self.add_args(parser)
        return parser

    @staticmethod
    def common_args() -> argparse.ArgumentParser:
        """Options shared by every subcommand."""
        parser = argparse.ArgumentParser(add_help=False)
        parser.add_argument(
            "--log_level",
            type=str.upper,
            choices=LOG_LEVELS,
            default=os.getenv("SELFROUTE_LOG_LEVEL", "WARNING").upper(),
            help="Logging level on stderr (env: SELFROUTE_LOG_LEVEL, default: WARNING)",
        )
        parser.add_argument(
            "--output",
            type=Path,
            default=None,
            help="Write the result to this file instead of stdout",
        )
        return parser

    def add_args(self, parser: argparse.ArgumentParser) -> None:
        """Subcommands and their options; implemented by the concrete command."""
        raise NotImplementedError

    def setup_logging(self) -> None:
        """Initialize logging."""
        logging.basicConfig(
            level=getattr(self.config, "log_level", "WARNING"),
            format=LOG_FORMAT,
            stream=sys.stderr,
            force=True,
        )
        logging.getLogger(__name__).debug(f"Running with config: {vars(self.config)}")

    def emit(self, text: str) -> None:
        """Write an artifact to --output or stdout."""
        if not text.endswith("\n"):
            text += "\n"
        output = getattr(self.config, "output", None)
        if output is None:
            sys.stdout.write(text)
            return
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text)
        logging.getLogger(__name__).info(f"Wrote {output.as_posix()}")
