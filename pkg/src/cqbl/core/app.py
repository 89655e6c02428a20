"""Main application class for cqbl."""

import logging
import sys
from typing import List, Optional

from .. import __version__
from ..cli.commands import CommandContext, dispatch
from ..cli.parser import build_parser
from ..config import ConfigManager

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class CqblApp:
    """Command-line application: parses arguments, loads settings and runs one command."""

    def __init__(self, argv: Optional[List[str]] = None):
        self.args = build_parser().parse_args(argv)

        self.setup_logging(self.args.log_level or "INFO")
        self.logger = logging.getLogger(__name__)

        self.config_manager = ConfigManager(self.args.config_dir)
        self.settings = self.config_manager.get_settings()
        self.apply_overrides()

    def setup_logging(self, level: str):
        """Set up application logging.

        Records go to stderr; stdout carries CSV and JSON output.
        """
        logging.basicConfig(
            level=getattr(logging, level, logging.INFO),
            format=LOG_FORMAT,
            handlers=[logging.StreamHandler(sys.stderr)],
        )

    def apply_overrides(self):
        """Command-line flags win over persisted settings for this run only."""
        runtime = self.settings.runtime
        if self.args.log_level:
            runtime.log_level = self.args.log_level
        else:
            logging.getLogger().setLevel(getattr(logging, runtime.log_level.upper(), logging.INFO))
        if self.args.bits:
            runtime.bits = True
        if runtime.log_file:
            try:
                handler = logging.FileHandler(runtime.log_file)
                handler.setFormatter(logging.Formatter(LOG_FORMAT))
                logging.getLogger().addHandler(handler)
            except OSError as e:
                self.logger.warning(f"Cannot open log file {runtime.log_file}: {e}")

    def get_config_manager(self) -> ConfigManager:
        return self.config_manager

    def run(self) -> int:
        """Run the selected command and return its exit code."""
        command = self.args.command if self.args.command != "audit" else f"audit {self.args.audit}"
        self.logger.info(f"cqbl {__version__}: {command}")
        ctx = CommandContext(
            settings=self.settings,
            bits=self.settings.runtime.bits,
            config_manager=self.config_manager,
        )
        return dispatch(self.args, ctx)


def create_app(argv: Optional[List[str]] = None) -> CqblApp:
    """Create and return a cqbl application instance.

    Args:
        argv: Command line arguments without the program name (defaults to sys.argv[1:])

    Returns:
        CqblApp instance
    """
    if argv is None:
        argv = sys.argv[1:]
    return CqblApp(argv)
