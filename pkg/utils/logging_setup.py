"""Logging configuration for entry points. Library modules only call logging.getLogger(__name__)."""
import logging
import sys

from utils.config import get_section

DEFAULT_FORMAT = "%(levelname)s %(message)s"


def configure_logging(verbose: bool = False) -> None:
    cfg = get_section("logging")
    level_name = "DEBUG" if verbose else str(cfg.get("level", "WARNING")).upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.WARNING),
        format=cfg.get("format", DEFAULT_FORMAT),
        stream=sys.stderr,
        force=True,
    )
