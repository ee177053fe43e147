"""Structured logging setup for DipolarQB using loguru."""

import sys

from loguru import logger


def setup_logging(level: str = "INFO", serialize: bool = False) -> None:
    """Configure loguru for DipolarQB.

    Logs go to stderr; stdout carries command output (tables, reports).

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        serialize: Emit JSON records instead of the text format
    """
    logger.remove()

    if serialize:
        logger.add(sys.stderr, level=level.upper(), serialize=True)
        return

    logger.add(
        sys.stderr,
        format="[{time:YYYY-MM-DDTHH:mm:ss.SSS}Z] [{level}] [{extra[component]}] {message}",
        level=level.upper(),
        colorize=False,
    )


def get_logger(component: str):
    """Get a logger bound with component context.

    Args:
        component: Name of the component (e.g., 'thermal', 'runner')

    Returns:
        Logger bound with component context
    """
    return logger.bind(component=component)
