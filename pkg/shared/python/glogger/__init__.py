"""
Structured logging for dirac-warp runs.

Example usage:
    from glogger import logger  # Pre-configured default logger

    # Or create component-specific loggers
    from glogger import get_component_logger
    evolve_logger = get_component_logger('evolve')

    logger.info("Run started", run_id="r-001")
"""

import os

from .factory import get_logger
from .interfaces import LogLevel
from .setup import auto_configure_logging, build_provider

# Auto-configure logging and create default logger
_factory = auto_configure_logging()
logger = _factory.create_logger("dirac-warp")


def get_component_logger(component: str, **default_context):
    """Get a logger for a specific component."""
    return _factory.create_logger(component, **default_context)


def get_run_logger(run_id: str, **context):
    """Get a logger bound to a specific run (and optionally an experiment)."""
    return logger.with_context(run_id=run_id, **context)


def reconfigure_logging(
    force_provider: str | None = None,
    provider_config: dict | None = None,
    level: str | None = None,
):
    """Swap the provider behind every logger created so far (used by the CLI flags)."""
    _factory.set_provider(build_provider(force_provider, provider_config))
    _factory.set_level(LogLevel.parse(level or os.getenv("LOG_LEVEL"), LogLevel.INFO))
    return _factory


__all__ = [
    "auto_configure_logging",
    "get_logger",
    "logger",
    "get_component_logger",
    "get_run_logger",
    "reconfigure_logging",
]
