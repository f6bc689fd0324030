"""
Logging setup utilities for automatic provider detection and configuration.

Development runs get human-readable console output; any other ENVIRONMENT
gets JSON lines so batch logs can be collected and parsed.
"""

import os
import sys
from typing import Any, Dict, List

from .factory import DefaultLoggerFactory, create_logger_factory
from .interfaces import LogLevel, LogProvider
from .providers.console import ConsoleLogProvider
from .providers.jsonl_file import JsonlFileLogProvider


def detect_environment() -> str:
    """
    Detect the run environment from the ENVIRONMENT variable.

    Returns:
        'development', 'test', 'ci', 'production' or 'unknown'
    """
    env = (os.getenv("ENVIRONMENT") or "").strip().lower()
    if env in ("development", "test", "ci", "production"):
        return env
    return "unknown"


def create_provider_from_config(provider_type: str, config: Dict[str, Any]) -> LogProvider:
    """
    Create a logging provider from configuration.

    Args:
        provider_type: Provider type ('console' or 'jsonl_file')
        config: Provider-specific configuration

    Raises:
        ValueError: If provider_type is not supported
    """
    if provider_type == "console":
        return ConsoleLogProvider(
            json_format=config.get("json_format", False),
            include_source=config.get("include_source", True),
        )
    elif provider_type == "jsonl_file":
        path = config.get("path")
        if not path:
            raise ValueError("jsonl_file provider requires a 'path'")
        return JsonlFileLogProvider(
            path=path,
            include_source=config.get("include_source", False),
            echo_to_console=config.get("echo_to_console", True),
        )
    else:
        raise ValueError(f"Unsupported provider type: {provider_type}")


def build_provider(
    force_provider: str | None = None, provider_config: Dict[str, Any] | None = None
) -> LogProvider:
    """Create and initialize a provider, falling back to plain console output."""
    config = dict(provider_config or {})

    if force_provider:
        provider_type = force_provider
    else:
        provider_type = "console"
        if detect_environment() != "development":
            config.setdefault("json_format", True)

    provider = create_provider_from_config(provider_type, config)

    if not provider.initialize(config):
        print(
            f"Failed to initialize {provider_type} provider, falling back to console",
            file=sys.stderr,
        )
        provider = ConsoleLogProvider()
        provider.initialize({})

    return provider


def auto_configure_logging(
    force_provider: str | None = None, provider_config: Dict[str, Any] | None = None
) -> DefaultLoggerFactory:
    """
    Automatically configure logging based on environment detection.

    Args:
        force_provider: Force a specific provider ('console', 'jsonl_file')
        provider_config: Additional configuration for the provider

    Returns:
        Configured LoggerFactory instance

    Example:
        factory = auto_configure_logging()
        logger = factory.create_logger('evolve')

        # Mirror every record into a JSON lines file
        factory = auto_configure_logging(
            force_provider='jsonl_file',
            provider_config={'path': 'out/run.log.jsonl'}
        )
    """
    provider = build_provider(force_provider, provider_config)
    return create_logger_factory(provider, LogLevel.parse(os.getenv("LOG_LEVEL"), LogLevel.INFO))


def setup_logging_for_environment(environment: str) -> DefaultLoggerFactory:
    """Set up logging for a specific environment with sensible defaults."""
    if environment == "development":
        return auto_configure_logging(
            force_provider="console", provider_config={"json_format": False, "include_source": True}
        )
    elif environment in ["ci", "production"]:
        return auto_configure_logging(
            force_provider="console",
            provider_config={"json_format": True, "include_source": False},
        )
    else:
        return auto_configure_logging()


def get_available_providers() -> List[str]:
    """Get list of available logging providers."""
    return ["console", "jsonl_file"]
