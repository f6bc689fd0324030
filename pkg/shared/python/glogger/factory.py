"""
Logger factory implementation that manages provider selection and logger creation.
"""

import os
import sys
import traceback
from datetime import datetime, timezone
from typing import Any, Dict

from .interfaces import (
    LogContext,
    LogEntry,
    Logger,
    LoggerFactory,
    LogLevel,
    LogProvider,
)

_CORE_CONTEXT_FIELDS = ("run_id", "experiment", "error_type", "error_code")


class DefaultLogger(Logger):
    """
    Default logger implementation that works with any LogProvider.

    Loggers created by a factory resolve the provider through it on every call,
    so swapping the factory's provider reaches loggers created at import time.
    """

    def __init__(
        self,
        component: str,
        provider: LogProvider,
        default_context: Dict[str, Any],
        factory: "DefaultLoggerFactory | None" = None,
        min_level: LogLevel | None = None,
    ):
        self.component = component
        self._provider = provider
        self.default_context = default_context
        self.factory = factory
        self._min_level = min_level

    @property
    def provider(self) -> LogProvider:
        if self.factory is not None:
            return self.factory.get_provider()
        return self._provider

    @property
    def min_level(self) -> LogLevel:
        if self._min_level is not None:
            return self._min_level
        if self.factory is not None:
            return self.factory.min_level
        return LogLevel.DEBUG

    def with_context(self, **context_fields) -> Logger:
        """Create a new logger with additional context."""
        merged_context = {**self.default_context, **context_fields}
        return DefaultLogger(
            self.component, self._provider, merged_context, self.factory, self._min_level
        )

    def is_enabled_for(self, level: LogLevel) -> bool:
        return level.rank >= self.min_level.rank

    def _create_log_entry(
        self, level: LogLevel, message: str, exception: Exception | None = None, /, **context
    ) -> LogEntry:
        """Create a log entry with source location and context."""
        frame = sys._getframe(2)  # Skip this method and the calling log method

        merged_context = {**self.default_context, **context}
        core = {
            key: merged_context.pop(key) for key in _CORE_CONTEXT_FIELDS if key in merged_context
        }
        if exception is not None:
            core.setdefault("error_type", type(exception).__name__)
            code = getattr(exception, "code", None)
            if code is not None:
                core.setdefault("error_code", getattr(code, "value", str(code)))

        log_context = LogContext(
            component=self.component,
            environment=os.getenv("ENVIRONMENT", "development"),
            service_name=os.getenv("SERVICE_NAME"),
            service_version=os.getenv("SERVICE_VERSION"),
            custom=merged_context,
            **core,
        )

        return LogEntry(
            level=level,
            message=message,
            timestamp=datetime.now(timezone.utc),
            context=log_context,
            exception=exception,
            stack_trace=traceback.format_exc() if exception else None,
            source_file=frame.f_code.co_filename,
            source_line=frame.f_lineno,
            source_function=frame.f_code.co_name,
        )

    def _emit(self, entry: LogEntry) -> None:
        self.provider.log(entry)

    def debug(self, message: str, **context) -> None:
        """Log a debug message."""
        if not self.is_enabled_for(LogLevel.DEBUG):
            return
        self._emit(self._create_log_entry(LogLevel.DEBUG, message, **context))

    def info(self, message: str, **context) -> None:
        """Log an info message."""
        if not self.is_enabled_for(LogLevel.INFO):
            return
        self._emit(self._create_log_entry(LogLevel.INFO, message, **context))

    def warning(self, message: str, **context) -> None:
        """Log a warning message."""
        if not self.is_enabled_for(LogLevel.WARNING):
            return
        self._emit(self._create_log_entry(LogLevel.WARNING, message, **context))

    def error(self, message: str, exception: Exception | None = None, **context) -> None:
        """Log an error message."""
        if not self.is_enabled_for(LogLevel.ERROR):
            return
        self._emit(self._create_log_entry(LogLevel.ERROR, message, exception, **context))

    def critical(self, message: str, exception: Exception | None = None, **context) -> None:
        """Log a critical message."""
        self._emit(self._create_log_entry(LogLevel.CRITICAL, message, exception, **context))

    def info_with_context(self, message: str, context: Dict[str, Any]) -> None:
        """Log an info message with context dict (compatibility method)."""
        self.info(message, **context)

    def error_with_context(self, message: str, context: Dict[str, Any]) -> None:
        """Log an error message with context dict (compatibility method)."""
        self.error(message, **context)

    def exception_with_context(self, message: str, context: Dict[str, Any]) -> None:
        """Log an exception with context dict (compatibility method)."""
        self.error(message, **context)

    def warning_with_context(self, message: str, context: Dict[str, Any]) -> None:
        """Log a warning message with context dict (compatibility method)."""
        self.warning(message, **context)

    def log_run(
        self,
        experiment: str,
        status: str,
        duration_ms: float | None = None,
        **context,
    ) -> None:
        """Log the outcome of one experiment run."""
        level = LogLevel.INFO if status == "pass" else LogLevel.ERROR
        if status == "skipped":
            level = LogLevel.WARNING
        if not self.is_enabled_for(level):
            return

        message = f"experiment {experiment} -> {status}"
        entry = self._create_log_entry(level, message, experiment=experiment, **context)
        entry.run_status = status
        entry.run_duration_ms = duration_ms
        self._emit(entry)


class DefaultLoggerFactory(LoggerFactory):
    """
    Default logger factory implementation.

    Manages provider selection and creates logger instances.
    """

    def __init__(self, provider: LogProvider, min_level: LogLevel | None = None):
        self.provider = provider
        self.min_level = min_level or LogLevel.parse(os.getenv("LOG_LEVEL"), LogLevel.INFO)

    def create_logger(self, component: str, **default_context) -> Logger:
        """Create a logger for a specific component."""
        return DefaultLogger(component, self.provider, default_context, factory=self)

    def set_provider(self, provider: LogProvider) -> None:
        """Set the logging provider."""
        if self.provider and self.provider is not provider:
            self.provider.flush()
            self.provider.close()
        self.provider = provider

    def set_level(self, level: LogLevel | str) -> None:
        if isinstance(level, str):
            level = LogLevel.parse(level, self.min_level)
        self.min_level = level

    def get_provider(self) -> LogProvider:
        """Get the current provider."""
        return self.provider


# Global factory instance
_logger_factory: DefaultLoggerFactory | None = None


def create_logger_factory(
    provider: LogProvider, min_level: LogLevel | None = None
) -> DefaultLoggerFactory:
    """
    Create a logger factory with the specified provider.

    This is typically called once during application startup.
    """
    global _logger_factory
    factory = DefaultLoggerFactory(provider, min_level)
    _logger_factory = factory
    return factory


def get_logger(component: str, **default_context) -> Logger:
    """
    Get a logger for the specified component.

    This is the main entry point for application code to get loggers.
    """
    if _logger_factory is None:
        raise RuntimeError("Logger factory not initialized. Call create_logger_factory() first.")

    return _logger_factory.create_logger(component, **default_context)


def set_provider(provider: LogProvider) -> None:
    """Set the global logging provider."""
    if _logger_factory is None:
        raise RuntimeError("Logger factory not initialized. Call create_logger_factory() first.")

    _logger_factory.set_provider(provider)
