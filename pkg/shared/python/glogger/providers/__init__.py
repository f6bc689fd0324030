"""
Logging providers.

Console output (formatted or JSON lines) for interactive runs and a JSON-lines
file provider for archiving the log of a batch run next to its results.
"""

from .console import ConsoleLogProvider
from .jsonl_file import JsonlFileLogProvider

__all__ = ["ConsoleLogProvider", "JsonlFileLogProvider"]
