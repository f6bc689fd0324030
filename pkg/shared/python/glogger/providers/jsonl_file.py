"""
JSON lines file provider.

Every record is appended to a file as one JSON object per line, with the same
shape as the console provider's JSON output. Records can optionally be echoed
to the console as well.
"""

import json
import sys
import threading
from pathlib import Path
from typing import IO, Any, Dict

from ..interfaces import LogEntry, LogProvider
from .console import ConsoleLogProvider, entry_to_dict


class JsonlFileLogProvider(LogProvider):
    """Append-only JSON lines log file, safe to share between worker threads."""

    def __init__(
        self, path: str | Path, include_source: bool = False, echo_to_console: bool = True
    ):
        self.path = Path(path)
        self.include_source = include_source
        self.echo_to_console = echo_to_console
        self._handle: IO[str] | None = None
        self._lock = threading.Lock()
        self._console: ConsoleLogProvider | None = None

    def initialize(self, config: Dict[str, Any]) -> bool:
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = self.path.open("a", encoding="utf-8")
        except OSError as e:
            print(f"Cannot open log file {self.path}: {e}", file=sys.stderr)
            return False

        if self.echo_to_console:
            self._console = ConsoleLogProvider(
                json_format=config.get("json_format", False), include_source=False
            )
            self._console.initialize({})
        return True

    def log(self, entry: LogEntry) -> bool:
        if self._handle is None:
            return False
        try:
            line = json.dumps(entry_to_dict(entry, self.include_source), default=str)
            with self._lock:
                self._handle.write(line + "\n")
        except Exception as e:
            print(f"File logging error: {e}", file=sys.stderr)
            return False
        if self._console is not None:
            self._console.log(entry)
        return True

    def flush(self) -> None:
        with self._lock:
            if self._handle is not None:
                self._handle.flush()
        if self._console is not None:
            self._console.flush()

    def close(self) -> None:
        with self._lock:
            if self._handle is not None:
                self._handle.close()
                self._handle = None

    @property
    def name(self) -> str:
        return "jsonl-file"

    @property
    def supports_structured_logging(self) -> bool:
        return True
