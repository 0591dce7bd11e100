"""
Base interface and exceptions for report writers.
"""

import os
import tempfile
from abc import ABC, abstractmethod
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from filelock import FileLock, Timeout
from pydantic import BaseModel, Field

from ..config import SCHEMA_VERSION
from ..core.base import QFisherError


class OutputError(QFisherError):
    """Base exception for all output-related errors."""
    pass


class OutputLockError(OutputError):
    """Raised when the lock on an output file cannot be acquired in time."""
    pass


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class Report(BaseModel):
    """
    Machine-readable result of one CLI run.

    ``result`` holds the full structured result (the JSON payload); ``rows``
    and ``columns`` are its tabular view for CSV.
    """

    schema_version: str = Field(SCHEMA_VERSION, description="Report schema version")
    command: str = Field(..., description="Subcommand that produced the report")
    generated_at: str = Field(default_factory=_utc_now, description="Creation timestamp (UTC)")
    parameters: Dict[str, Any] = Field(default_factory=dict, description="Effective parameters")
    result: Dict[str, Any] = Field(default_factory=dict, description="Structured result")
    columns: List[str] = Field(default_factory=list, description="CSV column order")
    rows: List[Dict[str, Any]] = Field(default_factory=list, description="CSV rows")

    def envelope(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "generated_at": self.generated_at,
            "parameters": self.parameters,
            "result": self.result,
        }


class ReportWriter(ABC):
    """Base interface for report writers."""

    @abstractmethod
    def render(self, report: Report) -> str:
        """
        Serialize a report.

        Args:
            report: The report to serialize.

        Returns:
            str: The serialized text.

        Raises:
            OutputError: If the report cannot be represented in this format.
        """
        pass

    def write(self, report: Report, path: Optional[str] = None, lock_timeout: float = 30.0) -> str:
        """
        Render a report and, if ``path`` is given, store it there.

        The file is written under a lock on ``path + ".lock"`` and replaced
        atomically, so concurrent runs never leave a partial file.

        Args:
            report: The report to write.
            path: Destination file; nothing is written when omitted.
            lock_timeout: Timeout for acquiring the file lock in seconds.

        Returns:
            str: The rendered text.

        Raises:
            OutputLockError: If the lock is not acquired in time.
            OutputError: If the file cannot be written.
        """
        text = self.render(report)
        if path is None:
            return text
        target = os.path.abspath(path)
        directory = os.path.dirname(target)
        try:
            os.makedirs(directory, exist_ok=True)
            with FileLock(target + ".lock", timeout=lock_timeout):
                fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
                try:
                    with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                        f.write(text)
                    os.replace(tmp_path, target)
                except BaseException:
                    if os.path.exists(tmp_path):
                        os.remove(tmp_path)
                    raise
        except Timeout as e:
            raise OutputLockError(f"Timed out waiting for lock on {target}: {e}")
        except (OSError, PermissionError) as e:
            raise OutputError(f"Failed to write report to {target}: {e}")
        return text
