"""
CSV report writer (RFC 4180: comma-separated, CRLF line endings, quoted as needed).
"""

import csv
import io
from typing import Any

from .base import OutputError, Report, ReportWriter


def format_cell(value: Any) -> str:
    """Format one cell; floats carry 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


class CSVWriter(ReportWriter):
    """Writes the tabular view (``columns`` and ``rows``) of a report."""

    def render(self, report: Report) -> str:
        if not report.columns:
            raise OutputError(f"Report for {report.command!r} has no tabular view")
        buffer = io.StringIO(newline="")
        writer = csv.writer(buffer, lineterminator="\r\n")
        writer.writerow(report.columns)
        for row in report.rows:
            missing = [c for c in report.columns if c not in row]
            if missing:
                raise OutputError(f"Row is missing column(s) {missing}")
            writer.writerow([format_cell(row[c]) for c in report.columns])
        return buffer.getvalue()
