"""
JSON report writer.
"""

import json
import math
from typing import Any

from .base import OutputError, Report, ReportWriter


def _check_finite(value: Any, where: str = "result") -> None:
    if isinstance(value, float) and not math.isfinite(value):
        raise OutputError(f"Non-finite number at {where} cannot be written as JSON")
    if isinstance(value, dict):
        for key, item in value.items():
            _check_finite(item, f"{where}.{key}")
    elif isinstance(value, (list, tuple)):
        for i, item in enumerate(value):
            _check_finite(item, f"{where}[{i}]")


class JSONWriter(ReportWriter):
    """
    Writes a report as one JSON object.

    Floats use Python's shortest round-trip representation, so every value
    reads back bit-for-bit. Key order is fixed by the report, which keeps
    output byte-identical across runs apart from ``generated_at``.
    """

    def render(self, report: Report) -> str:
        payload = report.envelope()
        _check_finite(payload, "report")
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"
