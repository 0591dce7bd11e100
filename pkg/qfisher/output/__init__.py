"""
Report writers for machine-readable CLI output.
"""

from .base import (
    OutputError,
    OutputLockError,
    Report,
    ReportWriter,
)
from .csv_writer import CSVWriter
from .json_writer import JSONWriter
from .factory import get_writer

__all__ = [
    'Report',
    'ReportWriter',
    'CSVWriter',
    'JSONWriter',
    'get_writer',
    'OutputError',
    'OutputLockError',
]
