"""
Factory for creating report writers.

This module provides a factory function for creating writers based on the
output configuration. Supported formats are CSV and JSON.
"""

import logging
from typing import Dict, Type

from .base import OutputError, ReportWriter
from .csv_writer import CSVWriter
from .json_writer import JSONWriter

logger = logging.getLogger(__name__)

# Registry of available writer implementations
WRITER_REGISTRY: Dict[str, Type[ReportWriter]] = {
    "csv": CSVWriter,
    "json": JSONWriter,
}


def get_writer(output_format: str) -> ReportWriter:
    """
    Create a writer for the requested format.

    Args:
        output_format: Format name, case-insensitive.

    Returns:
        ReportWriter: A writer instance.

    Raises:
        OutputError: If the format is unknown.
    """
    key = output_format.lower()
    if key not in WRITER_REGISTRY:
        raise OutputError(f"Unknown output format: {output_format}")
    logger.debug(f"Using {key} writer")
    return WRITER_REGISTRY[key]()
