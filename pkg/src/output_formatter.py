#!/usr/bin/env python3
"""
Output Formatter for distgraph-lab
Serializes result tables as CSV (one row per record) or as a JSON document
echoing the resolved run config.
"""

import io
import json
import math
import sys
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, Any, List, Optional
import logging

import numpy as np
import pandas as pd

from models import OutputFormat

logger = logging.getLogger(__name__)


def _json_value(value: Any) -> Any:
    """Plain JSON value for results that carry exact or numpy types"""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def _csv_cell(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (list, tuple)):
        return " ".join(str(_csv_cell(v)) for v in value)
    if isinstance(value, dict):
        return " ".join(f"{k}:{_csv_cell(v)}" for k, v in value.items())
    if value is None:
        return ""
    return value


class ResultFormatter:
    """Formats result rows for output"""

    def __init__(self, output_format: OutputFormat = OutputFormat.CSV, version: str = ""):
        self.output_format = OutputFormat(output_format)
        self.version = version

    def format_result(self, command: str, config: Dict[str, Any], seed: Optional[int],
                      rows: List[Dict[str, Any]], summary: Optional[Dict[str, Any]] = None) -> str:
        """
        Format one command's result

        Args:
            command: Subcommand path, e.g. "sample sweep"
            config: Resolved config to echo (JSON only)
            seed: Master seed
            rows: Records in output order
            summary: Extra scalar results (JSON only)

        Returns:
            The serialized text, ending with a newline
        """
        if self.output_format is OutputFormat.JSON:
            return self._format_json(command, config, seed, rows, summary or {})
        return self._format_csv(rows)

    def _format_csv(self, rows: List[Dict[str, Any]]) -> str:
        frame = pd.DataFrame([{k: _csv_cell(v) for k, v in row.items()} for row in rows])
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, lineterminator="\n")
        return buffer.getvalue()

    def _format_json(self, command: str, config: Dict[str, Any], seed: Optional[int],
                     rows: List[Dict[str, Any]], summary: Dict[str, Any]) -> str:
        document = {
            "library_version": self.version,
            "master_seed": seed,
            "command": command,
            "config": _json_value(config),
            "rows": _json_value(rows),
            "summary": _json_value(summary),
        }
        return json.dumps(document, indent=2, ensure_ascii=False) + "\n"

    def write(self, text: str, out: Optional[str] = None) -> None:
        """Write to the output path, or stdout when none is given"""
        if not out:
            sys.stdout.write(text)
            return
        path = Path(out).expanduser()
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        logger.info(f"Wrote {self.output_format.value} output to {path}")
