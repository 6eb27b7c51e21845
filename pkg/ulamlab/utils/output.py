"""
CSV / JSON emission with stable column order.

Exact rationals print as "num/den" (integers without a denominator),
floats with 15 significant digits, log-space values as sign and
natural-log magnitude.
"""

import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO

from ..core.numkernel import LogReal


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (int, Fraction)):
        return str(value)
    if isinstance(value, LogReal):
        return f"{value.sign:+d} {value.logmag:.15g}"
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        return f"{value:.15g}"
    if value is None:
        return ''
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    if isinstance(value, LogReal):
        return {'sign': value.sign, 'log': value.logmag}
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def render_table(rows: Iterable[Dict[str, Any]], columns: Sequence[str], fmt: str = 'csv') -> str:
    rows = list(rows)
    if fmt == 'json':
        return json.dumps([{c: _jsonable(row.get(c)) for c in columns} for row in rows], indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buffer.getvalue()


def emit_table(rows: Iterable[Dict[str, Any]], columns: Sequence[str], out: Optional[str] = None,
               fmt: str = 'csv', stream: Optional[TextIO] = None):
    """Write a table to ``out`` (a path) or to stdout."""
    text = render_table(rows, columns, fmt)
    if out:
        Path(out).write_text(text)
    else:
        (stream or sys.stdout).write(text)


def write_json(payload: Dict[str, Any], path: str):
    if not path:
        raise OSError("empty output path")
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2) + "\n")
