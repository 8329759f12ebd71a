"""
utils.py - Shared Utilities

Helpers used by the command-line layer: round-trippable float formatting,
CSV/JSON table writers, ``n``-range parsing and the worker-thread cap.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

THREADS_ENV = "BIWAVE_THREADS"


def format_float(value: float) -> str:
    """
    Format a float with 17 significant digits so it round-trips exactly.

    ``nan`` and infinities are written as ``nan``, ``inf``, ``-inf``.
    """
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def render_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]], comments: Sequence[str] = ()) -> str:
    """
    Render a table as CSV text.

    Parameters:
    - columns: column names, written on a ``#``-prefixed header line.
    - rows: row values; floats use :func:`format_float`.
    - comments: extra ``#`` lines (units, normalization) written before the header.

    Returns:
    - str: CSV text with ``\\n`` line endings.
    """
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    buf.write("# " + ",".join(columns) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def render_json(
    columns: Sequence[str], rows: Iterable[Sequence[Any]], meta: dict[str, Any] | None = None
) -> str:
    """Render a table as a JSON document ``{"meta": ..., "rows": [{column: value}]}``."""
    records = [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]
    return json.dumps({"meta": meta or {}, "rows": records}, indent=2, sort_keys=True) + "\n"


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return format_float(value)
    if hasattr(value, "item"):
        return value.item()
    return value


def write_output(text: str, out: str | os.PathLike[str] | None) -> Path | None:
    """
    Write ``text`` to ``out``, or to stdout when ``out`` is None or ``-``.

    Returns:
    - Path or None: the written file, None for stdout.
    """
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        return None
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return path


def parse_n_range(text: str) -> list[int]:
    """
    Parse ``"A..B"`` (inclusive), ``"A"`` or a comma list ``"0,2,5"`` into quantum numbers.

    An inverted range such as ``"3..2"`` is empty.

    Raises:
        ValueError: on malformed input or negative values.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty n range")
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        lo, hi = int(lo_text), int(hi_text)
        values = list(range(lo, hi + 1))
        if lo < 0:
            raise ValueError(f"quantum numbers must be >= 0, got {text!r}")
        return values
    values = [int(part) for part in text.split(",") if part.strip()]
    if any(v < 0 for v in values):
        raise ValueError(f"quantum numbers must be >= 0, got {text!r}")
    return values


def thread_cap(logger, requested: int | None = None) -> int:
    """
    Worker-thread count: ``requested`` capped by ``BIWAVE_THREADS``.

    An unset cap leaves ``requested`` (default 1) unchanged; an invalid cap
    falls back to 1 with a warning.
    """
    requested = max(1, requested or 1)
    raw = os.environ.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return requested
    try:
        cap = int(raw)
        if cap < 1:
            raise ValueError(raw)
    except ValueError:
        logger.warning(f"Ignoring invalid {THREADS_ENV}={raw!r}; using 1 thread")
        return 1
    return min(requested, cap)
