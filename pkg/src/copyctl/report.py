"""JSON and TSV rendering.

Fractions are written with exactly six decimals in both formats, so the two
renderings of a run carry identical numbers. Undefined values (a CER without
copies) are ``null`` in JSON and ``NA`` in TSV.
"""

from __future__ import annotations

import json
from typing import Any, Optional, Sequence

from .metrics import CopyStats

DECIMALS = 6


class Fixed(float):
    """A float that renders with a fixed number of decimals."""

    def render(self) -> str:
        return f"{float(self):.{DECIMALS}f}"


def fixed(x: Optional[float]) -> Optional[Fixed]:
    return None if x is None else Fixed(x)


def pct(x: Optional[float], suffix: str = "%") -> Optional[str]:
    return None if x is None else f"{100 * x:.1f}{suffix}"


def stats_record(stats: CopyStats) -> dict[str, Any]:
    return {
        "copy_tokens": stats.copy_tokens,
        "total_tokens": stats.total_tokens,
        "copy_errors": stats.copy_errors,
        "ratio": fixed(stats.ratio),
        "cer": fixed(stats.cer),
        "ratio_pct": pct(stats.ratio),
        "cer_pct": pct(stats.cer, ""),
    }


def _json_value(value, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(value, Fixed):
        return value.render()
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_json_value(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [pad + _json_value(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return json.dumps(value, ensure_ascii=False)


def to_json(obj, indent: int = 2) -> str:
    return _json_value(obj, indent, 0) + "\n"


def _cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, Fixed):
        return value.render()
    if isinstance(value, float):
        return f"{value:.{DECIMALS}f}"
    return str(value)


def to_tsv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    lines = ["\t".join(columns)]
    lines += ["\t".join(_cell(row.get(c)) for c in columns) for row in rows]
    return "\n".join(lines) + "\n"


STATS_COLUMNS = ["copy_tokens", "total_tokens", "copy_errors", "ratio", "cer", "ratio_pct", "cer_pct"]
