"""Deterministic report emission.

Every float is rendered with 17 significant digits, so identical inputs
produce byte-identical JSON and CSV files; json.dumps is avoided for
whole documents because its float rendering is shortest-round-trip, not
fixed-width.  Key order is whatever the producing as_dict() chose, which
each module documents; nothing is re-sorted here.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

__all__ = ["fmt_float", "render_json", "write_csv", "write_json"]


def fmt_float(x: float) -> str:
    """Fixed 17-significant-digit decimal form of a finite float."""
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} has no place in a report")
    return format(float(x), ".17g")


def _render(obj, pad: str) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    inner = pad + "  "
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = []
        for key, val in obj.items():
            if not isinstance(key, str):
                raise TypeError(f"JSON keys must be strings, got {key!r}")
            parts.append(f"{inner}{json.dumps(key, ensure_ascii=False)}: "
                         f"{_render(val, inner)}")
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [inner + _render(val, inner) for val in obj]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    raise TypeError(f"cannot render {type(obj).__name__} deterministically")


def render_json(doc) -> str:
    return _render(doc, "") + "\n"


def write_json(path, doc) -> Path:
    path = Path(path)
    path.write_text(render_json(doc), encoding="utf-8", newline="\n")
    return path


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, int):
        return str(value)
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([_cell(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8", newline="\n")
    return path
