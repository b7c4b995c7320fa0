"""Deterministic text and JSON rendering shared by reports and the CLI."""

from __future__ import annotations

import json
from typing import List, Sequence


def render_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Aligned plain-text table with a dashed header rule."""
    cols = [list(map(str, col)) for col in zip(headers, *rows)] if rows \
        else [[str(h)] for h in headers]
    widths = [max(len(cell) for cell in col) for col in cols]
    def fmt(cells):
        return "  ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()
    lines: List[str] = [fmt(headers), fmt("-" * w for w in widths)]
    lines.extend(fmt(r) for r in rows)
    return "\n".join(lines)


def json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
