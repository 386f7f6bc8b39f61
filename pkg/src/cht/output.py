"""Text output helpers: deterministic float formatting and sectioned TSV.

Every numeric table in the package goes through these helpers so that
repeated runs (and threaded runs) produce byte-identical files.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence


def fmt(value) -> str:
    """Format one cell. Floats use 17 significant digits, which round-trips
    IEEE doubles exactly; everything else falls back to str()."""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.17g}"
    return str(value)


def tsv_rows(rows: Iterable[Sequence]) -> str:
    return "\n".join("\t".join(fmt(c) for c in row) for row in rows)


def section(name: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """One named block: a `# name` marker line, a header row, data rows."""
    body = tsv_rows(rows)
    parts = [f"# {name}", "\t".join(header)]
    if body:
        parts.append(body)
    return "\n".join(parts)


def document(sections: Iterable[str]) -> str:
    """Join blocks with blank lines and end with a newline."""
    return "\n\n".join(sections) + "\n"
