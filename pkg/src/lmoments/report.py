"""CSV/JSON report emission with a metadata header."""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Sequence

SIG_DIGITS = 12


def fmt_number(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x + 0.0:.{SIG_DIGITS}g}"
    return str(x)


def _json_value(x: Any) -> Any:
    if isinstance(x, float):
        if not math.isfinite(x):
            return fmt_number(x)
        return float(f"{x:.{SIG_DIGITS}g}")
    return x


def split_complex(prefix: str, z: complex) -> dict[str, float]:
    z = complex(z)
    return {f"{prefix}_re": z.real, f"{prefix}_im": z.imag}


def render(fmt: str, columns: Sequence[str], rows: Sequence[dict], metadata: dict) -> str:
    for row in rows:
        missing = set(columns) - set(row)
        if missing:
            raise KeyError(f"row lacks columns {sorted(missing)}")
    if fmt == "json":
        doc = {
            "metadata": metadata,
            "columns": list(columns),
            "rows": [{c: _json_value(r[c]) for c in columns} for r in rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        for key, value in metadata.items():
            buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([fmt_number(r[c]) for c in columns])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def read_csv_report(text: str) -> tuple[dict, list[dict]]:
    """Inverse of the CSV layout: (metadata, rows as string dicts)."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = json.loads(value)
        else:
            body.append(line)
    return meta, list(csv.DictReader(body))
