"""CSV/JSON table serialization shared by the CLI.

CSV files start with ``#`` comment lines carrying ``key=value`` metadata
(always including ``schema_version`` and ``table``), then a fixed header.
Floats are written with 17 significant digits so they round-trip exactly.
"""

from __future__ import annotations

import io
import json
import math
from typing import Any, Iterable, Mapping, Sequence

SCHEMA_VERSION = 1

SCHEMAS: dict[str, tuple[str, ...]] = {
    "solve": ("ell_lo", "ell_hi", "p_lo", "p_hi", "residual_1", "residual_2",
              "immediate_stop", "accuracy", "expected_time", "prob_choose_a"),
    "sweep": ("k", "ell_lo", "ell_hi", "p_lo", "p_hi", "accuracy", "expected_time"),
    "simulate": ("quantity", "closed_form", "monte_carlo", "std_err", "z_score"),
    "effort": ("k", "k_eff_lo", "k_eff_hi", "accuracy_lo", "accuracy_hi",
               "expected_time_lo", "expected_time_hi"),
    "cost": ("kappa", "p_star", "c_star", "t_star"),
    "discount": ("k", "ell_star", "accuracy", "expected_time"),
    "probe": ("problem_id", "delta", "se", "rank"),
}


def fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def parse_value(text: str) -> Any:
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def to_csv(table: str, rows: Iterable[Mapping[str, Any]], meta: Mapping[str, Any] | None = None) -> str:
    cols = SCHEMAS[table]
    buf = io.StringIO()
    buf.write(f"# schema_version={SCHEMA_VERSION}\n# table={table}\n")
    for key, val in (meta or {}).items():
        buf.write(f"# {key}={fmt(val)}\n")
    buf.write(",".join(cols) + "\n")
    for row in rows:
        buf.write(",".join(fmt(row[c]) for c in cols) + "\n")
    return buf.getvalue()


def to_json(table: str, rows: Iterable[Mapping[str, Any]], meta: Mapping[str, Any] | None = None) -> str:
    cols = SCHEMAS[table]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "table": table,
        "meta": dict(meta or {}),
        "rows": [{c: row[c] for c in cols} for row in rows],
    }
    return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def read_csv(text: str) -> tuple[dict[str, Any], list[dict[str, Any]]]:
    """Parse a table written by :func:`to_csv`; returns (metadata, rows)."""
    meta: dict[str, Any] = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        key, _, val = lines[i][1:].strip().partition("=")
        meta[key] = parse_value(val)
        i += 1
    if i == len(lines):
        return meta, []
    header = lines[i].split(",")
    rows = [dict(zip(header, map(parse_value, ln.split(",")))) for ln in lines[i + 1:] if ln]
    return meta, rows


def read_plain_csv(text: str, required: Sequence[str]) -> list[dict[str, str]]:
    """Header-first CSV (comment lines allowed) as string dicts."""
    import csv

    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    missing = [c for c in required if c not in (reader.fieldnames or [])]
    if missing:
        from .errors import ValidationError

        raise ValidationError(f"missing columns: {', '.join(missing)}")
    return [dict(r) for r in reader]
