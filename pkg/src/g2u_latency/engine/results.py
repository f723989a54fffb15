"""Sweep result tables and their CSV / JSON emission."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from ..errors import ConfigError

CSV_COLUMNS = (
    "swept_value", "delay_symbols", "delay_seconds", "delay_stderr", "outage_frac",
    "sinr_db", "sir_db", "p_min_dbm", "rho_used",
)


@dataclass
class SweepRow:
    swept_value: float
    delay_symbols: float | None = None
    delay_seconds: float | None = None
    delay_stderr: float | None = None
    outage_frac: float | None = None
    sinr_db: float | None = None
    sir_db: float | None = None
    p_min_dbm: float | None = None
    rho_used: float | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def values(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]


@dataclass
class SweepResult:
    swept_name: str
    rows: list[SweepRow]
    series: str | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        xs = [r.swept_value for r in self.rows]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ConfigError(f"sweep over {self.swept_name} must be strictly ascending")

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def to_csv(results: SweepResult | Sequence[SweepResult]) -> str:
    """RFC 4180 CSV text. Several results are stacked with a leading
    ``series`` column."""
    multi = not isinstance(results, SweepResult)
    results = list(results) if multi else [results]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow((["series"] if multi else []) + list(CSV_COLUMNS))
    for res in results:
        for row in res.rows:
            cells = [_cell(v) for v in row.values()]
            w.writerow(([res.series or ""] if multi else []) + cells)
    return buf.getvalue()


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def to_rows_json(results: SweepResult | Iterable[SweepResult]) -> str:
    """JSON array of row objects, each tagged with its sweep name and series."""
    if isinstance(results, SweepResult):
        results = [results]
    out = []
    for res in results:
        for row in res.rows:
            obj = {"swept_name": res.swept_name, "series": res.series}
            obj.update({c: getattr(row, c) for c in CSV_COLUMNS})
            obj["meta"] = row.meta
            out.append(_json_safe(obj))
    return json.dumps(out, indent=2)
