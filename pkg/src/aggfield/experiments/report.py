"""Covariance reports and their CSV / JSON forms.

CSV: one row per ``(n, pair)`` with the columns of :data:`CSV_COLUMNS`.
Missing values are written as empty cells.

JSON (``format_version`` 1)::

    {
      "format_version": 1,
      "kind": "monte_carlo" | "convergence_table",
      "metadata": {"config": {...}, "seed": ..., ...},
      "rows": [{"n1": ..., ..., "ratio": ..., <extra keys>}, ...]
    }

Rows may carry extra keys beyond the CSV columns (for example ``error``
and ``error_ratio`` in convergence tables, or skewness diagnostics).
Non-finite floats are stored as ``null``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from ..errors import AggFieldError

FORMAT_VERSION = 1
CSV_COLUMNS = ("n1", "n2", "m", "s1", "s2", "t1", "t2",
               "theory", "exact", "estimate", "stderr", "ratio")
_INT_COLUMNS = ("n1", "n2", "m")


class ReportError(AggFieldError, OSError):
    """A report could not be written or read."""


@dataclass
class CovReport:
    kind: str
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "metadata": _clean(self.metadata),
            "rows": [_clean(r) for r in self.rows],
        }

    @classmethod
    def from_dict(cls, record):
        version = record.get("format_version")
        if version != FORMAT_VERSION:
            raise ReportError(f"unsupported report format_version {version!r}")
        rows = [{k: (math.nan if v is None else v) for k, v in r.items()} for r in record["rows"]]
        return cls(record["kind"], rows, record.get("metadata", {}))


def _clean(obj):
    # JSON has no NaN/inf: store them as null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def to_json(report: CovReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def to_csv(report: CovReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        cells = []
        for col in CSV_COLUMNS:
            v = row.get(col)
            if v is None or (isinstance(v, float) and not math.isfinite(v)):
                cells.append("")
            else:
                cells.append(repr(float(v)) if col not in _INT_COLUMNS else str(int(v)))
        writer.writerow(cells)
    return buf.getvalue()


def parse_csv(text: str) -> list:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        raise ReportError(f"unexpected CSV header {header!r}")
    rows = []
    for cells in reader:
        row = {}
        for col, cell in zip(CSV_COLUMNS, cells):
            if cell == "":
                row[col] = math.nan
            else:
                row[col] = int(cell) if col in _INT_COLUMNS else float(cell)
        rows.append(row)
    return rows


def emit_report(report: CovReport, path, format: str = "json") -> None:
    """Write ``report`` to ``path`` as ``csv`` or ``json``."""
    if format not in ("csv", "json"):
        raise ReportError(f"unknown report format {format!r}")
    text = to_csv(report) if format == "csv" else to_json(report)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportError(f"cannot write report to {path}: {exc}") from None


def load_report(path, format: str | None = None):
    """Read a report back: a :class:`CovReport` for JSON, a row list for CSV."""
    format = format or ("csv" if str(path).endswith(".csv") else "json")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ReportError(f"cannot read report {path}: {exc}") from None
    if format == "csv":
        return parse_csv(text)
    try:
        return CovReport.from_dict(json.loads(text))
    except (ValueError, KeyError) as exc:
        raise ReportError(f"{path}: malformed report: {exc}") from None
