"""Check rows, suite reports, CSV and JSON writers."""

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CheckRow",
    "ReportRecord",
    "config_hash",
    "fmt_float",
    "write_csv",
    "read_csv",
    "dump_json",
]

RELATIONS = ("abs", "le", "ge", "lt", "in")


def fmt_float(x):
    """17 significant digits, enough to round-trip a double."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return fmt_float(x)
        return x
    return obj


def dump_json(obj):
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def config_hash(config):
    text = json.dumps(_plain(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class CheckRow:
    """One verified quantity.

    ``relation`` decides the pass flag: ``abs`` means
    ``|estimated - predicted| <= tolerance``; ``le``/``ge`` mean
    ``estimated <= predicted + tolerance`` / ``>= predicted - tolerance``;
    ``lt`` means ``estimated < predicted`` (strict); ``in`` takes
    ``predicted = (lo, hi)`` and means ``lo - tol <= estimated <= hi + tol``.
    """

    name: str
    predicted: object
    estimated: float
    tolerance: float = 0.0
    relation: str = "abs"

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")

    @property
    def passed(self):
        e, p, tol = float(self.estimated), self.predicted, float(self.tolerance)
        if not math.isfinite(e):
            return False
        if self.relation == "abs":
            return abs(e - float(p)) <= tol
        if self.relation == "le":
            return e <= float(p) + tol
        if self.relation == "ge":
            return e >= float(p) - tol
        if self.relation == "lt":
            return e < float(p)
        lo, hi = p
        return float(lo) - tol <= e <= float(hi) + tol

    def as_dict(self):
        return {"name": self.name, "predicted": self.predicted, "estimated": self.estimated,
                "tolerance": self.tolerance, "relation": self.relation, "passed": self.passed}


@dataclass
class ReportRecord:
    name: str
    rows: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    runtime: float = 0.0

    def add(self, name, predicted, estimated, tolerance=0.0, relation="abs"):
        row = CheckRow(name, _plain(predicted), float(estimated), float(tolerance), relation)
        self.rows.append(row)
        return row

    @property
    def passed(self):
        return bool(self.rows) and all(r.passed for r in self.rows)

    def as_dict(self):
        return {
            "suite": self.name,
            "passed": self.passed,
            "rows": [r.as_dict() for r in self.rows],
            "environment": {"seed": self.config.get("seed"),
                            "config_hash": config_hash(self.config)},
            "config": self.config,
            "notes": self.notes,
            "runtime_s": round(self.runtime, 3),
        }

    def to_json(self, with_runtime=True):
        d = self.as_dict()
        if not with_runtime:
            d.pop("runtime_s")
        return dump_json(d)

    def summary(self):
        lines = [f"[{'PASS' if self.passed else 'FAIL'}] {self.name} ({self.runtime:.1f} s)"]
        for r in self.rows:
            p = r.predicted if r.relation == "in" else f"{float(r.predicted):.6g}"
            lines.append(f"    {'ok ' if r.passed else 'BAD'} {r.name}: estimated "
                         f"{r.estimated:.6g} vs {p} ({r.relation}, tol {r.tolerance:g})")
        return "\n".join(lines)


def write_csv(path_or_buf, header, columns):
    """Write columns (equal-length sequences) under a header line."""
    cols = [np.asarray(c) for c in columns]
    n = cols[0].shape[0] if cols else 0
    if any(c.shape[0] != n for c in cols):
        raise ValueError("CSV columns differ in length")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for i in range(n):
        w.writerow([fmt_float(c[i]) if np.issubdtype(c.dtype, np.number) else str(c[i])
                    for c in cols])
    text = buf.getvalue()
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def read_csv(path):
    """Header and float columns of a file written by :func:`write_csv`."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = {h: np.array([float(r[i]) for r in body]) for i, h in enumerate(header)}
    return header, cols
