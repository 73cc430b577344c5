"""Deterministic report bundles: canonical JSON plus plot-ready CSV tables."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


def to_jsonable(obj):
    """Recursively convert to plain JSON types; exact rationals become ``"p/q"`` strings."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, bytes):
        return obj.hex()
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            items.sort(key=lambda v: json.dumps(v, sort_keys=True))
        return items
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def rows_to_csv(rows: list[dict]) -> str:
    """CSV with columns in first-seen order; cells go through :func:`to_jsonable`."""
    cols: list = []
    for r in rows:
        cols.extend(c for c in r if c not in cols)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        cells = []
        for c in cols:
            v = to_jsonable(r.get(c, ""))
            cells.append(json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else v)
        w.writerow(cells)
    return buf.getvalue()


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail}


@dataclass
class Report:
    """Outcome of one command or scenario; ``tables`` map a file stem to row dicts."""

    name: str
    params: dict
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    truncated: bool = False
    config: str | None = None

    @property
    def passed(self) -> bool:
        return not self.truncated and all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, **detail) -> Check:
        c = Check(name, bool(passed), detail)
        self.checks.append(c)
        return c

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "params": self.params,
            "passed": self.passed,
            "truncated": self.truncated,
            "checks": [c.to_dict() for c in self.checks],
            "data": self.data,
        }
        if self.config is not None:
            d["config"] = self.config
        return d


def emit(report: Report, out_dir: str | None, fmt: str = "json") -> dict:
    """Render the bundle; write it under ``out_dir`` when given.  Returns ``{filename: text}``."""
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    files = {}
    if fmt == "json":
        files["report.json"] = dumps(report)
    else:
        files["checks.csv"] = rows_to_csv([{"name": c.name, "passed": c.passed, **c.detail} for c in report.checks])
        if report.config is not None:
            files["config.json"] = report.config if report.config.endswith("\n") else report.config + "\n"
    for stem, rows in sorted(report.tables.items()):
        files[f"{stem}.csv"] = rows if isinstance(rows, str) else rows_to_csv(rows)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for name, text in files.items():
            with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    return files


__all__ = ["Check", "Report", "dumps", "emit", "rows_to_csv", "to_jsonable"]
