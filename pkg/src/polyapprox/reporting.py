"""CSV and JSON serialization of bound reports and constant tables.

Floats are written with ``repr`` so that reading a file back reproduces the
in-memory values bit for bit.  A degenerate ratio is an empty CSV cell and a
JSON ``null``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

from .verify import BoundReport, ConstantEstimate

SCHEMA_VERSION = 1

CSV_COLUMNS = ("schema_version", "domain", "gamma", "field", "m", "k", "p", "method",
               "lhs", "rhs_seminorm", "d", "rhs", "ratio", "degenerate")

PathOrFile = Union[str, Path, TextIO]


def _fmt(x: Optional[float]) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _num(text: str) -> Optional[float]:
    return None if text == "" else float(text)


def reports_to_csv(reports: Iterable[BoundReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([SCHEMA_VERSION, r.domain, _fmt(r.gamma), r.field, r.m, r.k, _fmt(r.p),
                    r.method, _fmt(r.lhs), _fmt(r.rhs_seminorm), _fmt(r.d), _fmt(r.rhs),
                    _fmt(r.ratio), int(r.degenerate)])
    return buf.getvalue()


def reports_from_csv(text: str) -> list[BoundReport]:
    rows = csv.DictReader(io.StringIO(text))
    out = []
    for row in rows:
        if int(row["schema_version"]) != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {row['schema_version']}")
        out.append(BoundReport(
            domain=row["domain"], gamma=float(row["gamma"]), field=row["field"],
            m=int(row["m"]), k=int(row["k"]), p=float(row["p"]), method=row["method"],
            lhs=float(row["lhs"]), rhs_seminorm=float(row["rhs_seminorm"]), d=float(row["d"]),
            rhs=float(row["rhs"]), ratio=_num(row["ratio"])))
    return out


def _p_json(p: float):
    return "inf" if math.isinf(p) else p


def summary_dict(estimates: Sequence[ConstantEstimate], reports: Sequence[BoundReport] = (),
                 meta: Optional[dict] = None) -> dict:
    """JSON-ready summary: the ``c_hat`` table plus the k < m maxima."""
    below: dict[tuple, float] = {}
    for r in reports:
        if r.ratio is not None and r.k < r.m:
            key = (r.method, r.m, r.domain)
            below[key] = max(below.get(key, 0.0), r.ratio)
    table = []
    for e in estimates:
        dom, fld, k, p = e.witness
        table.append({"method": e.method, "m": e.m, "n": e.n, "gamma_bucket": e.gamma_bucket,
                      "c_hat": e.c_hat, "count": e.count,
                      "witness": {"domain": dom, "field": fld, "k": k, "p": _p_json(p)}})
    return {
        "schema_version": SCHEMA_VERSION,
        "meta": meta or {},
        "constants": table,
        "max_ratio_below_top_order": [
            {"method": k[0], "m": k[1], "domain": k[2], "ratio": v}
            for k, v in sorted(below.items())],
    }


def estimates_from_summary(data: dict) -> list[ConstantEstimate]:
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {data.get('schema_version')}")
    out = []
    for row in data["constants"]:
        w = row["witness"]
        p = math.inf if w["p"] == "inf" else float(w["p"])
        out.append(ConstantEstimate(row["method"], row["m"], row["n"], row["gamma_bucket"],
                                    row["c_hat"], (w["domain"], w["field"], w["k"], p),
                                    row["count"]))
    return out


def dumps_json(data: dict) -> str:
    # allow_nan=False: the summary never carries NaN or inf as numbers
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"


def report_dict(obj) -> dict:
    """Plain-dict view of any report dataclass, inf mapped to the string ``"inf"``."""
    def clean(v):
        if isinstance(v, float) and math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if isinstance(v, float) and math.isnan(v):
            return None
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        return v
    return clean(asdict(obj))


def write_text(path: PathOrFile, text: str) -> None:
    if hasattr(path, "write"):
        path.write(text)
        return
    Path(path).write_text(text)
