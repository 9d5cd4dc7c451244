"""Deterministic CSV/JSON report serialization.

Output must be byte-identical across reruns and parallelism degrees, so all
floats are rendered with repr (shortest round-trip form), JSON keys are
sorted, and nothing time- or host-dependent is ever written. Infinite values
appear as "inf" in CSV and as the (non-strict JSON) Infinity literal in JSON,
which Python's json module reads back exactly.
"""

from __future__ import annotations

import json
import math

from .experiments import Report


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def to_csv(report: Report) -> str:
    lines = [f"# schema={report.schema}"]
    lines.append(",".join(report.columns))
    for row in report.rows:
        lines.append(",".join(_cell(row.get(c)) for c in report.columns))
    return "\n".join(lines) + "\n"


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "tolist"):   # numpy scalars and arrays
        return _jsonable(value.tolist())
    return value


def to_json(report: Report, per_trial: bool = False) -> str:
    doc = {
        "schema": report.schema,
        "config": _jsonable(report.config),
        "columns": list(report.columns),
        "rows": _jsonable(report.rows),
        "warnings": list(report.warnings),
    }
    if per_trial:
        doc["per_trial"] = _jsonable(report.per_trial)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_report(report: Report, path: str, fmt: str, per_trial: bool = False) -> None:
    if fmt == "csv":
        text = to_csv(report)
    elif fmt == "json":
        text = to_json(report, per_trial=per_trial)
    else:
        raise ValueError(f"unknown format: {fmt}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def load_json_report(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
