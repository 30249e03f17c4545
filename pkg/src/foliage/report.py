"""Report assembly and rendering.

Reports are plain dictionaries; the JSON rendering is byte-deterministic for
a fixed scenario and seed (sorted keys, no timestamps, repr-based floats).
"""

from __future__ import annotations

import json
import math

SCHEMA_VERSION = "1.0"


def assemble(scenario_name, rows, overrides, fd_rows=None):
    rows = list(rows) + list(fd_rows or [])
    passed = sum(1 for r in rows if r["pass"])
    report = {
        "schema_version": SCHEMA_VERSION,
        "scenario": scenario_name,
        "overrides": {k: v for k, v in (overrides or {}).items()
                      if v is not None},
        "checks": rows,
        "summary": {
            "total": len(rows),
            "passed": passed,
            "failed": len(rows) - passed,
            "status": "pass" if passed == len(rows) else "fail",
        },
    }
    return report


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _sanitize(obj.tolist())
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    return str(obj)


def to_json(report):
    return json.dumps(_sanitize(report), sort_keys=True, indent=2) + "\n"


def to_markdown(report):
    lines = [f"# Verification report: {report['scenario']}", ""]
    if report["overrides"]:
        lines.append(f"Overrides: `{report['overrides']}`")
        lines.append("")
    lines.append("| check | target | verifies | residual | tolerance | pass |")
    lines.append("|---|---|---|---|---|---|")
    for row in report["checks"]:
        res = row.get("residual")
        res_text = f"{res:.3e}" if isinstance(res, float) else str(res)
        lines.append("| {name} | {target} | {verifies} | {res} | {tol:.1e} | "
                     "{ok} |".format(
                         name=row["name"], target=row["target"],
                         verifies=row["verifies"], res=res_text,
                         tol=row["tolerance"],
                         ok="yes" if row["pass"] else "NO"))
    s = report["summary"]
    lines.append("")
    lines.append(f"**{s['passed']}/{s['total']} checks passed; "
                 f"status: {s['status']}**")
    return "\n".join(lines) + "\n"
