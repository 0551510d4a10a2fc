"""JSON-lines solution records ("qes-record/1")."""
from __future__ import annotations

import json
import os
from datetime import datetime, timezone

from .recursion import QesProblem
from .solver import ConstraintRecord, QesSolution

SCHEMA = "qes-record/1"


class RecordError(ValueError):
    pass


def timestamp() -> str:
    """UTC time from SOURCE_DATE_EPOCH (default 0) so records are byte-stable."""
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return datetime.fromtimestamp(epoch, timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def solution_to_record(sol, argv=(), node_count=None, oracle=None) -> dict:
    sol = getattr(sol, "base", sol)
    p = sol.problem
    return {
        "schema_version": SCHEMA,
        "problem": {
            "N": p.N,
            "M": p.M,
            "alpha": float(p.alpha),
            "betas": [float(b) for b in p.betas],
            "casimirs": [float(c) for c in p.casimirs],
            "symmetrized": bool(p.symmetrized),
            "parity": sol.parity,
        },
        "solution": {
            "E": float(sol.E),
            "a": [float(v) for v in sol.a],
            "branch": sol.branch,
            "node_count": node_count,
            "residual_norm": float(sol.record.residual_norm),
            "degenerate": bool(sol.degenerate),
        },
        "oracle": oracle,
        "provenance": {"command": list(argv), "timestamp": timestamp()},
    }


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, allow_nan=False)


def record_to_solution(rec: dict) -> QesSolution:
    try:
        if rec.get("schema_version") != SCHEMA:
            raise RecordError(f"unsupported schema {rec.get('schema_version')!r}")
        p, s = rec["problem"], rec["solution"]
        problem = QesProblem(int(p["N"]), int(p["M"]), float(p["alpha"]), tuple(p["betas"]),
                             bool(p["symmetrized"]))
        record = ConstraintRecord(tuple(f"beta{k}" for k in range(1, problem.N + 1)), ("E",),
                                  float(s.get("residual_norm", float("nan"))))
        return QesSolution(problem, float(s["E"]), tuple(float(v) for v in s["a"]), str(s["branch"]),
                           record, p.get("parity"), bool(s.get("degenerate", False)))
    except (KeyError, TypeError) as exc:
        raise RecordError(f"malformed record: {exc!r}") from exc


def read_records(path) -> list[dict]:
    """All records of a JSON-lines file (blank lines skipped)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh if ln.strip()]
    except OSError as exc:
        raise RecordError(f"cannot read {path}: {exc}") from exc
    try:
        recs = [json.loads(ln) for ln in lines]
    except json.JSONDecodeError as exc:
        raise RecordError(f"{path}: invalid JSON ({exc})") from exc
    if not recs:
        raise RecordError(f"{path}: no records")
    for r in recs:
        if not isinstance(r, dict):
            raise RecordError(f"{path}: record is not an object")
    return recs
