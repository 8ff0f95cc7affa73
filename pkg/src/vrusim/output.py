"""File writers for traces, events, scores and sweep tables."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .engine import SimResult
from .metrics import Scores

TRACE_COLUMNS = ("t", "ego_x", "ego_y", "ego_heading", "ego_speed", "accel_cmd", "mode")
SWEEP_COLUMNS = ("value", "outcome", "trip_time", "min_ttc", "safety", "efficiency", "comfort")


def _num(x: Optional[float]) -> str:
    # repr is the shortest string that round-trips, so output is exact and stable
    return "" if x is None else repr(float(x))


def trace_header(n_vrus: int) -> list[str]:
    cols = list(TRACE_COLUMNS)
    for i in range(n_vrus):
        cols += [f"vru{i}_x", f"vru{i}_y", f"vru{i}_vx", f"vru{i}_vy"]
    return cols + ["ttc"]


def trace_rows(result: SimResult) -> Iterable[list[str]]:
    for r in result.trace:
        e = r.ego
        row = [_num(r.t), _num(e.position.x), _num(e.position.y), _num(e.heading), _num(e.speed), _num(r.accel_cmd)]
        row.append(r.planner_mode.value)
        for v in r.vrus:
            row += [_num(v.position.x), _num(v.position.y), _num(v.velocity.x), _num(v.velocity.y)]
        row.append(_num(r.ttc))
        yield row


def write_trace(path: Path, result: SimResult) -> None:
    n_vrus = len(result.trace[0].vrus) if result.trace else 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace_header(n_vrus))
        w.writerows(trace_rows(result))


def write_events(path: Path, result: SimResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in result.events:
            fh.write(json.dumps({"t": e.t, "kind": e.kind.value, "detail": e.detail}) + "\n")


def scores_document(result: SimResult, scores: Scores) -> dict:
    return {
        **scores.as_dict(),
        "outcome": result.outcome.value,
        "trip_time": result.trip_time,
        "min_ttc": result.min_ttc,
    }


def write_scores(path: Path, result: SimResult, scores: Scores) -> None:
    path.write_text(json.dumps(scores_document(result, scores), indent=2) + "\n", encoding="utf-8")


def sweep_row(value: float, result: SimResult, scores: Scores) -> list[str]:
    return [
        _num(value),
        result.outcome.value,
        _num(result.trip_time),
        _num(result.min_ttc),
        _num(scores.safety),
        _num(scores.efficiency),
        _num(scores.comfort),
    ]


def write_sweep(path: Path, rows: Sequence[Sequence[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        w.writerows(rows)
