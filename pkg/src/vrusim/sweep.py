"""Parameter sweeps: one independent run per value of a single scenario field.

Parameters are addressed by dotted paths into the scenario file layout,
e.g. ``v2x.comm_range``, ``ego.cruise_speed``, ``vru.0.target_speed`` or
``sim.dt``, and take values in file units (angles in degrees).
"""

from __future__ import annotations

import copy
import os
from concurrent.futures import ProcessPoolExecutor
from decimal import Decimal, InvalidOperation
from typing import Sequence

from .engine import SimResult, run
from .errors import UnknownParamPath
from .metrics import Scores, score
from .scenario import ScenarioSpec, from_document, to_document


def parse_range(text: str) -> list[float]:
    """Inclusive ``start:stop:step`` range. ``start > stop`` gives no values.

    Values are generated in decimal arithmetic so ``0:1:0.1`` yields exactly
    the eleven decimal literals one would type.
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range {text!r} must look like start:stop:step")
    try:
        start, stop, step = (Decimal(p.strip()) for p in parts)
    except InvalidOperation:
        raise ValueError(f"range {text!r} contains a non-numeric token") from None
    if not all(d.is_finite() for d in (start, stop, step)):
        raise ValueError(f"range {text!r} must be finite")
    if step <= 0:
        raise ValueError(f"range step must be positive, got {step}")
    out = []
    v = start
    while v <= stop:
        out.append(float(v))
        v += step
    return out


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def with_param(spec: ScenarioSpec, path: str, value: float) -> ScenarioSpec:
    """Copy of ``spec`` with the numeric field at ``path`` set to ``value``."""
    doc = copy.deepcopy(to_document(spec))
    keys = path.split(".")
    node = doc
    for depth, key in enumerate(keys):
        last = depth == len(keys) - 1
        if isinstance(node, list):
            if not key.isdigit() or int(key) >= len(node):
                raise UnknownParamPath(path, f"no element {key!r}")
            key = int(key)
        elif not isinstance(node, dict) or key not in node:
            raise UnknownParamPath(path, f"no field {key!r}")
        if last:
            if not _is_number(node[key]):
                raise UnknownParamPath(path)
            node[key] = value
        else:
            node = node[key]
    return from_document(doc)


def _run_and_score(spec: ScenarioSpec) -> tuple[SimResult, Scores]:
    result = run(spec)
    return result, score(result, spec)


def _summary(spec: ScenarioSpec) -> tuple[SimResult, Scores]:
    result, scores = _run_and_score(spec)
    # traces stay in the worker; only the summary row crosses the process boundary
    return SimResult(result.outcome, [], result.events, result.trip_time, result.min_ttc), scores


def sweep(
    spec: ScenarioSpec, path: str, values: Sequence[float], jobs: int | None = None
) -> list[tuple[float, SimResult, Scores]]:
    """Run every value, concurrently when ``jobs`` > 1; results keep value order.

    Every variant is built before any run starts, so a bad path or an
    invalid value fails fast.
    """
    specs = [with_param(spec, path, v) for v in values]
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(specs) <= 1:
        results = [_summary(s) for s in specs]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(specs))) as pool:
            results = list(pool.map(_summary, specs))
    return [(v, r, s) for v, (r, s) in zip(values, results)]
