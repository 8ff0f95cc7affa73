"""``vrusim`` command line: run, sweep and list scenarios.

Exit status encodes the outcome of ``run``: 0 Completed, 2 Collision,
3 Timeout. Any input, parse or I/O problem exits with 1.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .engine import Outcome, SimResult, run
from .errors import VrusimError
from .metrics import Scores, score
from .output import sweep_row, write_events, write_scores, write_sweep, write_trace
from .render import render_frame
from .scenario import BUILTIN_NAMES, ScenarioSpec, builtin_scenario, load_scenario_file
from .sweep import parse_range, sweep

EXIT_CODES = {Outcome.COMPLETED: 0, Outcome.COLLISION: 2, Outcome.TIMEOUT: 3}
EXIT_ERROR = 1


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which would read as Collision
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


class CliError(Exception):
    pass


def resolve_scenario(ref: str, v2x: Optional[bool]) -> ScenarioSpec:
    """Built-in name or path to a scenario file, with an optional V2X override."""
    if ref in BUILTIN_NAMES:
        spec = builtin_scenario(ref)
    else:
        path = Path(ref)
        try:
            spec = load_scenario_file(path)
        except OSError as exc:
            raise CliError(f"cannot read scenario {ref!r}: {exc.strerror or exc}") from None
    return spec if v2x is None else spec.with_v2x(v2x)


def parse_frame_times(text: Optional[str], t_max: float) -> list[float]:
    if not text:
        return []
    out = []
    for tok in text.split(","):
        try:
            t = float(tok)
        except ValueError:
            raise CliError(f"frame time {tok!r} is not a number") from None
        if not 0.0 <= t <= t_max:
            raise CliError(f"frame time {t:g} outside [0, {t_max:g}]")
        out.append(t)
    return out


def _prepare_out(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {str(path)!r}: {exc.strerror or exc}") from None
    return path


def summary_line(spec: ScenarioSpec, result: SimResult, scores: Scores) -> str:
    v2x = "on" if spec.v2x.enabled else "off"
    if result.outcome is Outcome.COLLISION:
        when = f" at t={result.collision_time:.2f} s"
    elif result.outcome is Outcome.COMPLETED:
        when = f" in {result.trip_time:.2f} s"
    else:
        when = ""
    ttc = "none" if result.min_ttc is None else f"{result.min_ttc:.3f} s"
    return (
        f"{spec.name} v2x={v2x}: {result.outcome.value}{when}, min_ttc={ttc}, "
        f"safety={scores.safety:.3f} efficiency={scores.efficiency:.3f} comfort={scores.comfort:.3f}"
    )


def cmd_run(args) -> int:
    spec = resolve_scenario(args.scenario_ref, args.v2x)
    frames = parse_frame_times(args.frames, spec.t_max)
    out = _prepare_out(Path(args.out))
    result = run(spec)
    scores = score(result, spec)
    try:
        write_trace(out / "trace.csv", result)
        write_events(out / "events.jsonl", result)
        write_scores(out / "scores.json", result, scores)
        last = len(result.trace) - 1
        for t in frames:
            k = min(int(round(t / spec.dt)), last)
            (out / f"frame_{t:.2f}.svg").write_text(render_frame(spec, result.trace[k]), encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write outputs to {str(out)!r}: {exc.strerror or exc}") from None
    print(summary_line(spec, result, scores))
    return EXIT_CODES[result.outcome]


def cmd_sweep(args) -> int:
    spec = resolve_scenario(args.scenario_ref, args.v2x)
    try:
        values = parse_range(args.range)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    out = _prepare_out(Path(args.out))
    rows = sweep(spec, args.param, values, jobs=args.jobs)
    try:
        write_sweep(out / "sweep.csv", [sweep_row(v, r, s) for v, r, s in rows])
    except OSError as exc:
        raise CliError(f"cannot write sweep table: {exc.strerror or exc}") from None
    for v, r, s in rows:
        print(f"{args.param}={v:g}: {r.outcome.value} safety={s.safety:.3f} efficiency={s.efficiency:.3f} comfort={s.comfort:.3f}")
    print(f"{len(rows)} runs written to {out / 'sweep.csv'}")
    return 0


def list_lines() -> list[str]:
    lines = []
    for name in BUILTIN_NAMES:
        spec = builtin_scenario(name)
        vrus = ", ".join(f"{v.vru_class.kind.value}" for v in spec.vrus)
        speeds = ", ".join(f"{v.target_speed:.1f}" for v in spec.vrus)
        lines.append(f"{name}: ego v={spec.ego.cruise_speed:.1f} m/s, vru v={speeds} m/s ({vrus})")
    return lines


def cmd_list(args) -> int:
    del args
    print("\n".join(list_lines()))
    return 0


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vrusim", description="Deterministic VRU safety-test micro-simulator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scenario_args(sp):
        sp.add_argument("scenario", nargs="?", help="built-in name or scenario file")
        sp.add_argument("--scenario", dest="scenario_opt", metavar="NAME_OR_FILE", help="same as the positional")
        sp.add_argument("--v2x", type=_on_off, default=None, metavar="on|off", help="override the V2X switch")
        sp.add_argument("--out", default=".", help="output directory (default: current)")

    r = sub.add_parser("run", help="simulate one scenario and write trace, events, scores and frames")
    scenario_args(r)
    r.add_argument("--frames", metavar="T1,T2,...", help="snapshot times in seconds, written as SVG")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run a scenario once per value of one numeric parameter")
    scenario_args(s)
    s.add_argument("--param", required=True, help="dotted field path, e.g. v2x.comm_range")
    s.add_argument("--range", required=True, metavar="START:STOP:STEP", help="inclusive value range")
    s.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    s.set_defaults(func=cmd_sweep)

    ls = sub.add_parser("list", help="show the built-in scenarios")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("run", "sweep"):
        if args.scenario and args.scenario_opt and args.scenario != args.scenario_opt:
            parser.error("scenario given twice with different values")
        args.scenario_ref = args.scenario or args.scenario_opt
        if not args.scenario_ref:
            parser.error("a scenario name or file is required")
    try:
        return args.func(args)
    except (CliError, VrusimError) as exc:
        print(f"vrusim: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
