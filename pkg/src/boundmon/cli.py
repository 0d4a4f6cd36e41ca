"""Command-line entry point.

Exit codes: 0 safe, 2 possibly unsafe, 1 usage/format/numeric error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import casestudy
from .errors import BoundmonError
from .formats import (
    export_plot_data,
    export_plot_svg,
    parse_mbeh,
    parse_mlog,
    parse_model,
    parse_unsafe,
    write_mbeh,
    write_mlog,
)
from .geometry import IntervalBox, from_interval, interval_hull
from .loggen import GenConfig, generate
from .offline import Log, Status, Verdict, monitor_offline
from .online import OnlineConfig, monitor_online

EXIT_SAFE, EXIT_ERROR, EXIT_UNSAFE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _init_box(text: str) -> IntervalBox:
    """``lo:hi,lo:hi,...``"""
    try:
        pairs = [tuple(float(v) for v in part.split(":")) for part in text.split(",")]
        if any(len(p) != 2 for p in pairs):
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi,lo:hi,... got {text!r}")
    arr = np.array(pairs)
    return IntervalBox(arr[:, 0], arr[:, 1])


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="boundmon", description="Model-bounded safety monitoring of sampled logs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, log=False, beh=False):
        sp.add_argument("--model", required=True, type=Path)
        sp.add_argument("--unsafe", required=True, type=Path)
        if log:
            sp.add_argument("--log", required=True, type=Path)
        if beh:
            sp.add_argument("--behavior", required=True, type=Path)
        sp.add_argument("--out", type=Path, help="directory for summary, plots and logs")
        sp.add_argument("--max-generators", type=int)
        sp.add_argument("--dim", type=int, default=0, help="state index to plot")

    off = sub.add_parser("offline", help="monitor a recorded log")
    common(off, log=True)
    off.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True)

    on = sub.add_parser("online", help="monitor a behavior with triggered sampling")
    common(on, beh=True)
    on.add_argument("--noise", type=_floats, default=[0.0])
    on.add_argument("--max-skip", type=int, default=10)

    plot = sub.add_parser("plot", help="offline run that only writes plot exports")
    common(plot, log=True)
    plot.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True)

    gen = sub.add_parser("genlog", help="generate a random noisy, aperiodic log")
    gen.add_argument("--model", required=True, type=Path)
    gen.add_argument("--out", required=True, type=Path)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--probability", type=float, default=0.1)
    gen.add_argument("--length", type=int, default=100)
    gen.add_argument("--noise", type=_floats, default=[0.0])
    gen.add_argument("--init", type=_init_box, help="initial box lo:hi,... (default: model [init])")

    case = sub.add_parser("case", help="run a bundled case study")
    case.add_argument("name", choices=casestudy.CASE_NAMES)
    mode = case.add_mutually_exclusive_group(required=True)
    mode.add_argument("--offline", metavar="VARIANT", choices=["1", "2", "3", "4"])
    mode.add_argument("--online", action="store_true")
    mode.add_argument("--compare", action="store_true")
    case.add_argument("--out", required=True, type=Path)
    case.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True)
    return p


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")


def _outdir(path: Optional[Path]) -> Optional[Path]:
    if path is None:
        return None
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(out: Path, name: str, text: str) -> None:
    with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def summarize(verdict: Verdict, log: Log, label: str, dim: int) -> str:
    lines = [
        f"{label}: {verdict.status.value.lower().replace('_', '-')}",
        f"samples={len(log)} span={log.times[0]}..{log.times[-1]} "
        f"witnesses={len(verdict.witnesses)} alarms={len(verdict.alarms)}",
    ]
    for w in verdict.witnesses:
        h = interval_hull(w.reach_set)
        lines.append(
            f"witness t={w.time} refined_away={str(w.refined_away).lower()} "
            f"x{dim + 1}=[{h.lower[dim]!r}, {h.upper[dim]!r}]"
        )
    lines.append(f"STATUS={verdict.status.value}")
    return "\n".join(lines) + "\n"


def _load(args):
    sys_, meta = parse_model(_read(args.model))
    unsafe = parse_unsafe(_read(args.unsafe), meta.names)
    mg = args.max_generators if args.max_generators is not None else meta.max_generators
    return sys_, meta, unsafe, mg


def _emit(out, prefix, verdict, log, unsafe, dim, label, overlay=None):
    text = summarize(verdict, log, label, dim)
    sys.stdout.write(text)
    if out is not None:
        _write(out, f"{prefix}summary.txt", text)
        _write(out, f"{prefix}plot.csv", export_plot_data(verdict, log, unsafe, dim))
        _write(out, f"{prefix}plot.svg", export_plot_svg(verdict, log, unsafe, dim, overlay=overlay, label=label))


def _exit(*statuses: Status) -> int:
    return EXIT_UNSAFE if Status.POSSIBLY_UNSAFE in statuses else EXIT_SAFE


def cmd_offline(args) -> int:
    sys_, meta, unsafe, mg = _load(args)
    log = parse_mlog(_read(args.log))
    verdict = monitor_offline(sys_, log, unsafe, mg, args.refine)
    _emit(_outdir(args.out), "", verdict, log, unsafe, args.dim, "offline")
    return _exit(verdict.status)


def cmd_plot(args) -> int:
    if args.out is None:
        raise UsageError("plot requires --out")
    sys_, meta, unsafe, mg = _load(args)
    log = parse_mlog(_read(args.log))
    verdict = monitor_offline(sys_, log, unsafe, mg, args.refine)
    out = _outdir(args.out)
    _write(out, "plot.csv", export_plot_data(verdict, log, unsafe, args.dim))
    _write(out, "plot.svg", export_plot_svg(verdict, log, unsafe, args.dim, label="offline"))
    sys.stdout.write(f"STATUS={verdict.status.value}\n")
    return _exit(verdict.status)


def cmd_online(args) -> int:
    sys_, meta, unsafe, mg = _load(args)
    beh = parse_mbeh(_read(args.behavior))
    verdict, log = monitor_online(sys_, beh, unsafe, OnlineConfig(tuple(args.noise), args.max_skip, mg))
    out = _outdir(args.out)
    _emit(out, "", verdict, log, unsafe, args.dim, "online")
    if out is not None:
        _write(out, "synthesized.mlog", write_mlog(log))
    return _exit(verdict.status)


def cmd_genlog(args) -> int:
    sys_, meta = parse_model(_read(args.model))
    init = args.init if args.init is not None else meta.init
    if init is None:
        raise UsageError("no initial set: pass --init or add an [init] section to the model")
    cfg = GenConfig(from_interval(init), args.length, args.probability, tuple(args.noise), args.seed)
    beh, log = generate(sys_, cfg)
    out = _outdir(args.out)
    _write(out, "log.mlog", write_mlog(log))
    _write(out, "behavior.mbeh", write_mbeh(beh))
    sys.stdout.write(f"wrote {len(log)} samples over t=0..{args.length}\n")
    return EXIT_SAFE


def cmd_case(args) -> int:
    case = casestudy.load_case(args.name)
    out = _outdir(args.out)
    dim = case.plot_dim
    if args.offline:
        verdict, log = casestudy.run_offline(case, args.offline, args.refine)
        _emit(out, f"{case.name}_offline_{args.offline}_", verdict, log, case.unsafe, dim, f"offline {args.offline}")
        _write(out, f"{case.name}_offline_{args.offline}.mlog", write_mlog(log))
        return _exit(verdict.status)
    if args.online:
        verdict, log = casestudy.run_online(case)
        _emit(out, f"{case.name}_online_", verdict, log, case.unsafe, dim, "online")
        _write(out, f"{case.name}_online.mlog", write_mlog(log))
        return _exit(verdict.status)
    variant = case.config["compare"]
    off_v, off_log = casestudy.run_offline(case, variant, args.refine)
    on_v, on_log = casestudy.run_online(case)
    prefix = f"{case.name}_compare_"
    _emit(out, prefix + "offline_", off_v, off_log, case.unsafe, dim, "offline")
    _emit(out, prefix + "online_", on_v, on_log, case.unsafe, dim, "online", overlay=(off_v, off_log))
    _write(out, f"{case.name}_online.mlog", write_mlog(on_log))
    sys.stdout.write(f"samples offline={len(off_log)} online={len(on_log)}\n")
    return _exit(off_v.status, on_v.status)


COMMANDS = {
    "offline": cmd_offline,
    "online": cmd_online,
    "plot": cmd_plot,
    "genlog": cmd_genlog,
    "case": cmd_case,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, BoundmonError, IndexError, OSError) as e:
        msg = str(e).replace("\n", " ")
        sys.stderr.write(f"boundmon: error: {msg}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
