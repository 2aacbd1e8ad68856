"""Command-line front end: ``run``, ``sweep``, ``verify`` and ``bound``.

Exit codes: 0 success, 1 verification failure, 2 bad arguments or
geometry, 3 statevector cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__, analysis, core, statevector

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_CAP = 3

CSV_COLUMNS = ("j1", "j2", "queries", "probability")


class UsageError(Exception):
    pass


def parse_range(text: str) -> range:
    """Parse an inclusive ``lo:hi`` range."""
    try:
        lo, hi = (int(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    return range(lo, hi + 1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, required=True, help="number of items N")
    common.add_argument("--k", type=int, required=True, help="number of blocks K")
    common.add_argument("--target-block", type=int, default=0)
    common.add_argument("--target-item", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "human"), default=None)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument(
        "--seed", type=int, default=None, help="accepted for compatibility; dynamics are deterministic"
    )
    common.add_argument("--sv-cap", type=int, default=statevector.DEFAULT_CAP)

    parser = argparse.ArgumentParser(prog="partial-qsearch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="simulate one schedule")
    run.add_argument("--j1", type=int, help="global iterations (default: canonical)")
    run.add_argument("--j2", type=int, help="local iterations (default: canonical)")
    run.add_argument("--no-final", action="store_true", help="skip the final global iteration")
    run.add_argument("--engine", choices=("reduced", "statevector", "both"), default="reduced")

    sweep = sub.add_parser("sweep", parents=[common], help="grid over (j1, j2)")
    sweep.add_argument("--j1-range", type=parse_range, help="inclusive lo:hi")
    sweep.add_argument("--j2-range", type=parse_range, help="inclusive lo:hi")

    sub.add_parser("verify", parents=[common], help="check every closed-form prediction")
    sub.add_parser("bound", parents=[common], help="lower bound vs canonical query count")
    return parser


def _space(args) -> core.SearchSpace:
    if args.n < 1 or args.k < 1:
        raise UsageError("--n and --k must be positive")
    if args.n % args.k:
        raise UsageError("n_blocks must divide n_items")
    try:
        return core.SearchSpace(args.n, args.k, args.target_block, args.target_item)
    except core.InvalidGeometry as exc:
        raise UsageError(str(exc)) from None


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _json(command: str, data) -> str:
    doc = {"program": "partial-qsearch", "version": __version__, "command": command, "data": data}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _g12(x: float) -> str:
    return format(x, ".12g")


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


# -- subcommands ----------------------------------------------------------------

def _schedule(args, space) -> core.Schedule:
    if args.j1 is not None and args.j2 is not None:
        j1, j2 = args.j1, args.j2
    else:
        try:
            canon = analysis.canonical_schedule(space).schedule
        except analysis.RawNegative as exc:
            raise UsageError(f"{exc}; pass --j1 and --j2 explicitly") from None
        j1 = canon.global_iters if args.j1 is None else args.j1
        j2 = canon.local_iters if args.j2 is None else args.j2
    if j1 < 0 or j2 < 0:
        raise UsageError("--j1 and --j2 must be nonnegative")
    return core.Schedule(j1, j2, not args.no_final)


def cmd_run(args) -> tuple[int, str]:
    space = _space(args)
    schedule = _schedule(args, space)
    traces = {}
    if args.engine in ("reduced", "both"):
        traces["reduced"] = core.partial_search(space, schedule)
    max_diff = None
    if args.engine in ("statevector", "both"):
        dense = statevector.sv_run(space, schedule, args.sv_cap)
        traces["statevector"] = statevector.trace_from_dense(schedule, dense)
        if "reduced" in traces:
            max_diff = max(
                float(np.max(np.abs(statevector.expand(r) - sv.amps)))
                for r, sv in zip(traces["reduced"].states, dense)
            )

    fmt = args.format or "json"
    if fmt == "json":
        data = {name: t.to_dict() for name, t in traces.items()}
        if max_diff is not None:
            data["max_abs_diff"] = max_diff
        return EXIT_OK, _json("run", data)
    if fmt == "csv":
        rows = [["engine", "step", "phase", "amp_target", "amp_block", "amp_outside", "block_success_probability"]]
        for name, t in traces.items():
            for i, (phase, st) in enumerate(t):
                rows.append([name, i, phase, _g12(st.amp_target), _g12(st.amp_block),
                             _g12(st.amp_outside), _g12(core.block_success_probability(st))])
        return EXIT_OK, _csv(rows)
    lines = [f"N={space.n_items} K={space.n_blocks} b={space.block_size} "
             f"schedule=({schedule.global_iters}, {schedule.local_iters}, "
             f"final={schedule.apply_final_step}) queries={schedule.query_count}"]
    for name, t in traces.items():
        f = t.final_state
        lines.append(
            f"{name:12s} t={_fmt(f.amp_target)} u={_fmt(f.amp_block)} v={_fmt(f.amp_outside)} "
            f"P(block)={_fmt(t.block_success_probability)} outside={_fmt(t.outside_mass)}"
        )
    if max_diff is not None:
        lines.append(f"max |reduced - statevector| = {max_diff:.3e}")
    return EXIT_OK, "\n".join(lines) + "\n"


def _default_window(space, width=3) -> tuple[range, range]:
    try:
        c = analysis.canonical_schedule(space).schedule
    except analysis.RawNegative:
        return range(0, 2 * width + 1), range(0, 2 * width + 1)
    return (
        range(max(0, c.global_iters - width), c.global_iters + width + 1),
        range(max(0, c.local_iters - width), c.local_iters + width + 1),
    )


def cmd_sweep(args) -> tuple[int, str]:
    space = _space(args)
    j1_default, j2_default = _default_window(space)
    j1_range = args.j1_range if args.j1_range is not None else j1_default
    j2_range = args.j2_range if args.j2_range is not None else j2_default
    if len(j1_range) == 0 or len(j2_range) == 0:
        raise UsageError("sweep ranges must be nonempty (lo <= hi)")
    if j1_range.start < 0 or j2_range.start < 0:
        raise UsageError("sweep ranges must be nonnegative")
    result = analysis.sweep_schedules(space, j1_range, j2_range)

    fmt = args.format or "csv"
    if fmt == "csv":
        rows = [list(CSV_COLUMNS)]
        rows += [[p.j1, p.j2, p.queries, _g12(p.probability)] for p in result.grid]
        return EXIT_OK, _csv(rows)
    if fmt == "json":
        return EXIT_OK, _json("sweep", result.to_dict())
    best = result.best
    rows = [[str(p.j1), str(p.j2), str(p.queries), _fmt(p.probability)] for p in result.grid]
    text = _table(list(CSV_COLUMNS), rows)
    text += f"best: j1={best.j1} j2={best.j2} queries={best.queries} P={_fmt(best.probability)}\n"
    if result.canonical_schedule is not None:
        c = result.canonical_schedule
        text += f"canonical: j1={c.global_iters} j2={c.local_iters} gap={result.canonical_gap}\n"
    return EXIT_OK, text


def cmd_verify(args) -> tuple[int, str]:
    space = _space(args)
    preds = analysis.verify_all(space)
    code = EXIT_OK if all(p.passed or p.skipped for p in preds) else EXIT_FAILED

    fmt = args.format or "human"
    if fmt == "json":
        return code, _json("verify", {"space": space.to_dict(), "predictions": [p.to_dict() for p in preds]})

    def cell(x):
        return "-" if x is None or x != x else _fmt(x)

    def status(p):
        return "SKIP" if p.skipped else ("PASS" if p.passed else "FAIL")

    if fmt == "csv":
        rows = [["label", "predicted", "simulated", "abs_error", "rel_error", "tolerance", "status"]]
        rows += [[p.label.value, *(("" if x is None or x != x else _g12(x)) for x in
                  (p.predicted, p.simulated, p.abs_error, p.rel_error, p.tolerance)), status(p)]
                 for p in preds]
        return code, _csv(rows)
    rows = [[p.label.value, cell(p.predicted), cell(p.simulated), cell(p.abs_error),
             cell(p.rel_error), cell(p.tolerance), status(p), p.note] for p in preds]
    header = ["label", "predicted", "simulated", "abs_error", "rel_error", "tolerance", "status", "note"]
    text = f"N={space.n_items} K={space.n_blocks} b={space.block_size}\n" + _table(header, rows)
    for p in preds:
        if p.label is analysis.Label.OBSERVATION_B:
            text += (f"observation b: sum={_fmt(p.simulated)} "
                     f"sum with target sign flipped={_fmt(p.detail['sum_target_flipped'])}\n")
    return code, text


def cmd_bound(args) -> tuple[int, str]:
    space = _space(args)
    bound = analysis.lower_bound(space)
    try:
        q = analysis.canonical_schedule(space).query_count
    except analysis.RawNegative:
        q = None
    data = {"space": space.to_dict(), "lower_bound": bound, "query_count": q,
            "slack": None if q is None else q - bound}
    fmt = args.format or "human"
    if fmt == "json":
        return EXIT_OK, _json("bound", data)
    if fmt == "csv":
        return EXIT_OK, _csv([["lower_bound", "query_count", "slack"],
                              [_g12(bound), "" if q is None else q,
                               "" if q is None else _g12(q - bound)]])
    text = f"lower bound: {_fmt(bound)}\n"
    if q is None:
        text += "canonical Q: n/a (global iteration count negative)\n"
    else:
        text += f"canonical Q: {q}\nslack:       {_fmt(q - bound)}\n"
    return EXIT_OK, text


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "verify": cmd_verify, "bound": cmd_bound}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except statevector.CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    with _sink(args.out) as out:
        out.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
