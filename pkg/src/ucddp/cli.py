"""Command-line entry point: ``ucddp <command> ...``.

Exit codes: 0 success, 2 input error, 3 solve stopped by a limit before
proving optimality.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

from .bench import METHODS, bench_report
from .dominance import check_dominance
from .exact import TooLargeError, brute_force, branch_and_bound
from .heuristics import half_round_start, local_search, multistart
from .instance_io import (
    InstanceError,
    ParseError,
    generate_random,
    parse_native,
    parse_orlib,
    parse_orlib_all,
    serialize_native,
)
from .mip import VARIANTS, build_model, emit_lp
from .partition import solution_dict

log = logging.getLogger("ucddp")

EXIT_INPUT = 2
EXIT_LIMIT = 3


class InputError(Exception):
    pass


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load(args):
    text = _read_text(args.instance)
    if args.orlib_n is not None:
        return parse_orlib(text, args.orlib_n, args.index)
    return parse_native(text)


def _parse_delta(text: str, n: int) -> tuple[int, ...]:
    parts = [t for t in text.replace(",", " ").split() if t]
    if len(parts) != n or any(t not in ("0", "1") for t in parts):
        raise InputError(f"--delta must list {n} values in {{0,1}}")
    return tuple(int(t) for t in parts)


def _emit(obj: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(obj))
        return
    flat = {k: " ".join(map(str, v)) if isinstance(v, list) else v for k, v in obj.items()}
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
    writer.writeheader()
    writer.writerow(flat)
    sys.stdout.write(buf.getvalue())


def cmd_gen(args) -> int:
    inst = generate_random(args.n, args.seed, tuple(args.p_range), tuple(args.a_range), tuple(args.b_range))
    sys.stdout.write(serialize_native(inst))
    return 0


def cmd_eval(args) -> int:
    inst = _load(args)
    _emit(solution_dict(inst, _parse_delta(args.delta, inst.n)), args.format)
    return 0


def cmd_heur(args) -> int:
    inst = _load(args)
    t0 = time.perf_counter()
    if args.start == "multistart":
        res = multistart(inst, args.restarts, args.seed)
    elif args.start == "half-round":
        res = local_search(inst, half_round_start(inst), start_label="half-round")
    elif args.start == "all-early":
        res = local_search(inst, (1,) * inst.n, start_label="all-early")
    else:
        res = local_search(inst, _parse_delta(args.delta, inst.n), start_label="input")
    out = res.to_dict()
    out["ms"] = int((time.perf_counter() - t0) * 1000)
    _emit(out, args.format)
    return 0


def cmd_solve(args) -> int:
    inst = _load(args)
    t0 = time.perf_counter()
    if args.brute_force:
        delta, val = brute_force(inst)
        stats = {"nodes": 0, "optimal": True, "penalty": val, "bound": val, "gap": 0.0,
                 "ms": int((time.perf_counter() - t0) * 1000)}
    else:
        delta, val, st = branch_and_bound(inst, args.time_limit, args.gap_limit, args.restarts, args.seed)
        stats = st.to_dict()
    log.info("n=%d penalty=%d bound=%d nodes=%d ms=%d", inst.n, val, stats["bound"], stats["nodes"], stats["ms"])
    out = solution_dict(inst, delta)
    if args.format == "json":
        out["stats"] = stats
        _emit(out, "json")
    else:
        _emit({**out, **{k: v for k, v in stats.items() if k != "penalty"}}, "csv")
    return 0 if stats["optimal"] else EXIT_LIMIT


def cmd_check(args) -> int:
    inst = _load(args)
    report = check_dominance(inst, _parse_delta(args.delta, inst.n))
    if args.format == "json":
        print(json.dumps(report.to_json()))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["kind", "u", "v", "violation"])
        for v in report.to_json():
            writer.writerow([v["kind"], v["u"], "" if v["v"] is None else v["v"], v["violation"]])
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_export(args) -> int:
    inst = _load(args)
    title = Path(args.instance).stem if args.instance != "-" else "stdin"
    if args.orlib_n is not None:
        title += f"-{args.index}"
    text = emit_lp(build_model(inst, args.variant), title)
    if args.output_dir:
        out = Path(args.output_dir) / f"{title}_{args.variant}.lp"
        out.write_text(text, encoding="utf-8")
        print(str(out))
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise InputError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    instances = []
    for path in args.instances:
        stem = Path(path).stem
        try:
            text = Path(path).read_text(encoding="utf-8")
            if args.orlib_n is not None:
                for k, inst in enumerate(parse_orlib_all(text, args.orlib_n), start=1):
                    instances.append((f"{stem}-{k}", inst))
            else:
                instances.append((stem, parse_native(text)))
        except (OSError, ValueError) as exc:
            print(f"ucddp: {path}: {exc}", file=sys.stderr)
            instances.append((stem, exc))
    log.info("benchmarking %d instance(s) with %s", len(instances), ",".join(methods))
    sys.stdout.write(bench_report(instances, methods, time_limit=args.time_limit,
                                  seed=args.seed, restarts=args.restarts))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ucddp", description="Common due date scheduling toolkit.")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_instance(p):
        p.add_argument("instance", help="instance file ('-' for stdin)")
        p.add_argument("--orlib-n", type=int, help="read an OR-Library file with this task count")
        p.add_argument("--index", type=int, default=1, help="1-based instance index in an OR-Library file")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        return p

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p-range", type=int, nargs=2, default=(1, 20), metavar=("LO", "HI"))
    p.add_argument("--a-range", type=int, nargs=2, default=(1, 10), metavar=("LO", "HI"))
    p.add_argument("--b-range", type=int, nargs=2, default=(1, 10), metavar=("LO", "HI"))
    p.set_defaults(func=cmd_gen)

    p = with_instance(sub.add_parser("eval", help="penalty and schedule of a partition"))
    p.add_argument("--delta", required=True, help="early indicators, e.g. 1,0,1")
    p.set_defaults(func=cmd_eval)

    p = with_instance(sub.add_parser("heur", help="insert/swap local search"))
    p.add_argument("--start", choices=("multistart", "half-round", "all-early", "delta"), default="multistart")
    p.add_argument("--delta", help="start vector for --start delta")
    p.add_argument("--restarts", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_heur)

    p = with_instance(sub.add_parser("solve", help="exact solve"))
    how = p.add_mutually_exclusive_group()
    how.add_argument("--brute-force", action="store_true")
    how.add_argument("--bnb", action="store_true", help="branch-and-bound (default)")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--gap-limit", type=float, default=0.0)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_solve)

    p = with_instance(sub.add_parser("check", help="list violated dominance inequalities"))
    p.add_argument("--delta", required=True)
    p.set_defaults(func=cmd_check)

    p = with_instance(sub.add_parser("export-lp", help="write an LP-format model"))
    p.add_argument("--variant", choices=VARIANTS, default="f2")
    p.add_argument("--output-dir", help="write <instance>_<variant>.lp here instead of stdout")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("bench", help="CSV table of bounds and gaps")
    p.add_argument("instances", nargs="*")
    p.add_argument("--orlib-n", type=int)
    p.add_argument("--methods", default="bnb,heur,half-round+ls")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv",), default="csv")
    p.set_defaults(func=cmd_bench)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    if getattr(args, "delta", None) is None and getattr(args, "start", None) == "delta":
        print("ucddp: --start delta needs --delta", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ParseError, InstanceError, TooLargeError, ValueError) as exc:
        print(f"ucddp: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
