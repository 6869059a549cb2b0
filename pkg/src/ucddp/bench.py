"""Benchmark table: bounds and gaps per (instance, method)."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .exact import BRUTE_FORCE_MAX_N, brute_force, branch_and_bound
from .heuristics import half_round_start, local_search, multistart
from .instance_io import Instance

METHODS = ("brute", "bnb", "heur", "half-round+ls")
COLUMNS = ("label", "n", "method", "lb", "ub", "lgap", "ugap", "nodes", "ms")


@dataclass
class BenchRow:
    label: str
    n: int
    method: str
    lb: float | None = None
    ub: float | None = None
    lgap: float | None = None
    ugap: float | None = None
    nodes: float | None = None
    ms: float | None = None
    starred: bool = False
    optimal: bool = False

    def as_csv(self) -> list[str]:
        star = "*" if self.starred else ""
        return [
            self.label,
            str(self.n),
            self.method,
            _fmt(self.lb),
            _fmt(self.ub),
            "" if self.lgap is None else f"{100 * self.lgap:.2f}%{star}",
            "" if self.ugap is None else f"{100 * self.ugap:.2f}%{star}",
            _fmt(self.nodes),
            _fmt(self.ms),
        ]


def _fmt(x) -> str:
    if x is None:
        return ""
    if float(x).is_integer():
        return str(int(x))
    return f"{x:.2f}"


def _run(inst: Instance, method: str, time_limit, seed: int, restarts: int) -> BenchRow:
    row = BenchRow("", inst.n, method)
    t0 = time.perf_counter()
    if method == "brute":
        if inst.n > BRUTE_FORCE_MAX_N:
            return row
        _, val = brute_force(inst)
        row.lb = row.ub = val
        row.nodes = 0
        row.optimal = True
    elif method == "bnb":
        _, val, stats = branch_and_bound(inst, time_limit, 0.0, restarts, seed)
        row.lb, row.ub, row.nodes, row.optimal = stats.bound, val, stats.nodes, stats.optimal
    elif method == "heur":
        row.ub = multistart(inst, restarts, seed).penalty
    elif method == "half-round+ls":
        row.ub = local_search(inst, half_round_start(inst), start_label="half-round").penalty
    else:
        raise ValueError(f"unknown method {method!r}")
    row.ms = int((time.perf_counter() - t0) * 1000)
    return row


def bench_rows(
    instances: Iterable[tuple[str, Instance | Exception]],
    methods: Sequence[str],
    time_limit: float | None = None,
    seed: int = 0,
    restarts: int = 4,
) -> list[BenchRow]:
    """Rows per (instance, method), then one average row per (n, method).

    Gaps use the optimum when a method proved it, otherwise the best upper
    bound found (those gaps are starred). Averages cover rows that produced
    a value; refused or failed rows are left blank.
    """
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    rows: list[BenchRow] = []
    for label, inst in instances:
        if isinstance(inst, Exception):
            rows += [BenchRow(label, 0, m) for m in methods]
            continue
        group = []
        for m in methods:
            row = _run(inst, m, time_limit, seed, restarts)
            row.label = label
            group.append(row)
        exact = [r.ub for r in group if r.optimal]
        uppers = [r.ub for r in group if r.ub is not None]
        ref, starred = (exact[0], False) if exact else (min(uppers) if uppers else None, True)
        for r in group:
            if ref is None:
                continue
            r.starred = starred
            if r.lb is not None:
                r.lgap = (ref - r.lb) / ref if ref else 0.0
            if r.ub is not None:
                r.ugap = (r.ub - ref) / ref if ref else 0.0
        rows += group

    averages = []
    for n in sorted({r.n for r in rows if r.ub is not None}):
        for m in methods:
            done = [r for r in rows if r.n == n and r.method == m and r.ub is not None]
            if not done:
                continue
            avg = BenchRow("avg", n, m, starred=any(r.starred for r in done))
            for attr in ("lb", "ub", "lgap", "ugap", "nodes", "ms"):
                vals = [getattr(r, attr) for r in done if getattr(r, attr) is not None]
                setattr(avg, attr, sum(vals) / len(vals) if vals else None)
            averages.append(avg)
    return rows + averages


def bench_report(
    instances: Iterable[tuple[str, Instance | Exception]],
    methods: Sequence[str],
    **kwargs,
) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in bench_rows(instances, methods, **kwargs):
        writer.writerow(row.as_csv())
    return buf.getvalue()
