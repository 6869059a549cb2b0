"""Acceptance suite.

Each test checks one criterion at its stated tolerance and prints a single
PASS/FAIL line to the terminal (visible without ``-s``). Run alone with
``pytest -m acceptance``.
"""

import itertools
import time

import numpy as np
import pytest

from oracles import partition_cost
from ucddp.dominance import (
    INSERT_EARLY,
    INSERT_TARDY,
    SWAP,
    DominanceTables,
    check_dominance,
)
from ucddp.exact import branch_and_bound, brute_force
from ucddp.heuristics import half_round_start, local_search
from ucddp.instance_io import generate_random
from ucddp.mip import build_model, emit_lp, point_from_delta, read_lp
from ucddp.partition import (
    build_canonical_schedule,
    encode,
    evaluate_partition,
    g_value,
    schedule_penalty,
)

pytestmark = pytest.mark.acceptance

TIE_RANGES = ((1, 9), (1, 6), (1, 6))
# Stand-ins for the OR-Library sets: same value ranges as those files.
ORLIB_RANGES = ((1, 20), (1, 10), (1, 15))


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[acceptance {number}] {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())
    return emit


def identity_corpus():
    """20 instances with n <= 10; narrow ranges give many ratio ties."""
    return [generate_random(n, 500 + k, *TIE_RANGES) for k, n in enumerate(list(range(1, 11)) * 2)]


def all_deltas(n):
    idx = np.arange(1 << n)
    return (idx[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1


def oracle_costs(inst):
    """f for every binary vector, indexed like :func:`all_deltas`."""
    return np.array([partition_cost(inst.p, inst.alpha, inst.beta, inst.d, d)
                     for d in itertools.product((0, 1), repeat=inst.n)], dtype=object)


def test_oracle_equivalence(report):
    worst, bad = 0.0, []
    for k in range(50):
        n = 8 + k % 7
        inst = generate_random(n, 10_000 + k)
        t0 = time.perf_counter()
        delta, val, stats = branch_and_bound(inst)
        elapsed = time.perf_counter() - t0
        worst = max(worst, elapsed)
        if val != brute_force(inst)[1] or not stats.optimal or elapsed >= 5:
            bad.append(k)
    ok = not bad
    report(1, "branch-and-bound = brute force on 50 instances, n 8..14",
           ok, f"mismatches={bad} slowest={worst:.3f}s")
    assert ok


def test_delta_identities(report):
    t0 = time.perf_counter()
    mismatches = checked = 0
    for inst in identity_corpus():
        n = inst.n
        F = oracle_costs(inst)
        D = all_deltas(n)
        idx = np.arange(1 << n)
        t = DominanceTables(inst)
        ins = t.insert_const[None, :] + D @ t.insert_coef.T
        for u in range(n):
            bit = 1 << (n - 1 - u)
            diff = F[idx ^ bit] - F
            sign = np.where(D[:, u] == 1, 1, -1)
            mismatches += int(np.sum(diff != sign * ins[:, u]))
            checked += len(idx)
            const, coef = t.swap_row(u)
            sw = const[None, :] + D @ coef.T
            for v in range(n):
                if v == u:
                    continue
                rows = (D[:, u] == 1) & (D[:, v] == 0)
                moved = idx[rows] ^ bit ^ (1 << (n - 1 - v))
                mismatches += int(np.sum(F[moved] - F[rows] != sw[rows, v]))
                checked += int(rows.sum())
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 30
    report(2, "insert/swap variation identities, exhaustive on 20 instances",
           ok, f"checked={checked} mismatches={mismatches} time={elapsed:.2f}s")
    assert ok


def test_big_m_validity(report):
    violations = checked = 0
    for inst in identity_corpus():
        n = inst.n
        D = all_deltas(n)
        t = DominanceTables(inst)
        ins = t.insert_const[None, :] + D @ t.insert_coef.T
        violations += int(np.sum(ins < -t.M[None, :]))
        violations += int(np.sum(-ins < -t.M_prime[None, :]))
        mt = t.big_m_swap_matrix()
        for u in range(n):
            const, coef = t.swap_row(u)
            sw = const[None, :] + D @ coef.T
            others = np.arange(n) != u
            violations += int(np.sum(sw[:, others] < -mt[u, others][None, :]))
        checked += (1 << n) * (2 * n + n * (n - 1))
    ok = violations == 0
    report(3, "big-M lower bounds hold, exhaustive on 20 instances",
           ok, f"checked={checked} violations={violations}")
    assert ok


def test_inequalities_match_improving_moves(report):
    discrepancies = checked = 0
    for inst in identity_corpus():
        n = inst.n
        F = oracle_costs(inst)
        t = DominanceTables(inst)
        for k, delta in enumerate(itertools.product((0, 1), repeat=n)):
            got = {(v.kind, v.u, v.v) for v in check_dominance(inst, delta, t).violations}
            want = set()
            for u in range(n):
                bit = 1 << (n - 1 - u)
                if F[k ^ bit] < F[k]:
                    want.add((INSERT_EARLY if delta[u] else INSERT_TARDY, u, None))
                if not delta[u]:
                    continue
                for v in range(n):
                    if not delta[v] and F[k ^ bit ^ (1 << (n - 1 - v))] < F[k]:
                        want.add((SWAP, u, v))
            discrepancies += len(got ^ want)
            checked += 2 * n + n * (n - 1)
    ok = discrepancies == 0
    report(4, "inequality satisfaction = no improving insert/swap, exhaustive",
           ok, f"checked={checked} discrepancies={discrepancies}")
    assert ok


def test_local_search_contract(report):
    rng = np.random.default_rng(2024)
    failures = 0
    for k in range(200):
        n = int(rng.integers(1, 31))
        inst = generate_random(n, 20_000 + k)
        start = tuple(rng.integers(0, 2, size=n).tolist())
        res = local_search(inst, start, record=True)
        clean = not check_dominance(inst, res.delta)
        monotone = all(a >= b for a, b in zip(res.trace, res.trace[1:]))
        fixed = local_search(inst, res.delta).delta == res.delta
        if not (clean and monotone and fixed and res.trace[-1] == res.penalty):
            failures += 1
    ok = failures == 0
    report(5, "local search ends clean, monotone and at a fixed point (200 runs, n<=30)",
           ok, f"failures={failures}")
    assert ok


def test_objective_forms_agree(report):
    discrepancies = checked = 0
    for inst in identity_corpus():
        for delta in itertools.product((0, 1), repeat=inst.n):
            f = evaluate_partition(inst, delta)
            g = g_value(inst, encode(delta))
            s = schedule_penalty(inst, build_canonical_schedule(inst, delta).completion)
            discrepancies += int(not f == g == s)
            checked += 1
    ok = discrepancies == 0
    report(6, "f = g = schedule penalty, exhaustive on 20 instances",
           ok, f"checked={checked} discrepancies={discrepancies}")
    assert ok


@pytest.mark.parametrize("n", [10, 20])
def test_half_round_gap(n, report):
    worst_gap, worst_time = 0.0, 0.0
    for k in range(10):
        inst = generate_random(n, 1000 * n + k + 1, *ORLIB_RANGES)
        t0 = time.perf_counter()
        res = local_search(inst, half_round_start(inst), start_label="half-round")
        worst_time = max(worst_time, time.perf_counter() - t0)
        _, opt, stats = branch_and_bound(inst)
        assert stats.optimal
        worst_gap = max(worst_gap, (res.penalty - opt) / opt)
    ok = worst_gap <= 0.01 and worst_time < 1
    report(7, f"half-round + local search U-gap <= 1% at n={n} (10 seeded stand-ins)",
           ok, f"max U-gap={100 * worst_gap:.2f}% slowest={worst_time:.4f}s")
    assert ok


def _row_matrix(model, names):
    """Rows as integer arrays scaled by 2 so half coefficients stay exact."""
    col = {name: k for k, name in enumerate(names)}
    A = np.zeros((len(model.constraints), len(names)), dtype=object)
    rhs = np.zeros(len(model.constraints), dtype=object)
    sense = np.array([row.sense for row in model.constraints])
    for r, row in enumerate(model.constraints):
        for name, c in row.coefs.items():
            A[r, col[name]] = int(2 * c)
        rhs[r] = int(2 * row.rhs)
    return A, rhs, sense


def test_model_export(report):
    problems = []
    for inst in identity_corpus():
        n = inst.n
        F = oracle_costs(inst)
        deltas = list(itertools.product((0, 1), repeat=n))
        models = {}
        for variant in ("f2", "fis"):
            text = emit_lp(build_model(inst, variant), "acc")
            if emit_lp(build_model(inst, variant), "acc") != text:
                problems.append(("nondeterministic", variant, n))
            back = read_lp(text)
            if back != build_model(inst, variant) or emit_lp(back, "acc") != text:
                problems.append(("round trip", variant, n))
            models[variant] = back
        names = models["f2"].binaries + models["f2"].continuous
        P = np.array([[point_from_delta(d)[name] for name in names] for d in deltas], dtype=object)
        for variant, model in models.items():
            A, rhs, sense = _row_matrix(model, names)
            lhs = P @ A.T
            ok_rows = np.where(sense == ">=", lhs >= rhs, np.where(sense == "<=", lhs <= rhs, lhs == rhs))
            feasible = ok_rows.all(axis=1)
            if variant == "f2":
                obj = np.array([int(2 * model.objective.get(name, 0)) for name in names], dtype=object)
                values = (P @ obj + int(2 * model.objective_constant)) / 2
                if not feasible.all() or any(values != F):
                    problems.append(("f2", n))
            else:
                tables = DominanceTables(inst)
                clean = np.array([not check_dominance(inst, d, tables) for d in deltas])
                if (feasible != clean).any():
                    problems.append(("fis feasibility", n))
                best, _ = brute_force(inst)
                if not feasible[deltas.index(best)]:
                    problems.append(("optimum cut", n))
    ok = not problems
    report(8, "LP export: f2 objective = f, fis feasible iff clean, optimum kept, deterministic round trip",
           ok, f"problems={problems}")
    assert ok


def test_gap_limit_mode(report):
    worst, bad = 0.0, []
    for k in range(50):
        n = 8 + k % 7
        inst = generate_random(n, 10_000 + k)
        _, val, stats = branch_and_bound(inst, gap_limit=0.05)
        opt = brute_force(inst)[1]
        worst = max(worst, stats.gap)
        if stats.gap > 0.05 or not stats.bound <= opt <= val or (val - opt) > 0.05 * val:
            bad.append(k)
    ok = not bad
    report(9, "gap_limit=0.05 certifies a gap <= 5% on 50 instances, n 8..14",
           ok, f"failures={bad} max certified gap={100 * worst:.2f}%")
    assert ok
