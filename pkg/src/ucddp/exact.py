"""Exact solvers: exhaustive enumeration and a depth-first branch-and-bound."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .dominance import DominanceTables
from .heuristics import local_search, multistart
from .instance_io import Instance
from .partition import evaluate_partition, pair_matrices, ratio_orders

BRUTE_FORCE_MAX_N = 24

EARLY, TARDY, FREE = 1, 0, -1


class TooLargeError(ValueError):
    pass


def brute_force(inst: Instance, max_n: int = BRUTE_FORCE_MAX_N, chunk: int = 1 << 16) -> tuple[tuple[int, ...], int]:
    """Minimum of f over all ``2^n`` vectors; ties go to the lexicographically smallest.

    Vectors are enumerated in lexicographic order (task 1 is the most
    significant bit) and evaluated in chunks through the quadratic form of f.
    """
    n = inst.n
    if n > max_n:
        raise TooLargeError(f"brute force refused: n={n} exceeds {max_n}")
    Qe, Qt, c = pair_matrices(inst)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    best_val, best_idx = None, 0
    total = 1 << n
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        D = (idx[:, None] >> shifts[None, :]) & 1
        T = 1 - D
        vals = np.einsum("ki,ij,kj->k", D, Qe, D) + np.einsum("ki,ij,kj->k", T, Qt, T) + T @ c
        k = int(np.argmin(vals))
        if best_val is None or vals[k] < best_val:
            best_val, best_idx = int(vals[k]), int(idx[k])
    delta = tuple((best_idx >> (n - 1 - j)) & 1 for j in range(n))
    return delta, best_val


@dataclass(frozen=True)
class PartialAssignment:
    """Per-task status: 1 fixed early, 0 fixed tardy, -1 free."""

    status: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (EARLY, TARDY, FREE) for s in self.status):
            raise ValueError("status entries must be 1, 0 or -1")

    @classmethod
    def free(cls, n: int) -> "PartialAssignment":
        return cls((FREE,) * n)

    def fix(self, j: int, side: int) -> "PartialAssignment":
        s = list(self.status)
        s[j] = side
        return PartialAssignment(tuple(s))


class _Bounder:
    """Pairwise decomposition of f for incremental bounding.

    ``pe[i, j]`` is the cost paid when both ``i`` and ``j`` are early and
    ``pt[i, j]`` when both are tardy; ``c[j]`` is paid when ``j`` is tardy.
    All are non-negative, so dropping free-free pairs gives a lower bound.
    """

    def __init__(self, inst: Instance):
        Qe, Qt, c = pair_matrices(inst)
        self.pe = (Qe + Qe.T).astype(np.int64)
        self.pt = (Qt + Qt.T).astype(np.int64)
        self.c = c.astype(np.int64)
        self.n = inst.n

    def root(self):
        return 0, np.zeros(self.n, dtype=np.int64), self.c.copy()

    def fix(self, fixed_cost, early_cost, tardy_cost, j, side):
        if side == EARLY:
            return fixed_cost + int(early_cost[j]), early_cost + self.pe[j], tardy_cost
        return fixed_cost + int(tardy_cost[j]), early_cost, tardy_cost + self.pt[j]


def partial_lower_bound(inst: Instance, pa: PartialAssignment) -> int:
    """Exact cost among fixed tasks plus, per free task, its cheaper side
    given the fixed tasks only."""
    if len(pa.status) != inst.n:
        raise ValueError("assignment size does not match the instance")
    b = _Bounder(inst)
    fixed, ec, tc = b.root()
    for j, s in enumerate(pa.status):
        if s != FREE:
            fixed, ec, tc = b.fix(fixed, ec, tc, j, s)
    free = np.array([s == FREE for s in pa.status])
    return fixed + int(np.minimum(ec, tc)[free].sum())


@dataclass
class SolveStats:
    nodes: int = 0
    incumbent_updates: int = 0
    ms: int = 0
    optimal: bool = False
    penalty: int = 0
    bound: int = 0

    @property
    def gap(self) -> float:
        if self.penalty == 0:
            return 0.0
        return (self.penalty - self.bound) / self.penalty

    def to_dict(self) -> dict:
        return {"nodes": self.nodes, "optimal": self.optimal, "penalty": self.penalty,
                "bound": self.bound, "gap": self.gap, "ms": self.ms}


def branch_and_bound(
    inst: Instance,
    time_limit: float | None = None,
    gap_limit: float = 0.0,
    restarts: int = 4,
    seed: int = 0,
) -> tuple[tuple[int, ...], int, SolveStats]:
    """Depth-first branch-and-bound over the early indicators.

    The incumbent starts from :func:`multistart` and is refreshed by local
    search on the greedy completion at depths that are multiples of
    ``max(1, n // 4)``. The search stops when the relative gap between the
    incumbent and the smallest open bound drops to ``gap_limit``, or when the
    time limit expires (``stats.optimal`` is then False).
    """
    if time_limit is not None and time_limit < 0:
        raise ValueError("time_limit must be non-negative")
    if not 0 <= gap_limit <= 1:
        raise ValueError("gap_limit must lie in [0, 1]")
    t0 = time.perf_counter()
    n = inst.n
    tables = DominanceTables(inst)
    orders = ratio_orders(inst)
    bounder = _Bounder(inst)
    stats = SolveStats()

    first = multistart(inst, restarts, seed, tables)
    best_delta, best = first.delta, first.penalty
    refresh_every = max(1, n // 4)

    fixed, ec, tc = bounder.root()
    status = np.full(n, FREE, dtype=np.int64)
    # Stack entries: (bound, fixed_cost, early_cost, tardy_cost, status, depth).
    root_bound = fixed + int(np.minimum(ec, tc).sum())
    stack = [(root_bound, fixed, ec, tc, status, 0)]
    is_root = True

    def open_bound() -> int:
        return min([best] + [entry[0] for entry in stack])

    def gap_reached() -> bool:
        lb = open_bound()
        return best == 0 or (best - lb) <= gap_limit * best

    timed_out = False
    while stack:
        if gap_reached():
            break
        if time_limit is not None and time.perf_counter() - t0 > time_limit:
            timed_out = True
            break
        bound, fixed, ec, tc, status, depth = stack.pop()
        if not is_root:
            stats.nodes += 1
        is_root = False
        if bound >= best:
            continue
        free = np.flatnonzero(status == FREE)
        if free.size == 0:
            delta = tuple(int(s) for s in status)
            # A leaf is only reached with bound == fixed < best.
            best, best_delta = fixed, delta
            stats.incumbent_updates += 1
            continue

        if depth % refresh_every == 0:
            greedy = np.where(status == FREE, (ec <= tc).astype(np.int64), status)
            res = local_search(inst, greedy.tolist(), tables, orders=orders)
            if res.penalty < best:
                best, best_delta = res.penalty, res.delta
                stats.incumbent_updates += 1
                if bound >= best:
                    continue

        diff = np.abs(ec[free] - tc[free])
        j = int(free[int(np.argmax(diff))])
        children = []
        for side in (EARLY, TARDY):
            f2, ec2, tc2 = bounder.fix(fixed, ec, tc, j, side)
            st2 = status.copy()
            st2[j] = side
            rest = st2 == FREE
            b2 = f2 + int(np.minimum(ec2, tc2)[rest].sum())
            children.append((b2, f2, ec2, tc2, st2, depth + 1))
        early_first = ec[j] <= tc[j]
        # The child popped first is pushed last.
        order = [children[1], children[0]] if early_first else [children[0], children[1]]
        for child in order:
            if child[0] < best:
                stack.append(child)

    stats.penalty = best
    stats.bound = open_bound() if (stack or timed_out) else best
    stats.optimal = not timed_out and stats.bound == best
    stats.ms = int((time.perf_counter() - t0) * 1000)
    assert evaluate_partition(inst, best_delta, orders) == best
    return best_delta, best, stats
