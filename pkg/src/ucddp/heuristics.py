"""Rounding, insert/swap improvement, and a seeded multi-start driver."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dominance import DominanceTables
from .instance_io import Instance
from .partition import RatioOrders, evaluate_partition, ratio_orders


@dataclass(frozen=True)
class HeuristicResult:
    delta: tuple[int, ...]
    penalty: int
    iterations: int
    start_label: str
    trace: tuple[int, ...] = field(default=(), compare=False)

    def to_dict(self) -> dict:
        return {"delta": list(self.delta), "penalty": self.penalty,
                "iterations": self.iterations, "start_label": self.start_label}


def round_fractional(inst: Instance, delta_tilde: Sequence[float]) -> tuple[int, ...]:
    """Round a point of ``[0, 1]^n``; exact halves go tardy iff ``alpha_j < beta_j``."""
    if len(delta_tilde) != inst.n:
        raise ValueError("one value per task is required")
    half = Fraction(1, 2)
    out = []
    for j, x in enumerate(delta_tilde):
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise ValueError(f"fractional value {float(x)} outside [0, 1]")
        tardy = x < half or (x == half and inst.alpha[j] < inst.beta[j])
        out.append(0 if tardy else 1)
    return tuple(out)


def half_round_start(inst: Instance) -> tuple[int, ...]:
    return round_fractional(inst, [Fraction(1, 2)] * inst.n)


def local_search(
    inst: Instance,
    delta: Sequence[int],
    tables: DominanceTables | None = None,
    start_label: str = "input",
    record: bool = False,
    orders: RatioOrders | None = None,
) -> HeuristicResult:
    """Apply improving insert and swap moves until none is left.

    Passes scan ``u`` in index order: an early ``u`` with a negative insert
    variation goes tardy, a tardy one with a positive variation goes early,
    then the first tardy ``v`` whose swap with an early ``u`` has a negative
    variation is swapped. Passes repeat until one applies nothing. Every move
    strictly lowers the penalty, so the loop terminates.

    With ``record=True`` the penalty after each move is kept in ``trace``
    (the first entry is the starting penalty).
    """
    t = tables or DominanceTables(inst)
    orders = orders or ratio_orders(inst)
    d = np.array([int(x) for x in delta], dtype=t.dtype)
    if d.shape != (inst.n,) or np.any((d != 0) & (d != 1)):
        raise ValueError("delta must be a binary vector of length n")
    trace = [evaluate_partition(inst, d.tolist(), orders)] if record else []
    moves = 0

    stable = False
    while not stable:
        stable = True
        for u in range(inst.n):
            # Delta_u does not depend on delta_u, so both insert tests share it.
            du = t.insert_const[u] + t.insert_coef[u] @ d
            if d[u] == 1 and du < 0:
                d[u] = 0
                stable = False
                moves += 1
                if record:
                    trace.append(evaluate_partition(inst, d.tolist(), orders))
            if d[u] == 0 and du > 0:
                d[u] = 1
                stable = False
                moves += 1
                if record:
                    trace.append(evaluate_partition(inst, d.tolist(), orders))
            if d[u] == 1:
                sw = t.swap_deltas(u, d)
                cand = np.flatnonzero((d == 0) & (sw < 0))
                if cand.size:
                    # After the first swap u is tardy, so later v cannot fire.
                    v = int(cand[0])
                    d[u], d[v] = 0, 1
                    stable = False
                    moves += 1
                    if record:
                        trace.append(evaluate_partition(inst, d.tolist(), orders))

    out = tuple(int(x) for x in d)
    return HeuristicResult(out, evaluate_partition(inst, out, orders), moves, start_label, tuple(trace))


def multistart(
    inst: Instance,
    restarts: int = 0,
    seed: int = 0,
    tables: DominanceTables | None = None,
) -> HeuristicResult:
    """Best local optimum from the all-early start and ``restarts`` random starts.

    Ties on penalty go to the lexicographically smallest vector.
    """
    if restarts < 0:
        raise ValueError("restarts must be non-negative")
    t = tables or DominanceTables(inst)
    orders = ratio_orders(inst)
    rng = np.random.default_rng(seed)
    starts = [((1,) * inst.n, "all-early")]
    for k in range(restarts):
        starts.append((tuple(rng.integers(0, 2, size=inst.n).tolist()), f"random-{k}"))
    results = [local_search(inst, s, t, label, orders=orders) for s, label in starts]
    return min(results, key=lambda r: (r.penalty, r.delta))
