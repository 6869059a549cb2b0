"""Early/tardy partitions, their canonical V-shaped schedule, and the penalty f.

A partition is an early indicator vector ``delta`` (1 = early, 0 = tardy).
Its penalty is the cost of the V-shaped block that has the last early task
completing exactly at ``d``; with no early task, the block starts at ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np

from .instance_io import Instance


@dataclass(frozen=True)
class Partition:
    delta: tuple[int, ...]

    def __post_init__(self):
        delta = tuple(int(v) for v in self.delta)
        if any(v not in (0, 1) for v in delta):
            raise ValueError("delta entries must be 0 or 1")
        object.__setattr__(self, "delta", delta)

    @property
    def early(self) -> frozenset[int]:
        return frozenset(j for j, v in enumerate(self.delta) if v)

    @property
    def tardy(self) -> frozenset[int]:
        return frozenset(j for j, v in enumerate(self.delta) if not v)

    @classmethod
    def from_sets(cls, n: int, early) -> "Partition":
        early = set(early)
        return cls(tuple(1 if j in early else 0 for j in range(n)))


PartitionLike = Union[Partition, Sequence[int]]


def as_delta(part: PartitionLike, n: int | None = None) -> tuple[int, ...]:
    delta = part.delta if isinstance(part, Partition) else Partition(tuple(part)).delta
    if n is not None and len(delta) != n:
        raise ValueError(f"delta has length {len(delta)}, expected {n}")
    return delta


def decode(delta: Sequence[int]) -> Partition:
    return Partition(tuple(delta))


@dataclass(frozen=True)
class RatioOrders:
    """Tasks sorted by non-increasing alpha/p (``rho``) and beta/p (``sigma``).

    Ties go to the smaller task index. ``rho_rank[j]`` is the position of
    task ``j`` in ``rho``; likewise ``sigma_rank``.
    """

    rho: tuple[int, ...]
    sigma: tuple[int, ...]
    rho_rank: tuple[int, ...]
    sigma_rank: tuple[int, ...]


def ratio_orders(inst: Instance) -> RatioOrders:
    idx = range(inst.n)
    rho = tuple(sorted(idx, key=lambda j: (-Fraction(inst.alpha[j], inst.p[j]), j)))
    sigma = tuple(sorted(idx, key=lambda j: (-Fraction(inst.beta[j], inst.p[j]), j)))
    return RatioOrders(rho, sigma, _inverse(rho), _inverse(sigma))


def _inverse(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for k, j in enumerate(perm):
        inv[j] = k
    return tuple(inv)


@dataclass(frozen=True)
class CanonicalSchedule:
    early_order: tuple[int, ...]
    tardy_order: tuple[int, ...]
    completion: tuple[int, ...]
    earliness: tuple[int, ...]
    tardiness: tuple[int, ...]


def build_canonical_schedule(
    inst: Instance, part: PartitionLike, orders: RatioOrders | None = None
) -> CanonicalSchedule:
    """The rho-sigma-shaped d-block of a partition.

    Early tasks run in decreasing ``rho`` rank, so the task with the largest
    alpha-ratio completes at ``d``; tardy tasks follow in ``sigma`` order
    starting at ``d``.
    """
    delta = as_delta(part, inst.n)
    orders = orders or ratio_orders(inst)
    early_order = tuple(j for j in reversed(orders.rho) if delta[j])
    tardy_order = tuple(j for j in orders.sigma if not delta[j])

    completion = [0] * inst.n
    t = inst.d
    for j in reversed(early_order):
        completion[j] = t
        t -= inst.p[j]
    t = inst.d
    for j in tardy_order:
        t += inst.p[j]
        completion[j] = t

    earliness = tuple(max(inst.d - c, 0) for c in completion)
    tardiness = tuple(max(c - inst.d, 0) for c in completion)
    return CanonicalSchedule(early_order, tardy_order, tuple(completion), earliness, tardiness)


def schedule_penalty(inst: Instance, completion: Sequence[int] | Mapping[int, int]) -> int:
    """Literal objective ``sum alpha_j [d - C_j]+ + beta_j [C_j - d]+``.

    Raises ``ValueError`` if two tasks overlap or a task would start before 0.
    """
    if isinstance(completion, Mapping):
        completion = [completion[j] for j in range(inst.n)]
    if len(completion) != inst.n:
        raise ValueError("one completion time per task is required")
    intervals = sorted((c - p, c) for c, p in zip(completion, inst.p))
    if intervals[0][0] < 0:
        raise ValueError("a task starts before time 0")
    for (_, end), (start, _) in zip(intervals, intervals[1:]):
        if start < end:
            raise ValueError("tasks overlap")
    total = 0
    for c, a, b in zip(completion, inst.alpha, inst.beta):
        total += a * _pos(inst.d - c) + b * _pos(c - inst.d)
    return total


def _pos(x: int) -> int:
    return x if x > 0 else 0


def evaluate_partition(inst: Instance, part: PartitionLike, orders: RatioOrders | None = None) -> int:
    """Penalty f of a partition, in O(n) once the ratio orders are known."""
    delta = as_delta(part, inst.n)
    orders = orders or ratio_orders(inst)
    total = 0
    before = 0
    for j in orders.rho:
        if delta[j]:
            total += inst.alpha[j] * before
            before += inst.p[j]
    before = 0
    for j in orders.sigma:
        if not delta[j]:
            before += inst.p[j]
            total += inst.beta[j] * before
    return total


@dataclass(frozen=True)
class Encoding:
    """Fortet encoding: ``X[(i, j)] = 1`` iff tasks ``i < j`` are on different sides."""

    delta: tuple[int, ...]
    X: dict[tuple[int, int], int] = field(hash=False)


def encode(part: PartitionLike) -> Encoding:
    delta = as_delta(part)
    n = len(delta)
    X = {(i, j): int(delta[i] != delta[j]) for i in range(n) for j in range(i + 1, n)}
    return Encoding(delta, X)


def _x(X: Mapping[tuple[int, int], int], i: int, j: int) -> int:
    return X[(i, j)] if i < j else X[(j, i)]


def g_value(inst: Instance, enc: Encoding, orders: RatioOrders | None = None) -> int:
    """Evaluate the linearized objective g(delta, X) term by term.

    Each pair term ``p * (delta_i + delta_j - X_ij)`` (and its tardy analogue)
    is even on a consistent encoding and is halved exactly.
    """
    delta = enc.delta
    n = inst.n
    if len(delta) != n:
        raise ValueError("encoding size does not match the instance")
    for (i, j), x in enc.X.items():
        if x != int(delta[i] != delta[j]):
            raise ValueError(f"inconsistent X for pair ({i + 1}, {j + 1})")
    orders = orders or ratio_orders(inst)
    total = 0
    for j in range(n):
        for k in range(orders.rho_rank[j]):
            i = orders.rho[k]
            num = inst.p[i] * (delta[j] + delta[i] - _x(enc.X, j, i))
            assert num % 2 == 0
            total += inst.alpha[j] * (num // 2)
        for k in range(orders.sigma_rank[j]):
            i = orders.sigma[k]
            num = inst.p[i] * (2 - delta[j] - delta[i] - _x(enc.X, j, i))
            assert num % 2 == 0
            total += inst.beta[j] * (num // 2)
        total += inst.beta[j] * inst.p[j] * (1 - delta[j])
    return total


def pair_matrices(inst: Instance, orders: RatioOrders | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quadratic pseudo-boolean form of f.

    Returns ``(Qe, Qt, c)`` with ``f(delta) = delta' Qe delta + tau' Qt tau + c' tau``
    where ``tau = 1 - delta``. ``Qe[i, j] = alpha_j p_i`` when ``i`` precedes
    ``j`` in ``rho`` (zero otherwise); ``Qt`` is the same with ``beta`` and
    ``sigma``; ``c_j = beta_j p_j``. All entries are non-negative.
    """
    orders = orders or ratio_orders(inst)
    p = np.asarray(inst.p, dtype=np.int64)
    a = np.asarray(inst.alpha, dtype=np.int64)
    b = np.asarray(inst.beta, dtype=np.int64)
    rr = np.asarray(orders.rho_rank)
    sr = np.asarray(orders.sigma_rank)
    Qe = np.where(rr[:, None] < rr[None, :], p[:, None] * a[None, :], 0)
    Qt = np.where(sr[:, None] < sr[None, :], p[:, None] * b[None, :], 0)
    return Qe, Qt, b * p


def solution_dict(inst: Instance, part: PartitionLike, orders: RatioOrders | None = None) -> dict:
    """Solution JSON object with fixed field order and 1-based task ids."""
    orders = orders or ratio_orders(inst)
    sched = build_canonical_schedule(inst, part, orders)
    delta = as_delta(part, inst.n)
    return {
        "delta": list(delta),
        "penalty": evaluate_partition(inst, delta, orders),
        "early": [j + 1 for j in sched.early_order],
        "tardy": [j + 1 for j in sched.tardy_order],
        "completion": list(sched.completion),
    }
