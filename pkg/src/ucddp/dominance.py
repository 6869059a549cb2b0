"""Insert/swap penalty variations, big-M constants and dominance inequalities.

For a task ``u``, ``A(u)`` holds the tasks with a strictly larger
alpha-ratio and ``A_bar(u)`` the other tasks (``u`` excluded); ``B``/``B_bar``
do the same with beta-ratios. The insert variation ``Delta_u`` and the swap
variation ``Delta_{u,v}`` are affine in the early indicator vector, so each
is stored as an :class:`AffineForm`.

The three inequality families checked by :func:`check_dominance` are::

    insert_early (u):  Delta_u(delta)      >= -M_u  (1 - delta_u)
    insert_tardy (u): -Delta_u(delta)      >= -M'_u delta_u
    swap (u, v):       Delta_{u,v}(delta)  >= -M_{u,v} (delta_v + 1 - delta_u)

A binary vector violates one of them exactly when the matching insert or
swap move strictly lowers the penalty.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .instance_io import INT64_MAX, Instance

INSERT_EARLY = "insert_early"
INSERT_TARDY = "insert_tardy"
SWAP = "swap"


def _alpha_gt(inst: Instance, i: int, u: int) -> bool:
    return inst.alpha[i] * inst.p[u] > inst.alpha[u] * inst.p[i]


def _beta_gt(inst: Instance, i: int, u: int) -> bool:
    return inst.beta[i] * inst.p[u] > inst.beta[u] * inst.p[i]


@dataclass(frozen=True)
class NeighborSets:
    A: frozenset[int]
    A_bar: frozenset[int]
    B: frozenset[int]
    B_bar: frozenset[int]


def neighbor_sets(inst: Instance, u: int) -> NeighborSets:
    if not 0 <= u < inst.n:
        raise ValueError(f"task {u} out of range")
    others = [i for i in range(inst.n) if i != u]
    A = frozenset(i for i in others if _alpha_gt(inst, i, u))
    B = frozenset(i for i in others if _beta_gt(inst, i, u))
    return NeighborSets(A, frozenset(others) - A, B, frozenset(others) - B)


@dataclass(frozen=True)
class AffineForm:
    """``const + sum_i coef[i] * delta[i]`` with integer data."""

    const: int
    coef: tuple[int, ...]

    def __call__(self, delta: Sequence) -> int | Fraction:
        values = _checked_delta(delta, len(self.coef))
        total = self.const + sum(c * x for c, x in zip(self.coef, values) if c)
        if isinstance(total, Fraction) and total.denominator == 1:
            return int(total)
        return total

    @property
    def minimum(self) -> int:
        """Smallest value over binary vectors."""
        return self.const + sum(c for c in self.coef if c < 0)

    @property
    def maximum(self) -> int:
        return self.const + sum(c for c in self.coef if c > 0)


def _checked_delta(delta: Sequence, n: int) -> list:
    if len(delta) != n:
        raise ValueError(f"delta has length {len(delta)}, expected {n}")
    out = []
    for x in delta:
        x = int(x) if isinstance(x, (int, np.integer)) else Fraction(x)
        if not 0 <= x <= 1:
            raise ValueError(f"delta entries must lie in [0, 1], got {x}")
        out.append(x)
    return out


class _FormBuilder:
    def __init__(self, n: int):
        self.const = 0
        self.coef = [0] * n

    def early(self, i: int, w: int):
        """Add ``w * delta_i``."""
        self.coef[i] += w

    def tardy(self, i: int, w: int):
        """Add ``w * (1 - delta_i)``."""
        self.const += w
        self.coef[i] -= w

    def build(self) -> AffineForm:
        return AffineForm(self.const, tuple(self.coef))


def insert_form(inst: Instance, u: int, sets: NeighborSets | None = None) -> AffineForm:
    """``Delta_u`` as an affine form: the change of f when early ``u`` goes tardy."""
    s = sets or neighbor_sets(inst, u)
    p, a, b = inst.p, inst.alpha, inst.beta
    f = _FormBuilder(inst.n)
    for i in s.A:
        f.early(i, -a[u] * p[i])
    for i in s.B:
        f.tardy(i, b[u] * p[i])
    f.const += b[u] * p[u]
    for i in s.B_bar:
        f.tardy(i, p[u] * b[i])
    for i in s.A_bar:
        f.early(i, -p[u] * a[i])
    return f.build()


def swap_form(inst: Instance, u: int, v: int) -> AffineForm:
    """``Delta_{u,v}``: the change of f when early ``u`` and tardy ``v`` trade sides."""
    if u == v:
        raise ValueError("swap needs two distinct tasks")
    su, sv = neighbor_sets(inst, u), neighbor_sets(inst, v)
    p, a, b = inst.p, inst.alpha, inst.beta
    f = _FormBuilder(inst.n)
    for i in su.A:
        f.early(i, -a[u] * p[i])
    for i in su.B - {v}:
        f.tardy(i, b[u] * p[i])
    f.const += b[u] * p[u]
    for i in sv.B:
        f.tardy(i, -b[v] * p[i])
    f.const -= b[v] * p[v]
    for i in sv.A - {u}:
        f.early(i, a[v] * p[i])

    if a[v] * p[u] < a[u] * p[v]:
        for i in sv.A_bar:
            f.early(i, (p[v] - p[u]) * a[i])
        for i in sv.A & su.A_bar:
            f.early(i, -p[u] * a[i])
    else:
        for i in su.A_bar:
            f.early(i, (p[v] - p[u]) * a[i])
        for i in su.A & sv.A_bar:
            f.early(i, p[v] * a[i])

    if b[v] * p[u] <= b[u] * p[v]:
        for i in sv.B_bar:
            f.tardy(i, (p[u] - p[v]) * b[i])
        for i in sv.B & su.B_bar:
            f.tardy(i, p[u] * b[i])
    else:
        for i in su.B_bar:
            f.tardy(i, (p[u] - p[v]) * b[i])
        for i in su.B & sv.B_bar:
            f.tardy(i, -p[v] * b[i])
    return f.build()


def delta_insert(inst: Instance, delta: Sequence, u: int) -> int | Fraction:
    return insert_form(inst, u)(delta)


def delta_swap(inst: Instance, delta: Sequence, u: int, v: int) -> int | Fraction:
    return swap_form(inst, u, v)(delta)


@dataclass(frozen=True)
class BigMInsert:
    M: int
    M_prime: int


@dataclass(frozen=True)
class BigMSwap:
    M_tilde: int
    twice_M: int

    @property
    def M(self) -> Fraction:
        """``M_tilde`` if non-negative, else ``M_tilde / 2`` (possibly a half)."""
        return Fraction(self.twice_M, 2)


def big_m_insert(inst: Instance, u: int) -> BigMInsert:
    s = neighbor_sets(inst, u)
    p, a, b = inst.p, inst.alpha, inst.beta
    M = a[u] * sum(p[i] for i in s.A) - b[u] * p[u] + p[u] * sum(a[i] for i in s.A_bar)
    Mp = b[u] * sum(p[i] for i in s.B) + b[u] * p[u] + p[u] * sum(b[i] for i in s.B_bar)
    return BigMInsert(M, Mp)


def big_m_swap(inst: Instance, u: int, v: int) -> BigMSwap:
    if u == v:
        raise ValueError("swap needs two distinct tasks")
    su, sv = neighbor_sets(inst, u), neighbor_sets(inst, v)
    p, a, b = inst.p, inst.alpha, inst.beta
    m = a[u] * sum(p[i] for i in su.A) - b[u] * p[u] + b[v] * sum(p[i] for i in sv.B) + b[v] * p[v]
    if a[v] * p[u] < a[u] * p[v]:
        m += max(p[u] - p[v], 0) * sum(a[i] for i in sv.A_bar)
        m += p[u] * sum(a[i] for i in sv.A & su.A_bar)
    else:
        m += max(p[u] - p[v], 0) * sum(a[i] for i in su.A_bar)
    if b[v] * p[u] <= b[u] * p[v]:
        m += max(p[v] - p[u], 0) * sum(b[i] for i in sv.B_bar)
    else:
        m += max(p[v] - p[u], 0) * sum(b[i] for i in su.B_bar)
        m += p[v] * sum(b[i] for i in su.B & sv.B_bar)
    return BigMSwap(m, 2 * m if m >= 0 else m)


def _table_dtype(inst: Instance):
    # Form constants stay below ~8 n (max alpha + max beta) p(J).
    if 8 * inst.n * (max(inst.alpha) + max(inst.beta)) * inst.total_time <= INT64_MAX:
        return np.int64
    return object


class DominanceTables:
    """Vectorized insert/swap forms and big-M constants of one instance.

    Insert data is built eagerly; swap rows are built per pivot ``u`` on
    first use and cached. Read-only after construction apart from that cache.
    """

    def __init__(self, inst: Instance):
        self.inst = inst
        n = inst.n
        dt = _table_dtype(inst)
        self.dtype = dt
        p = np.asarray(inst.p, dtype=dt)
        a = np.asarray(inst.alpha, dtype=dt)
        b = np.asarray(inst.beta, dtype=dt)
        self._p, self._a, self._b = p, a, b
        eye = np.eye(n, dtype=bool)
        # agt[x, i]: i in A(x); ale[x, i]: i in A_bar(x).
        self.agt = (a[None, :] * p[:, None]) > (a[:, None] * p[None, :])
        self.ale = ~self.agt & ~eye
        self.bgt = (b[None, :] * p[:, None]) > (b[:, None] * p[None, :])
        self.ble = ~self.bgt & ~eye

        zero = np.zeros((n, n), dtype=dt)
        tardy_w = (np.where(self.bgt, b[:, None] * p[None, :], zero)
                   + np.where(self.ble, p[:, None] * b[None, :], zero))
        self.insert_coef = (-np.where(self.agt, a[:, None] * p[None, :], zero)
                            - np.where(self.ale, p[:, None] * a[None, :], zero)
                            - tardy_w)
        self.insert_const = tardy_w.sum(axis=1) + b * p

        self.M = ((a * np.where(self.agt, p[None, :], zero).sum(axis=1))
                  - b * p + p * np.where(self.ale, a[None, :], zero).sum(axis=1))
        self.M_prime = self.insert_const.copy()
        self._swap_rows: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._big_m_swap: np.ndarray | None = None

    def insert_deltas(self, delta) -> np.ndarray:
        """``Delta_u(delta)`` for every ``u`` at once."""
        return self.insert_const + self.insert_coef @ np.asarray(delta, dtype=self.dtype)

    def swap_row(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """``(const[v], coef[v, i])`` of ``Delta_{u,v}`` for all ``v`` (row ``u`` zero)."""
        row = self._swap_rows.get(u)
        if row is None:
            row = self._build_swap_row(u)
            self._swap_rows[u] = row
        return row

    def swap_deltas(self, u: int, delta) -> np.ndarray:
        const, coef = self.swap_row(u)
        return const + coef @ np.asarray(delta, dtype=self.dtype)

    def _build_swap_row(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        n, dt = self.inst.n, self.dtype
        p, a, b = self._p, self._a, self._b
        zero = np.zeros((n, n), dtype=dt)
        pu, au, bu = p[u], a[u], b[u]
        pv, av, bv = p[:, None], a[:, None], b[:, None]
        pi, ai, bi = p[None, :], a[None, :], b[None, :]
        not_v = ~np.eye(n, dtype=bool)
        agt_u, ale_u = self.agt[u][None, :], self.ale[u][None, :]
        bgt_u, ble_u = self.bgt[u][None, :], self.ble[u][None, :]
        i_is_u = np.zeros(n, dtype=bool)
        i_is_u[u] = True

        early = (np.where(agt_u & np.ones((n, 1), bool), -au * pi, zero)
                 + np.where(self.agt & ~i_is_u[None, :], av * pi, zero))
        tardy = (np.where(bgt_u & not_v, bu * pi, zero)
                 + np.where(self.bgt, -bv * pi, zero))
        const = bu * pu - b * p

        case_a = (a * pu < au * p)[:, None]
        early += np.where(case_a,
                          np.where(self.ale, (pv - pu) * ai, zero)
                          - np.where(self.agt & ale_u, pu * ai, zero),
                          np.where(ale_u, (pv - pu) * ai, zero)
                          + np.where(agt_u & self.ale, pv * ai, zero))
        case_b = (b * pu <= bu * p)[:, None]
        tardy += np.where(case_b,
                          np.where(self.ble, (pu - pv) * bi, zero)
                          + np.where(self.bgt & ble_u, pu * bi, zero),
                          np.where(ble_u, (pu - pv) * bi, zero)
                          - np.where(bgt_u & self.ble, pv * bi, zero))

        const = const + tardy.sum(axis=1)
        coef = early - tardy
        const[u] = 0
        coef[u, :] = 0
        return const, coef

    def big_m_swap_matrix(self) -> np.ndarray:
        """``M_tilde[u, v]`` for all ordered pairs (diagonal zero)."""
        if self._big_m_swap is None:
            n, dt = self.inst.n, self.dtype
            p, a, b = self._p, self._a, self._b
            zero = np.zeros((n, n), dtype=dt)
            sum_p_a = np.where(self.agt, p[None, :], zero).sum(axis=1)
            sum_p_b = np.where(self.bgt, p[None, :], zero).sum(axis=1)
            sum_a_ale = np.where(self.ale, a[None, :], zero).sum(axis=1)
            sum_b_ble = np.where(self.ble, b[None, :], zero).sum(axis=1)
            out = np.zeros((n, n), dtype=dt)
            for u in range(n):
                pu = p[u]
                m = a[u] * sum_p_a[u] - b[u] * pu + b * sum_p_b + b * p
                gap_uv = np.maximum(pu - p, 0)
                gap_vu = np.maximum(p - pu, 0)
                a_mid = np.where(self.agt & self.ale[u][None, :], a[None, :], zero).sum(axis=1)
                b_mid = np.where(self.bgt[u][None, :] & self.ble, b[None, :], zero).sum(axis=1)
                case_a = a * pu < a[u] * p
                m = m + np.where(case_a, gap_uv * sum_a_ale + pu * a_mid, gap_uv * sum_a_ale[u])
                case_b = b * pu <= b[u] * p
                m = m + np.where(case_b, gap_vu * sum_b_ble, gap_vu * sum_b_ble[u] + p * b_mid)
                m[u] = 0
                out[u] = m
            self._big_m_swap = out
        return self._big_m_swap


@dataclass(frozen=True)
class Violation:
    kind: str
    u: int
    v: int | None
    violation: int | Fraction

    def to_dict(self) -> dict:
        amount = self.violation
        if isinstance(amount, Fraction):
            amount = int(amount) if amount.denominator == 1 else float(amount)
        return {"kind": self.kind, "u": self.u + 1,
                "v": None if self.v is None else self.v + 1, "violation": amount}


@dataclass
class ViolationReport:
    violations: list[Violation] = field(default_factory=list)
    checked: int = 0

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def to_json(self) -> list[dict]:
        return [v.to_dict() for v in self.violations]


def check_dominance(inst: Instance, delta: Sequence[int], tables: DominanceTables | None = None) -> ViolationReport:
    """Evaluate all ``2n + n(n-1)`` dominance inequalities at a binary point.

    Violation magnitudes are ``rhs - lhs`` (always positive).
    """
    n = inst.n
    d = [int(x) for x in delta]
    if len(d) != n or any(x not in (0, 1) for x in d):
        raise ValueError("delta must be a binary vector of length n")
    t = tables or DominanceTables(inst)
    report = ViolationReport()

    ins = t.insert_deltas(d)
    for u in range(n):
        lhs, rhs = int(ins[u]), -int(t.M[u]) * (1 - d[u])
        if lhs < rhs:
            report.violations.append(Violation(INSERT_EARLY, u, None, rhs - lhs))
        lhs, rhs = -int(ins[u]), -int(t.M_prime[u]) * d[u]
        if lhs < rhs:
            report.violations.append(Violation(INSERT_TARDY, u, None, rhs - lhs))
    report.checked += 2 * n

    mt = t.big_m_swap_matrix()
    for u in range(n):
        sw = t.swap_deltas(u, d)
        for v in range(n):
            if v == u:
                continue
            m = int(mt[u, v])
            twice_m = 2 * m if m >= 0 else m
            lhs2 = 2 * int(sw[v])
            rhs2 = -twice_m * (d[v] + 1 - d[u])
            if lhs2 < rhs2:
                report.violations.append(Violation(SWAP, u, v, Fraction(rhs2 - lhs2, 2)))
            report.checked += 1
    return report
