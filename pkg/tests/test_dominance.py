import itertools
from fractions import Fraction

import numpy as np
import pytest

from conftest import small_instances
from oracles import partition_cost
from ucddp.dominance import (
    DominanceTables,
    big_m_insert,
    big_m_swap,
    check_dominance,
    delta_insert,
    delta_swap,
    insert_form,
    neighbor_sets,
    swap_form,
)
from ucddp.instance_io import Instance


def f(inst, delta):
    return partition_cost(inst.p, inst.alpha, inst.beta, inst.d, delta)


def test_neighbor_sets_i2(i2):
    s = neighbor_sets(i2, 0)
    assert (s.A, s.A_bar, s.B, s.B_bar) == (set(), {1}, set(), {1})
    s = neighbor_sets(i2, 1)
    assert (s.A, s.A_bar, s.B, s.B_bar) == ({0}, set(), {0}, set())


def test_neighbor_sets_single_task():
    s = neighbor_sets(Instance((3,), (1,), (1,), 3), 0)
    assert not (s.A or s.A_bar or s.B or s.B_bar)


def test_neighbor_sets_ties_go_to_bar():
    inst = Instance((1, 2), (1, 2), (1, 2), 3)
    s = neighbor_sets(inst, 0)
    assert s.A == set() and s.A_bar == {1} and s.B_bar == {1}


def test_delta_insert_i2(i2):
    assert delta_insert(i2, (1, 1), 0) == 1
    assert f(i2, (0, 1)) - f(i2, (1, 1)) == 1
    assert delta_insert(i2, (0, 0), 0) == 3
    assert delta_insert(i2, (1, 0.5), 0) == 2
    assert delta_insert(i2, (1, Fraction(1, 3)), 0) == Fraction(7, 3)


def test_delta_insert_rejects_out_of_range(i2):
    with pytest.raises(ValueError):
        delta_insert(i2, (1, 1.5), 0)


def test_delta_swap_i2(i2):
    assert delta_swap(i2, (1, 0), 0, 1) == 0 == f(i2, (0, 1)) - f(i2, (1, 0))
    assert delta_swap(i2, (0, 1), 1, 0) == 0 == f(i2, (1, 0)) - f(i2, (0, 1))


def test_delta_swap_requires_distinct_tasks():
    with pytest.raises(ValueError):
        delta_swap(Instance((1,), (1,), (1,), 1), (1,), 0, 0)


def test_big_m_insert_i2(i2):
    m = big_m_insert(i2, 0)
    assert (m.M, m.M_prime) == (-1, 3)
    # The bound is tight: the largest -Delta_1 over binary points is -1.
    assert max(-delta_insert(i2, d, 0) for d in itertools.product((0, 1), repeat=2)) == -1


def test_big_m_insert_single_task():
    inst = Instance((3,), (2,), (5,), 3)
    assert big_m_insert(inst, 0) == type(big_m_insert(inst, 0))(-15, 15)


def test_big_m_swap_i2(i2):
    m = big_m_swap(i2, 0, 1)
    assert m.M_tilde == 1 and m.M == 1


def test_negative_big_m_swap_is_halved():
    seen = 0
    for inst in small_instances(30, [3, 4, 5]):
        for u, v in itertools.permutations(range(inst.n), 2):
            m = big_m_swap(inst, u, v)
            if m.M_tilde < 0:
                seen += 1
                assert m.M == Fraction(m.M_tilde, 2)
                assert -m.M_tilde >= -2 * m.M and -m.M_tilde >= -m.M
            else:
                assert m.M == m.M_tilde
    assert seen > 0


def test_identities_and_bounds_small():
    for inst in small_instances(15, [2, 3, 4, 5, 6]):
        n = inst.n
        for delta in itertools.product((0, 1), repeat=n):
            base = f(inst, delta)
            for u in range(n):
                flip = list(delta)
                flip[u] = 1 - flip[u]
                du = delta_insert(inst, delta, u)
                assert f(inst, flip) - base == (du if delta[u] else -du)
                m = big_m_insert(inst, u)
                assert -m.M <= du <= m.M_prime
            for u, v in itertools.permutations(range(n), 2):
                duv = delta_swap(inst, delta, u, v)
                assert duv >= -big_m_swap(inst, u, v).M_tilde
                if delta[u] == 1 and delta[v] == 0:
                    moved = list(delta)
                    moved[u], moved[v] = 0, 1
                    assert f(inst, moved) - base == duv


def test_forms_are_affine():
    inst = small_instances(1, [6])[0]
    lo, hi = (0, 1, 1, 0, 1, 0), (1, 0, 1, 1, 0, 0)
    mid = [Fraction(a + b, 2) for a, b in zip(lo, hi)]
    for u in range(inst.n):
        assert delta_insert(inst, mid, u) == Fraction(delta_insert(inst, lo, u) + delta_insert(inst, hi, u), 2)
        v = (u + 1) % inst.n
        assert delta_swap(inst, mid, u, v) == Fraction(delta_swap(inst, lo, u, v) + delta_swap(inst, hi, u, v), 2)


def test_tables_agree_with_scalar_forms():
    for inst in small_instances(12, [1, 2, 5, 8]):
        t = DominanceTables(inst)
        mt = t.big_m_swap_matrix()
        for u in range(inst.n):
            form = insert_form(inst, u)
            assert int(t.insert_const[u]) == form.const
            assert t.insert_coef[u].tolist() == list(form.coef)
            m = big_m_insert(inst, u)
            assert (int(t.M[u]), int(t.M_prime[u])) == (m.M, m.M_prime)
            const, coef = t.swap_row(u)
            for v in range(inst.n):
                if v == u:
                    continue
                sf = swap_form(inst, u, v)
                assert int(const[v]) == sf.const
                assert coef[v].tolist() == list(sf.coef)
                assert int(mt[u, v]) == big_m_swap(inst, u, v).M_tilde


def test_tables_fall_back_to_python_ints():
    p = 2**39
    inst = Instance((p, p), (2**20, 1), (1, 2**20), 2 * p)
    t = DominanceTables(inst)
    assert t.dtype is object
    assert int(t.insert_deltas((1, 1))[0]) == delta_insert(inst, (1, 1), 0)


def test_check_dominance_i2(i2):
    assert not check_dominance(i2, (1, 1))
    report = check_dominance(i2, (0, 0))
    assert [(v.kind, v.u) for v in report.violations] == [("insert_tardy", 0), ("insert_tardy", 1)]
    assert report.checked == 2 * 2 + 2
    assert report.to_json()[0] == {"kind": "insert_tardy", "u": 1, "v": None, "violation": 3}


def test_check_dominance_single_task():
    inst = Instance((3,), (2,), (5,), 3)
    assert not check_dominance(inst, (1,))
    assert check_dominance(inst, (1,)).checked == 2


def test_check_dominance_matches_improving_moves():
    for inst in small_instances(10, [3, 4, 5, 6]):
        n = inst.n
        t = DominanceTables(inst)
        for delta in itertools.product((0, 1), repeat=n):
            report = check_dominance(inst, delta, t)
            assert report.checked == 2 * n + n * (n - 1)
            got = {(v.kind, v.u, v.v) for v in report.violations}
            base = f(inst, delta)
            want = set()
            for u in range(n):
                flip = list(delta)
                flip[u] = 1 - flip[u]
                if f(inst, flip) < base:
                    want.add(("insert_early" if delta[u] else "insert_tardy", u, None))
            for u, v in itertools.permutations(range(n), 2):
                if delta[u] == 1 and delta[v] == 0:
                    moved = list(delta)
                    moved[u], moved[v] = 0, 1
                    if f(inst, moved) < base:
                        want.add(("swap", u, v))
            assert got == want
