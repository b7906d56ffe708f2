import json

import numpy as np
import pytest

from klyachko.errors import BudgetExceeded
from klyachko.matlin import Matrix
from klyachko.modelgroups import PairShape, TildeHElement, enumerate_group, gl_array, legal_pairs
from klyachko.oracle import (
    class_count,
    estimate_cost,
    klyachko_sum_check,
    mackey_json,
    mackey_report,
    mackey_table,
    orbit_decompose,
    scan_stabilizers,
    sweep_verify,
)


def brute_orbits(n, q, shape):
    """Orbits of the pair group and whether theta is trivial on each stabilizer."""
    G = list(enumerate_group("GL_n", q, n))
    H1 = list(enumerate_group("H_shape", q, shape.left))
    H2 = list(enumerate_group("H_shape", q, shape.right))
    group = [TildeHElement(a, b, 1, shape) for a in H1 for b in H2]
    seen, out = set(), []
    for g in G:
        if g in seen:
            continue
        orbit = {h.act(g) for h in group}
        seen |= orbit
        contributing = all(h.theta().is_trivial for h in group if h.act(g) == g)
        out.append((len(orbit), contributing))
    return out


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2)])
def test_orbits_against_brute_force(n, q):
    for r, rp in legal_pairs(n):
        shape = PairShape(n, r, rp)
        brute = brute_orbits(n, q, shape)
        rep = orbit_decompose(n, q, shape)
        assert sorted(brute) == sorted((size, c) for _, size, c in rep.orbits)
        assert rep.total == len(gl_array(n, q))


def test_orbit_examples():
    rep = orbit_decompose(2, 2, PairShape(2, 0, 0))
    assert len(rep.orbits) == 1 and rep.contributing == 1
    rep = orbit_decompose(2, 2, PairShape(2, 2, 0))
    assert rep.contributing == 0


def test_scan_matches_brute_force():
    n, q = 2, 3
    G = gl_array(n, q)
    for r, rp in legal_pairs(n):
        shape = PairShape(n, r, rp)
        scan = scan_stabilizers(G, q, shape)
        H1 = list(enumerate_group("H_shape", q, shape.left))
        H2 = list(enumerate_group("H_shape", q, shape.right))
        epss = (1, -1) if r == rp else (1,)
        for g_arr, flag in zip(G, scan.proposition):
            g = Matrix(g_arr.tolist(), q)
            nontrivial = any(
                not TildeHElement(a, b, e, shape).theta_tilde().is_trivial
                for a in H1 for b in H2 for e in epss
                if TildeHElement(a, b, e, shape).act(g) == g
            )
            assert bool(flag) == nontrivial


def brute_class_count(n, q):
    G = list(enumerate_group("GL_n", q, n))
    seen, count = set(), 0
    for g in G:
        if g in seen:
            continue
        seen |= {x @ g @ x.inv() for x in G}
        count += 1
    return count


def test_class_count():
    assert class_count(2, 2) == brute_class_count(2, 2) == 3
    assert class_count(2, 3) == brute_class_count(2, 3) == 8
    assert class_count(3, 2) == 6


def test_mackey_small():
    table = mackey_table(2, 2)
    assert table.counts[(2, 0)] == 0 and table.counts[(2, 2)] == 2 and table.counts[(0, 0)] == 1
    assert table.passed and klyachko_sum_check(2, 3)
    text = mackey_report(table)
    assert "klyachko_sum_check: PASS" in text and "elapsed" not in text
    doc = json.loads(mackey_json(table))
    assert doc["class_count"] == 3 and doc["passed"]


def test_sweep_small():
    rep = sweep_verify(2, 2)
    assert rep.failures == 0
    assert "0 failures / 6 elements" in rep.to_text(footer=False)
    doc = json.loads(rep.to_json())
    assert doc["failures"] == 0 and len(doc["pairs"]) == 4
    assert sum(r.eps_counts[1] + r.eps_counts[-1] for r in rep.results) == 6 * 4


def test_sweep_workers():
    rep = sweep_verify(2, 3, pairs=[(2, 2), (0, 0)], workers=2)
    assert rep.failures == 0 and rep.elements == 48


def test_budget():
    with pytest.raises(BudgetExceeded):
        sweep_verify(3, 3, budget=1000)
    with pytest.raises(BudgetExceeded):
        gl_array(4, 5, budget=1000)
    assert estimate_cost(2, 2, [(2, 2)]) == 6 * 2 * 2


def test_deterministic_order():
    a = gl_array(2, 3)
    b = gl_array(2, 3)
    assert np.array_equal(a, b)
