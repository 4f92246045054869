import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from conftest import random_graphs
from vthamilton.errors import HypothesisError
from vthamilton.graph import Graph, blow_up, complete_graph, cycle_graph, empty_graph, path_graph
from vthamilton.instances import (
    AutomorphismWitness,
    blow_up_instance,
    circulant,
    double_clique,
    fixture,
    verify_witness,
)
from vthamilton.matching import (
    FractionalMatching,
    bipartite_matching_between,
    cover_after_deletion_check,
    fvc,
    is_integral_matching,
    konig_cover,
    lift_blowup_matching,
    max_bipartite_matching,
    nu_star,
    project_matching,
)

HALF = Fraction(1, 2)


def brute_half_integral(g: Graph) -> Fraction:
    """Best total over all {0, 1/2, 1} edge weightings with loads <= 1 (doubled ints)."""
    edges = g.edge_list()
    load = [0] * g.n
    best = 0

    def rec(i: int, total: int) -> None:
        nonlocal best
        if total + 2 * (len(edges) - i) <= best:
            return
        if i == len(edges):
            best = max(best, total)
            return
        u, v = edges[i]
        for w in (2, 1, 0):
            if load[u] + w <= 2 and load[v] + w <= 2:
                load[u] += w
                load[v] += w
                rec(i + 1, total + w)
                load[u] -= w
                load[v] -= w

    rec(0, 0)
    return Fraction(best, 2)


def lp_values(g: Graph) -> tuple[float, float]:
    """Fractional matching and cover optima from scipy's LP solver."""
    if g.m == 0:
        return 0.0, 0.0
    edges = g.edge_list()
    inc = np.zeros((g.n, len(edges)))
    for j, (u, v) in enumerate(edges):
        inc[u, j] = inc[v, j] = 1
    m = linprog(-np.ones(len(edges)), A_ub=inc, b_ub=np.ones(g.n), bounds=(0, 1), method="highs")
    c = linprog(np.ones(g.n), A_ub=-inc.T, b_ub=-np.ones(len(edges)), bounds=(0, 1), method="highs")
    return -m.fun, c.fun


VT_FIXTURES = [
    lambda: circulant(8, {1, 2}),
    lambda: circulant(9, {1, 3}),
    lambda: circulant(12, {1, 2, 3}),
    lambda: circulant(7, {1}),
    lambda: fixture("petersen"),
    lambda: fixture("coxeter"),
    lambda: double_clique(8),
    lambda: double_clique(12),
    lambda: blow_up_instance(*circulant(5, {1}), 2),
    lambda: blow_up_instance(*fixture("k_n(3)"), 3),
    lambda: fixture("q3"),
]


class TestExamples:
    def test_c5(self):
        val, m = nu_star(cycle_graph(5))
        assert val == Fraction(5, 2)
        assert m.is_half_integral() and m.is_feasible(cycle_graph(5))

    def test_k4(self):
        val, m = nu_star(complete_graph(4))
        assert val == 2 and all(m.load(v) == 1 for v in range(4))

    def test_star(self):
        assert nu_star(Graph(4, [(0, 1), (0, 2), (0, 3)]))[0] == 1

    def test_fvc_examples(self):
        assert fvc(fixture("petersen")[0])[0] == 5
        assert fvc(complete_graph(2))[0] == 1
        val, cover = fvc(empty_graph(5))
        assert val == 0 and all(x == 0 for x in cover.values)


class TestDuality:
    @pytest.mark.parametrize("g", random_graphs(120, 12, seed=1), ids=lambda g: f"n{g.n}m{g.m}")
    def test_random(self, g):
        mval, m = nu_star(g)
        cval, cover = fvc(g)
        assert mval == cval
        assert m.is_half_integral() and m.is_feasible(g) and m.total == mval
        assert cover.is_feasible(g) and cover.total == cval
        assert all(2 * x in (0, 1, 2) for x in cover.values)
        lm, lc = lp_values(g)
        assert abs(lm - float(mval)) < 1e-7 and abs(lc - float(cval)) < 1e-7

    @pytest.mark.parametrize("g", random_graphs(60, 9, seed=2, p_range=(0.15, 0.5)), ids=lambda g: f"n{g.n}m{g.m}")
    def test_brute_force_oracle(self, g):
        assert nu_star(g)[0] == brute_half_integral(g)

    @pytest.mark.parametrize("make", VT_FIXTURES)
    def test_vt_fixtures_half_n(self, make):
        g, w = make()
        assert verify_witness(g, w).transitive
        assert fvc(g)[0] == Fraction(g.n, 2) == nu_star(g)[0]


class TestJson:
    def test_round_trip(self):
        m = nu_star(cycle_graph(5))[1]
        data = m.to_json()
        assert data["total_doubled"] == 5
        assert FractionalMatching.from_json(data) == m

    def test_total_mismatch(self):
        with pytest.raises(ValueError):
            FractionalMatching.from_json({"edges": [[0, 1, 2]], "total_doubled": 3})


class TestBipartiteMatching:
    def test_against_brute_cover(self):
        for g in random_graphs(40, 8, seed=3):
            half = g.n // 2
            left, right = list(range(half)), list(range(half, g.n))
            mt = bipartite_matching_between(g, left, right)
            assert is_integral_matching(g, mt)
            adj = [[v - half for v in g.adj[u] if v >= half] for u in left]
            ml, mr = max_bipartite_matching(len(left), len(right), adj)
            cl, cr = konig_cover(len(left), len(right), adj, ml, mr)
            assert len(cl) + len(cr) == len(mt)  # Konig
            for u in left:
                for v in adj[u]:
                    assert u in cl or v in cr


class TestLift:
    def test_c5(self):
        h = cycle_graph(5)
        lifted = lift_blowup_matching(h, nu_star(h)[1])
        assert len(lifted) == 5 and is_integral_matching(blow_up(h, 2), lifted)

    def test_k2(self):
        lifted = lift_blowup_matching(complete_graph(2), FractionalMatching({(0, 1): 1}))
        assert lifted == [(0, 2), (1, 3)]

    def test_p3_parity_rule(self):
        m = FractionalMatching({(0, 1): HALF, (1, 2): HALF})
        lifted = lift_blowup_matching(path_graph(3), m)
        # j=1 uses copy 1 (vertices 0 -> 2), j=2 uses copy 2 (vertices 3 -> 5)
        assert lifted == [(0, 2), (3, 5)]

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            lift_blowup_matching(path_graph(3), FractionalMatching({(0, 1): 1, (1, 2): 1}))
        with pytest.raises(ValueError):
            lift_blowup_matching(path_graph(3), FractionalMatching({(0, 1): Fraction(1, 3)}))

    @pytest.mark.parametrize("g", random_graphs(80, 10, seed=4), ids=lambda g: f"n{g.n}m{g.m}")
    def test_random(self, g):
        val, m = nu_star(g)
        lifted = lift_blowup_matching(g, m)
        assert len(lifted) == 2 * val
        assert is_integral_matching(blow_up(g, 2), lifted)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(3, 9))
    def test_all_half_cycles(self, r):
        h = cycle_graph(r)
        m = FractionalMatching({e: HALF for e in h.edges})
        lifted = lift_blowup_matching(h, m)
        assert len(lifted) == r and is_integral_matching(blow_up(h, 2), lifted)


class TestProject:
    def test_fold_back_c5(self):
        h = cycle_graph(5)
        b = blow_up(h, 2)
        lifted = lift_blowup_matching(h, nu_star(h)[1])
        proj = project_matching(b, [v // 2 for v in range(10)], h, 2, FractionalMatching({e: 1 for e in lifted}))
        assert proj.total == Fraction(5, 2) and proj.is_feasible(h)
        assert all(w == HALF for w in proj.weights.values())

    def test_zero(self):
        h = cycle_graph(4)
        proj = project_matching(blow_up(h, 2), [v // 2 for v in range(8)], h, 2, FractionalMatching({}))
        assert proj.total == 0

    def test_identity(self):
        g = fixture("petersen")[0]
        m = nu_star(g)[1]
        assert project_matching(g, list(range(10)), g, 1, m) == m

    def test_inconsistent_class_map(self):
        h = path_graph(3)
        with pytest.raises(ValueError):
            project_matching(blow_up(h, 2), [0, 0, 2, 2, 1, 1], h, 2, FractionalMatching({}))

    @pytest.mark.parametrize("g", random_graphs(30, 7, seed=5), ids=lambda g: f"n{g.n}m{g.m}")
    def test_weight_scales(self, g):
        b = blow_up(g, 3)
        m = nu_star(b)[1]
        proj = project_matching(b, [v // 3 for v in range(b.n)], g, 3, m)
        assert proj.is_feasible(g) and proj.total == m.total / 3


class TestCoverAfterDeletion:
    def test_c5(self):
        g, w = circulant(5, {1})
        assert cover_after_deletion_check(g, w, path_graph(5), Fraction(1, 5))

    def test_k4(self):
        g, w = fixture("k_n(4)")
        assert cover_after_deletion_check(g, w, g, 0)

    def test_petersen_minus_perfect_matching(self):
        g, w = fixture("petersen")
        spokes = {(i, i + 5) for i in range(5)}
        gp = Graph(10, [e for e in g.edges if e not in spokes])
        assert cover_after_deletion_check(g, w, gp, Fraction(1, 3))

    def test_not_spanning(self):
        g, w = circulant(5, {1})
        with pytest.raises(ValueError):
            cover_after_deletion_check(g, w, Graph(5, [(0, 2)]), Fraction(1, 2))

    def test_hypotheses(self):
        g, _ = circulant(5, {1})
        with pytest.raises(HypothesisError):
            cover_after_deletion_check(g, AutomorphismWitness([list(range(5))]), g, 0)
        with pytest.raises(HypothesisError):
            cover_after_deletion_check(g, circulant(5, {1})[1], path_graph(5), 0)

    @pytest.mark.parametrize("make", VT_FIXTURES[:8])
    def test_random_deletions(self, make, rng):
        g, w = make()
        edges = g.edge_list()
        for _ in range(10):
            delta = Fraction(rng.randint(1, 4), 10)
            keep = rng.sample(edges, math.ceil((1 - delta) * g.m))
            assert cover_after_deletion_check(g, w, Graph(g.n, keep), delta)
