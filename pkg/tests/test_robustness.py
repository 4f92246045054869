import itertools
import math
from fractions import Fraction

import networkx as nx
import pytest

from conftest import named_fixtures, random_connected_graphs, to_nx
from vthamilton.errors import CapacityError, HypothesisError, InternalConsistencyError
from vthamilton.graph import (
    Digraph,
    Graph,
    are_isomorphic,
    blow_up,
    codeg_graph,
    complete_graph,
    cycle_graph,
    empty_graph,
    induced,
    members,
)
from vthamilton.instances import circulant, double_clique, fixture
from vthamilton.robustness import (
    CutWitness,
    DecompositionError,
    check_cut_witness,
    codeg_island_candidates,
    codeg_threshold,
    construct_non_iron_witness,
    decomposition_level,
    is_l_iron,
    is_l_robust,
    is_l_strongly_connected,
    islands,
    non_iron_witness_check,
    robust_decomposition,
    robustness_level,
    short_path,
)


def brute_robust(g: Graph, l: int) -> bool:
    """Connected after deleting any edge set of max degree <= l (edge-subset enumeration)."""
    edges = g.edge_list()
    for k in range(len(edges) + 1):
        for sub in itertools.combinations(edges, k):
            deg = [0] * g.n
            for u, v in sub:
                deg[u] += 1
                deg[v] += 1
            if max(deg, default=0) > l:
                continue
            h = to_nx(g)
            h.remove_edges_from(sub)
            if not nx.is_connected(h):
                return False
    return True


def brute_islands(g: Graph, l: int) -> list[list[int]]:
    sep = set()
    for bits in itertools.product([0, 1], repeat=g.n - 1):
        side = (0, *bits)
        x = [v for v in range(g.n) if side[v] == 0]
        y = [v for v in range(g.n) if side[v] == 1]
        if not y:
            continue
        cross = max(
            [sum(1 for w in g.adj[v] if side[w] != side[v]) for v in range(g.n)], default=0
        )
        if cross <= l:
            sep |= {(a, b) for a in x for b in y} | {(b, a) for a in x for b in y}
    classes = []
    for v in range(g.n):
        for c in classes:
            if (c[0], v) not in sep:
                c.append(v)
                break
        else:
            classes.append([v])
    return classes


def blocks_of(part):
    return [list(b) for b in part.blocks]


def non_iron_fixture():
    """12 vertices: W1 = {2..6} a clique, W2 = {7..11} hanging off L1 = {0}
    and partly off L2 = {1}."""
    edges = [(i, j) for i in range(2, 7) for j in range(i + 1, 7)]
    edges += [(0, v) for v in range(7, 12)] + [(1, 7), (1, 8), (1, 2), (0, 2)]
    return Graph(12, edges)


class TestRobust:
    def test_double_clique(self):
        v = is_l_robust(double_clique(8)[0], 1)
        assert v.status == "not_robust"
        assert sorted([list(v.witness.X), list(v.witness.Y)]) == [[0, 1, 2, 3], [4, 5, 6, 7]]
        assert v.witness.crossing_max_degree == 1

    def test_k4(self):
        assert is_l_robust(complete_graph(4), 1).holds

    def test_c5(self):
        v = is_l_robust(cycle_graph(5), 1)
        assert not v.holds and check_cut_witness(cycle_graph(5), v.witness) == []

    def test_disconnected(self):
        v = is_l_robust(Graph(4, [(0, 1), (2, 3)]), 0)
        assert not v.holds and v.witness.crossing_max_degree == 0

    def test_capacity(self):
        with pytest.raises(CapacityError):
            is_l_robust(complete_graph(21), 1)

    @pytest.mark.parametrize("g", random_connected_graphs(40, 6, seed=11), ids=lambda g: f"n{g.n}m{g.m}")
    def test_cut_characterisation_vs_edge_subsets(self, g):
        for l in range(3):
            assert is_l_robust(g, l).holds == brute_robust(g, l)


class TestIron:
    def test_c5(self):
        v = is_l_iron(cycle_graph(5), 1)
        # removals are tried by size, and C5 already fails with U empty
        assert v.status == "not_iron" and v.witness.removed == ()
        assert check_cut_witness(cycle_graph(5), v.witness) == []

    def test_k5(self):
        assert is_l_iron(complete_graph(5), 1).holds

    def test_double_clique(self):
        assert not is_l_iron(double_clique(8)[0], 1).holds

    def test_against_vertex_removal_oracle(self):
        for g in random_connected_graphs(30, 7, seed=12):
            for l in (1, 2):
                expected = all(
                    brute_robust(induced(g, [v for v in range(g.n) if v not in u]).graph, l)
                    for k in range(l + 1)
                    for u in itertools.combinations(range(g.n), k)
                    if g.n - k >= 2
                )
                assert is_l_iron(g, l).holds == expected


class TestCutWitness:
    def test_json_round_trip(self):
        w = is_l_robust(double_clique(8)[0], 1).witness
        assert CutWitness.from_json(w.to_json()) == w

    def test_detects_bad_witness(self):
        g = complete_graph(4)
        bad = CutWitness((), (0, 1), (2, 3), 1)
        assert check_cut_witness(g, bad)
        assert check_cut_witness(g, CutWitness((), (0, 1), (1, 2, 3), 2))


class TestIslands:
    def test_double_clique(self):
        assert blocks_of(islands(double_clique(8)[0], 1)) == [[0, 1, 2, 3], [4, 5, 6, 7]]

    def test_k4_level_3(self):
        assert blocks_of(islands(complete_graph(4), 3)) == [[0], [1], [2], [3]]

    def test_level_0_connected(self):
        assert blocks_of(islands(circulant(9, {2})[0], 0)) == [list(range(9))]

    @pytest.mark.parametrize("g", random_connected_graphs(40, 8, seed=13), ids=lambda g: f"n{g.n}m{g.m}")
    def test_against_brute_force(self, g):
        for l in range(3):
            assert blocks_of(islands(g, l)) == brute_islands(g, l)

    @pytest.mark.parametrize("name, g, w", named_fixtures(10), ids=lambda x: x if isinstance(x, str) else "")
    def test_many_neighbours_inside_an_island(self, name, g, w):
        for l in (1, 2):
            part = islands(g, l)
            for block in part.blocks:
                bm = sum(1 << v for v in block)
                for v in range(g.n):
                    if (g.masks[v] & bm).bit_count() > l:
                        assert v in block

    @pytest.mark.parametrize("name, g, w", named_fixtures(12), ids=lambda x: x if isinstance(x, str) else "")
    def test_vt_islands_isomorphic(self, name, g, w):
        for l in (1, 2):
            blocks = islands(g, l).blocks
            first = induced(g, blocks[0]).graph
            assert all(are_isomorphic(first, induced(g, b).graph) for b in blocks[1:])

    @pytest.mark.parametrize(
        "g",
        [complete_graph(16), circulant(20, range(1, 9))[0], circulant(18, range(1, 8))[0]],
        ids=["k16", "circ20", "circ18"],
    )
    def test_large_islands(self, g):
        alpha = Fraction(g.valency, g.n)
        assert g.n >= 10 / alpha**2
        l = math.ceil(alpha**2 * g.n / 5)
        for block in islands(g, l).blocks:
            assert len(block) >= alpha**2 * g.n / 2


class TestHierarchy:
    @pytest.mark.parametrize("name, g, w", named_fixtures(10), ids=lambda x: x if isinstance(x, str) else "")
    def test_monotone_on_fixtures(self, name, g, w):
        for l in range(1, 4):
            if is_l_iron(g, l).holds:
                assert is_l_robust(g, l).holds
            if is_l_robust(g, l).holds:
                assert is_l_robust(g, l - 1).holds

    def test_robustness_level(self):
        # {0,1} | {2,3,4} has crossing max degree 3, below the star cut's 4
        assert robustness_level(complete_graph(5)) == 2
        assert robustness_level(double_clique(8)[0]) == 0
        assert robustness_level(Graph(3, [(0, 1)])) == -1

    @pytest.mark.parametrize("name, g, w", named_fixtures(8), ids=lambda x: x if isinstance(x, str) else "")
    def test_blow_up_preserves_iron(self, name, g, w):
        for l in (1, 2):
            if is_l_iron(g, l).holds:
                assert is_l_iron(blow_up(g, 2), l).holds

    @pytest.mark.parametrize("name, g, w", named_fixtures(12), ids=lambda x: x if isinstance(x, str) else "")
    def test_robust_vt_is_iron_at_small_level(self, name, g, w):
        alpha = Fraction(g.valency, g.n)
        mu_n = robustness_level(g)
        if mu_n < 0:
            pytest.skip("disconnected")
        exp = Fraction(2) ** (2 / alpha)
        lam_n = min(alpha * g.n / (8 * exp), Fraction(mu_n) / (4 * exp))
        assert is_l_iron(g, math.floor(lam_n), 12).holds


class TestCodegCandidates:
    def test_double_clique_20(self):
        g, _ = double_clique(20)
        assert codeg_threshold(Fraction(1, 2), 20) == 5
        cands = codeg_island_candidates(g, Fraction(1, 2))
        assert cands == [[list(range(20))], [list(range(10)), list(range(10, 20))]]

    def test_k6(self):
        assert codeg_island_candidates(complete_graph(6), Fraction(1, 2)) == [[list(range(6))]]

    def test_empty_bell(self):
        cands = codeg_island_candidates(empty_graph(4), Fraction(1))
        assert len(cands) == 15 and len({str(c) for c in cands}) == 15

    def test_cap(self):
        with pytest.raises(CapacityError):
            codeg_island_candidates(empty_graph(13), Fraction(1))

    def test_component_bound(self):
        with pytest.raises(HypothesisError):
            # 21 components exceed 20 / alpha^2; checked before any grouping is built
            codeg_island_candidates(empty_graph(21), Fraction(1), cap=30)

    @pytest.mark.parametrize(
        "make",
        [
            lambda: double_clique(10),
            lambda: double_clique(12),
            lambda: double_clique(16),
            lambda: circulant(12, {1, 2, 3}),
            lambda: circulant(16, {1, 2, 3}),
            lambda: circulant(9, {1, 3}),
            lambda: fixture("k_n(6)"),
            lambda: fixture("k_nn(4)"),
        ],
    )
    def test_components_refine_islands(self, make):
        g, _ = make()
        alpha = Fraction(g.min_degree(), g.n)
        level = decomposition_level(alpha, g.n)
        isl = islands(g, level).blocks
        f = codeg_graph(g, codeg_threshold(alpha, g.n))
        for comp in f.components():
            assert any(set(members(comp)) <= set(b) for b in isl)

    @pytest.mark.parametrize(
        "make", [lambda: double_clique(8), lambda: fixture("petersen"), lambda: fixture("q3")], ids=["dc8", "petersen", "q3"]
    )
    def test_components_too_coarse_on_small_sparse_inputs(self, make):
        # documented counterexamples: at these sizes the codeg threshold is 1 or 2,
        # low enough to join vertices that the exact islands keep apart
        g, _ = make()
        alpha = Fraction(g.min_degree(), g.n)
        assert codeg_threshold(alpha, g.n) <= 2
        isl = islands(g, decomposition_level(alpha, g.n)).blocks
        comps = [members(c) for c in codeg_graph(g, codeg_threshold(alpha, g.n)).components()]
        assert not all(any(set(c) <= set(b) for b in isl) for c in comps)


class TestDecomposition:
    def test_double_clique(self):
        d = robust_decomposition(double_clique(8)[0], Fraction(1, 2))
        assert d.blocks == [[0, 1, 2, 3], [4, 5, 6, 7]] and d.isomorphism == "exact"
        assert d.history[0].level == 1 and not d.history[0].robust

    def test_k6(self):
        d = robust_decomposition(complete_graph(6), Fraction(1, 2))
        assert d.blocks == [list(range(6))] and d.isomorphism == "single"

    def test_c8_sparse(self):
        with pytest.raises(DecompositionError) as info:
            robust_decomposition(cycle_graph(8), Fraction(1, 8))
        assert info.value.step == 0

    def test_valency_precondition(self):
        with pytest.raises(HypothesisError):
            robust_decomposition(cycle_graph(8), Fraction(1, 2))

    def test_chained_cliques(self):
        from vthamilton.instances import chained_cliques

        d = robust_decomposition(chained_cliques()[0], Fraction(1, 3))
        assert d.blocks == [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]]
        assert d.to_json()["history"][0]["split_into"] == d.blocks


class TestNonIron:
    def test_constructed_witness(self):
        r = non_iron_fixture()
        rho = Fraction(1, 36)
        c = construct_non_iron_witness(r, [0], [1], range(2, 7), range(7, 12), rho)
        assert c.removed == (0,) and c.deleted_edges == ((1, 2), (1, 7), (1, 8))
        assert non_iron_witness_check(r, [0], [1], range(2, 7), range(7, 12), rho)
        # independent confirmation: not 2 sqrt(rho) k' = 4 iron
        assert not is_l_iron(r, 4).holds

    def test_empty_w2(self):
        with pytest.raises(HypothesisError) as info:
            non_iron_witness_check(non_iron_fixture(), [0], [1], range(2, 7), [], Fraction(1, 36))
        assert info.value.hypothesis == "w_size"

    def test_complete_graph(self):
        with pytest.raises(HypothesisError) as info:
            non_iron_witness_check(complete_graph(12), [0], [1, 2], range(3, 7), range(7, 12), Fraction(1, 36))
        assert info.value.hypothesis == "l2_edges"


class TestDigraphs:
    def test_directed_cycle(self):
        d = Digraph.directed_cycle(5)
        assert is_l_strongly_connected(d, 0) and not is_l_strongly_connected(d, 1)

    def test_bidirected(self):
        assert is_l_strongly_connected(Digraph.bidirected(complete_graph(4)), 2)
        assert is_l_strongly_connected(Digraph.bidirected(cycle_graph(6)), 1)

    def test_short_path_examples(self):
        assert len(short_path(Digraph.bidirected(cycle_graph(6)), 2, 0, 3)) - 1 == 3
        assert short_path(Digraph.bidirected(complete_graph(4)), 3, 1, 2) == [1, 2]
        assert short_path(Digraph.directed_cycle(5), 1, 0, 4) == [0, 1, 2, 3, 4]

    def test_no_path(self):
        with pytest.raises(HypothesisError):
            short_path(Digraph(3, [(0, 1)]), 1, 1, 0)

    def test_bound_violation_is_internal_error(self):
        # a directed path is not 2-strongly connected, so the bound may fail
        with pytest.raises(InternalConsistencyError):
            short_path(Digraph(6, [(i, i + 1) for i in range(5)]), 3, 0, 5)

    def test_against_networkx(self, rng):
        for _ in range(40):
            n = rng.randint(3, 7)
            arcs = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.5]
            d = Digraph(n, arcs)
            for l in (0, 1, 2):
                expected = True
                for k in range(l + 1):
                    for u in itertools.combinations(range(n), k):
                        h = nx.DiGraph()
                        h.add_nodes_from(v for v in range(n) if v not in u)
                        h.add_edges_from((a, b) for a, b in arcs if a not in u and b not in u)
                        if h.number_of_nodes() and not nx.is_strongly_connected(h):
                            expected = False
                assert is_l_strongly_connected(d, l) == expected
