import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import to_nx
from vthamilton.errors import GraphFormatError
from vthamilton.graph import (
    Digraph,
    Graph,
    are_isomorphic,
    blow_up,
    codeg_graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    empty_graph,
    find_isomorphism,
    induced,
    mask_of,
    max_cross_degree,
    members,
    path_graph,
    relabel,
    set_partitions,
)
from vthamilton.instances import circulant, double_clique, fixture, petersen


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, chosen)


class TestGraphType:
    def test_rejects_loops_and_duplicates(self):
        with pytest.raises(ValueError):
            Graph(3, [(0, 0)])
        with pytest.raises(ValueError):
            Graph(3, [(0, 1), (1, 0)])
        with pytest.raises(ValueError):
            Graph(3, [(0, 3)])

    @given(graphs())
    def test_adjacency_consistent(self, g):
        for v in range(g.n):
            assert list(g.adj[v]) == sorted(g.adj[v])
            assert g.degree(v) == len(g.adj[v])
            for w in g.adj[v]:
                assert g.has_edge(v, w) and g.has_edge(w, v)
        assert sum(g.degrees()) == 2 * g.m

    def test_mask_helpers(self):
        assert members(mask_of([5, 0, 3])) == [0, 3, 5]

    @given(graphs())
    def test_components_match_networkx(self, g):
        ours = sorted(sorted(members(c)) for c in g.components())
        theirs = sorted(sorted(c) for c in nx.connected_components(to_nx(g)))
        assert ours == theirs
        assert g.is_bipartite() == nx.is_bipartite(to_nx(g))


class TestTextFormat:
    @given(graphs())
    def test_round_trip(self, g):
        assert Graph.from_text(g.to_text()) == g

    @pytest.mark.parametrize(
        "text, line",
        [
            ("3 1\n0 0\n", 2),
            ("3 2\n0 1\n1 0\n", 3),
            ("3 1\n0 5\n", 2),
            ("3 2\n0 1\n", 1),
            ("x y\n", 1),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(GraphFormatError) as info:
            Graph.from_text(text)
        assert info.value.line == line

    def test_comments_ignored(self):
        g = Graph.from_text("# triangle\n3 3\n0 1\n1 2 # edge\n0 2\n")
        assert g == complete_graph(3)

    def test_dot_export(self):
        dot = cycle_graph(4).to_dot(groups=[[0, 1]], highlight=[(0, 1)], emphasis=[(2, 3)])
        assert dot.startswith("graph G {")
        assert "0 -- 1 [penwidth=3];" in dot
        assert "2 -- 3 [penwidth=3, color=red];" in dot


class TestBlowUp:
    def test_k2_gives_c4(self):
        assert are_isomorphic(blow_up(complete_graph(2), 2), cycle_graph(4))

    def test_c5(self):
        b = blow_up(cycle_graph(5), 2)
        assert b.n == 10 and b.m == 20 and b.valency == 4

    @given(graphs(max_n=6))
    def test_factor_one_is_identity(self, g):
        assert blow_up(g, 1) == g

    def test_classes_independent(self):
        b = blow_up(complete_graph(4), 3)
        for v in range(4):
            assert b.edges_within(mask_of(range(3 * v, 3 * v + 3))) == 0

    @settings(max_examples=40, deadline=None)
    @given(graphs(max_n=4), st.sampled_from([(1, 2), (2, 2), (1, 3), (2, 1)]))
    def test_composition(self, g, ab):
        a, b = ab
        lhs = blow_up(g, a * b)
        rhs = blow_up(blow_up(g, a), b)
        assert nx.is_isomorphic(to_nx(lhs), to_nx(rhs))

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            blow_up(complete_graph(2), 0)


class TestCodeg:
    def test_petersen_one_is_complement(self):
        p = petersen()
        assert codeg_graph(p, 1) == Graph(10, nx.complement(to_nx(p)).edges)

    def test_k4(self):
        assert codeg_graph(complete_graph(4), 2) == complete_graph(4)

    def test_c6_two_triangles(self):
        c = codeg_graph(cycle_graph(6), 1)
        assert c == Graph(6, [(0, 2), (2, 4), (0, 4), (1, 3), (3, 5), (1, 5)])

    @given(graphs())
    def test_extremes(self, g):
        assert codeg_graph(g, 0) == complete_graph(g.n)
        assert codeg_graph(g, g.n).m == 0

    @pytest.mark.parametrize("name", ["petersen", "coxeter", "q3", "k_n", "k_nn", "c_n"])
    def test_degree_bound_on_vt_fixtures(self, name):
        g, _ = fixture(name)
        d, n = g.valency, g.n
        for k in range(d + 1):
            assert codeg_graph(g, k).min_degree() >= -(-d * d // n) - k


class TestCrossDegree:
    def test_double_clique(self):
        g, _ = double_clique(8)
        assert max_cross_degree(g, range(4), range(4, 8)) == 1

    def test_star_cut(self):
        assert max_cross_degree(complete_graph(4), [0], [1, 2, 3]) == 3

    def test_empty(self):
        assert max_cross_degree(empty_graph(4), [0, 1], [2, 3]) == 0

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            max_cross_degree(complete_graph(4), [0, 1], [1, 2])

    @given(graphs(), st.data())
    def test_bound(self, g, data):
        side = data.draw(st.lists(st.booleans(), min_size=g.n, max_size=g.n))
        a = [v for v in range(g.n) if side[v]]
        b = [v for v in range(g.n) if not side[v]]
        # a vertex on one side sees at most the whole other side
        assert max_cross_degree(g, a, b) <= min(max(len(a), len(b)), g.max_degree())


class TestInduced:
    def test_k4(self):
        assert induced(complete_graph(4), [0, 1, 2]).graph == complete_graph(3)

    def test_c5_path(self):
        assert induced(cycle_graph(5), [0, 1, 2]).graph == path_graph(3)

    def test_petersen_outer(self):
        sub = induced(petersen(), range(5))
        assert sub.graph == cycle_graph(5)
        assert sub.to_original([0, 4]) == [0, 4]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            induced(complete_graph(3), [])


class TestIsomorphism:
    @settings(max_examples=60, deadline=None)
    @given(graphs(max_n=7), st.randoms(use_true_random=False))
    def test_relabelled_copies_are_isomorphic(self, g, r):
        perm = list(range(g.n))
        r.shuffle(perm)
        h = relabel(g, perm)
        phi = find_isomorphism(g, h)
        assert phi is not None
        assert all(h.has_edge(phi[u], phi[v]) for u, v in g.edges)

    @settings(max_examples=60, deadline=None)
    @given(graphs(max_n=6), graphs(max_n=6))
    def test_agrees_with_networkx(self, g, h):
        assert are_isomorphic(g, h) == nx.is_isomorphic(to_nx(g), to_nx(h))

    def test_set_partitions_count_bell(self):
        assert [sum(1 for _ in set_partitions(list(range(k)))) for k in range(6)] == [1, 1, 2, 5, 15, 52]


class TestDigraph:
    def test_antiparallel_allowed_loops_rejected(self):
        d = Digraph(2, [(0, 1), (1, 0)])
        assert d.has_arc(0, 1) and d.has_arc(1, 0)
        with pytest.raises(ValueError):
            Digraph(2, [(0, 0)])

    def test_strong_connectivity(self):
        assert Digraph.directed_cycle(5).is_strongly_connected()
        assert not Digraph(3, [(0, 1), (1, 2)]).is_strongly_connected()
        assert Digraph.bidirected(complete_bipartite(2, 3)).is_strongly_connected()

    def test_against_networkx(self, rng):
        for _ in range(50):
            n = rng.randint(2, 8)
            arcs = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.3]
            d = Digraph(n, arcs)
            h = nx.DiGraph()
            h.add_nodes_from(range(n))
            h.add_edges_from(arcs)
            assert d.is_strongly_connected() == nx.is_strongly_connected(h)
            assert members(d.reach(0, (1 << n) - 1)) == sorted(nx.descendants(h, 0) | {0})
