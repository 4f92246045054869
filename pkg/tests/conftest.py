import itertools
import random

import networkx as nx
import pytest

from vthamilton.graph import Graph


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def brute_automorphisms(g: Graph) -> list[tuple[int, ...]]:
    """All automorphisms by permutation enumeration (small n only)."""
    out = []
    for p in itertools.permutations(range(g.n)):
        if all(g.has_edge(p[u], p[v]) for u, v in g.edges):
            out.append(p)
    return out


def brute_hamilton_cycle(g: Graph) -> list[int] | None:
    """Exhaustive search over permutations fixing vertex 0."""
    n = g.n
    if n < 3:
        return None
    for rest in itertools.permutations(range(1, n)):
        cyc = (0, *rest)
        if rest[0] > rest[-1]:
            continue
        if all(g.has_edge(cyc[i], cyc[(i + 1) % n]) for i in range(n)):
            return list(cyc)
    return None


def random_graphs(count: int, n_max: int, seed: int, n_min: int = 2, p_range=(0.2, 0.8)):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(n_min, n_max)
        p = rng.uniform(*p_range)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        out.append(Graph(n, edges))
    return out


@pytest.fixture
def rng():
    return random.Random(20240517)


def named_fixtures(max_n: int):
    """(name, graph, witness) for the fixture families with at most max_n vertices."""
    from vthamilton.instances import blow_up_instance, circulant, double_clique, fixture

    out = []
    for k in range(3, max_n + 1):
        out.append((f"k_{k}", *fixture("k_n", k)))
        out.append((f"c_{k}", *fixture("c_n", k)))
    for k in range(2, max_n // 2 + 1):
        out.append((f"k_{k}{k}", *fixture("k_nn", k)))
    for n in range(4, max_n + 1, 2):
        out.append((f"dc_{n}", *double_clique(n)))
    for n in range(7, max_n + 1):
        out.append((f"circ_{n}_123", *circulant(n, {1, 2, 3})))
    if max_n >= 8:
        out.append(("q3", *fixture("q3")))
        out.append(("c4x2", *blow_up_instance(*circulant(4, {1}), 2)))
    if max_n >= 10:
        out.append(("petersen", *fixture("petersen")))
        out.append(("c5x2", *blow_up_instance(*circulant(5, {1}), 2)))
    return out


def random_connected_graphs(count: int, n_max: int, seed: int, n_min: int = 3):
    out = []
    rng = random.Random(seed)
    while len(out) < count:
        n = rng.randint(n_min, n_max)
        p = rng.uniform(0.25, 0.8)
        g = Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])
        if g.is_connected():
            out.append(g)
    return out


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
