"""Almost-bipartite structure: exact distance to bipartiteness, the
vertex-moving local search, and checks on balanced bipartitions."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import CapacityError
from .graph import Graph, mask_of, members
from .instances import AutomorphismWitness

DISTANCE_LIMIT = 22
_CHUNK = 1 << 16


@dataclass(frozen=True)
class Bipartition:
    A: tuple[int, ...]
    B: tuple[int, ...]
    internal_edges: int
    cut_edges: int

    @classmethod
    def of(cls, g: Graph, a: Iterable[int]) -> "Bipartition":
        am = mask_of(a)
        bm = g.full_mask & ~am
        if am & ~g.full_mask:
            raise ValueError("side A is not contained in V(G)")
        internal = g.edges_within(am) + g.edges_within(bm)
        return cls(tuple(members(am)), tuple(members(bm)), internal, g.m - internal)

    @property
    def mask_a(self) -> int:
        return mask_of(self.A)

    @property
    def mask_b(self) -> int:
        return mask_of(self.B)

    def side_of(self, v: int) -> str:
        return "A" if v in self.A else "B"

    def to_json(self) -> dict:
        return {"A": list(self.A), "B": list(self.B), "internal": self.internal_edges, "cut": self.cut_edges}

    @classmethod
    def from_json(cls, data: dict) -> "Bipartition":
        return cls(tuple(data["A"]), tuple(data["B"]), int(data["internal"]), int(data["cut"]))


def check_bipartition(g: Graph, p: Bipartition) -> list[str]:
    """Reasons why ``p`` is not a consistent bipartition of ``g``."""
    problems = []
    a, b = set(p.A), set(p.B)
    if a & b:
        problems.append("sides overlap")
    if a | b != set(range(g.n)) or len(p.A) + len(p.B) != g.n:
        problems.append("sides do not partition V")
    if not problems:
        real = Bipartition.of(g, p.A)
        if (real.internal_edges, real.cut_edges) != (p.internal_edges, p.cut_edges):
            problems.append(
                f"counts are internal={real.internal_edges}, cut={real.cut_edges}; "
                f"claimed {p.internal_edges}, {p.cut_edges}"
            )
    return problems


def bipartiteness_distance(g: Graph, exact_limit: int = DISTANCE_LIMIT) -> tuple[int, Bipartition]:
    """``min (e(A) + e(B))`` over all bipartitions, with the first minimiser
    in the order of increasing ``A`` (as a bitmask, ``0 in A``)."""
    n = g.n
    if n > min(exact_limit, 31):
        raise CapacityError("bipartiteness distance", n, min(exact_limit, 31))
    if n <= 1:
        return 0, Bipartition.of(g, range(n))
    full = np.uint32((1 << n) - 1)
    adj = [np.uint32(m) for m in g.masks]
    total = 1 << (n - 1)
    best = (g.m + 1, 0)
    for start in range(0, total, _CHUNK):
        t = np.arange(start, min(start + _CHUNK, total), dtype=np.uint32)
        a = (t << np.uint32(1)) | np.uint32(1)
        b = full & ~a
        twice = np.zeros(len(t), dtype=np.int32)
        for v in range(n):
            in_a = ((a >> np.uint32(v)) & np.uint32(1)).astype(bool)
            twice += np.where(in_a, np.bitwise_count(adj[v] & a), np.bitwise_count(adj[v] & b))
        i = int(np.argmin(twice))
        if int(twice[i]) // 2 < best[0]:
            best = (int(twice[i]) // 2, int(a[i]))
    return best[0], Bipartition.of(g, members(best[1]))


def local_search_bipartition(g: Graph, start: Bipartition) -> Bipartition:
    """Move the lowest-labelled vertex with strictly more neighbours on its
    own side than across, until no such vertex remains.  Each move raises the
    cut size, so at most ``e(G)`` moves happen."""
    am = start.mask_a
    moves = 0
    while True:
        bm = g.full_mask & ~am
        for v in range(g.n):
            own, other = (am, bm) if am >> v & 1 else (bm, am)
            if (g.masks[v] & own).bit_count() > (g.masks[v] & other).bit_count():
                am ^= 1 << v
                moves += 1
                break
        else:
            break
        if moves > g.m:
            raise AssertionError("local search exceeded e(G) moves")
    return Bipartition.of(g, members(am))


def bfs_two_colouring(g: Graph) -> Bipartition:
    """Sides given by BFS-tree depth parity, one BFS per component."""
    colour = [-1] * g.n
    for s in range(g.n):
        if colour[s] >= 0:
            continue
        colour[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if colour[w] < 0:
                    colour[w] = 1 - colour[u]
                    queue.append(w)
    return Bipartition.of(g, [v for v in range(g.n) if colour[v] == 0])


def start_bipartition(g: Graph, exact_limit: int = DISTANCE_LIMIT) -> Bipartition:
    if g.n <= exact_limit:
        return bipartiteness_distance(g, exact_limit)[1]
    return bfs_two_colouring(g)


@dataclass
class BalancedReport:
    balanced: bool
    degree_ok: bool
    automorphisms_ok: bool
    threshold: int
    max_internal_degree: int
    sizes: tuple[int, int]
    failing_generators: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.balanced and self.degree_ok and self.automorphisms_ok

    def to_json(self) -> dict:
        return {
            "balanced": self.balanced,
            "degree_ok": self.degree_ok,
            "automorphisms_ok": self.automorphisms_ok,
            "threshold": self.threshold,
            "max_internal_degree": self.max_internal_degree,
            "sizes": list(self.sizes),
            "failing_generators": self.failing_generators,
        }


def verify_balanced_bipartition(g: Graph, w: AutomorphismWitness, p: Bipartition, c: Fraction) -> BalancedReport:
    """Check the three conclusions expected of an almost-bipartite
    vertex-transitive graph: equal sides, internal degrees at most
    ``floor(6 c^2 n)``, and every witness generator fixing or swapping the sides."""
    c = Fraction(c)
    if not 0 < c < Fraction(1, 17):
        raise ValueError("c must lie in (0, 1/17)")
    thr = math.floor(6 * c * c * g.n)
    am, bm = p.mask_a, p.mask_b
    internal = [(g.masks[v] & (am if am >> v & 1 else bm)).bit_count() for v in range(g.n)]
    max_int = max(internal, default=0)
    a_set = set(p.A)
    b_set = set(p.B)
    failing = []
    for i, perm in enumerate(w.generators):
        img = {perm[v] for v in p.A}
        if img != a_set and img != b_set:
            failing.append(i)
    return BalancedReport(
        len(p.A) == len(p.B),
        max_int <= thr,
        not failing,
        thr,
        max_int,
        (len(p.A), len(p.B)),
        failing,
    )


def cross_subgraph(g: Graph, p: Bipartition) -> Graph:
    am = p.mask_a
    return Graph(g.n, [(u, v) for u, v in g.edges if (am >> u & 1) != (am >> v & 1)])


def closeness_threshold(c: Fraction, n: int) -> int:
    """``ceil(c^4 n^2)``: a graph is treated as close to bipartite when its
    bipartiteness distance is strictly below this."""
    return math.ceil(Fraction(c) ** 4 * n * n)


def is_close_to_bipartite(g: Graph, c: Fraction, exact_limit: int = DISTANCE_LIMIT) -> tuple[bool, int, int, Bipartition]:
    dist, part = bipartiteness_distance(g, exact_limit)
    thr = closeness_threshold(c, g.n)
    return dist < thr, dist, thr, part
