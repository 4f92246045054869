"""Simple graphs and digraphs on dense integer vertices, with bitset adjacency.

Vertices are ``0..n-1``.  Every graph keeps one Python ``int`` per vertex as a
neighbourhood bitset, which is what the exhaustive engines elsewhere in the
package operate on.  Neighbour iteration is always in ascending label order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import GraphFormatError

Edge = tuple[int, int]


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def members(mask: int) -> list[int]:
    """Ascending list of the set bits of ``mask``."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple undirected graph on ``0..n-1``."""

    __slots__ = ("n", "edges", "masks", "adj")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        es = set()
        masks = [0] * n
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            key = _norm_edge(u, v)
            if key in es:
                raise ValueError(f"duplicate edge {key}")
            es.add(key)
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        self.n = n
        self.edges: frozenset[Edge] = frozenset(es)
        self.masks: tuple[int, ...] = tuple(masks)
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(members(m)) for m in masks)

    @classmethod
    def from_masks(cls, masks: Sequence[int]) -> "Graph":
        n = len(masks)
        edges = [(u, v) for u in range(n) for v in members(masks[u]) if u < v]
        return cls(n, edges)

    # basic queries -----------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.masks[u] >> v & 1)

    def deg_in(self, v: int, s: int) -> int:
        """``deg(v, S)`` for a vertex-set bitmask ``s``."""
        return (self.masks[v] & s).bit_count()

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    @property
    def valency(self) -> int | None:
        """Common degree if the graph is regular, else ``None``."""
        ds = set(self.degrees())
        if len(ds) == 1:
            return ds.pop()
        return 0 if not ds else None

    def edge_list(self) -> list[Edge]:
        return sorted(self.edges)

    def edges_within(self, s: int) -> int:
        return sum((self.masks[v] & s).bit_count() for v in members(s)) // 2

    def edges_between(self, a: int, b: int) -> int:
        return sum((self.masks[v] & b).bit_count() for v in members(a))

    # connectivity ------------------------------------------------------
    def component_of(self, v: int, within: int | None = None) -> int:
        allowed = self.full_mask if within is None else within
        seen = 1 << v
        frontier = seen
        while frontier:
            nxt = 0
            for u in members(frontier):
                nxt |= self.masks[u]
            nxt &= allowed & ~seen
            seen |= nxt
            frontier = nxt
        return seen

    def components(self, within: int | None = None) -> list[int]:
        """Connected components of ``G[within]`` as bitmasks, by smallest vertex."""
        rest = self.full_mask if within is None else within
        comps = []
        while rest:
            v = (rest & -rest).bit_length() - 1
            c = self.component_of(v, rest)
            comps.append(c)
            rest &= ~c
        return comps

    def is_connected(self, within: int | None = None) -> bool:
        return len(self.components(within)) <= 1

    def is_bipartite(self) -> bool:
        colour = [-1] * self.n
        for s in range(self.n):
            if colour[s] >= 0:
                continue
            colour[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self.adj[u]:
                    if colour[w] < 0:
                        colour[w] = 1 - colour[u]
                        queue.append(w)
                    elif colour[w] == colour[u]:
                        return False
        return True

    # dunder ------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    # serialisation -----------------------------------------------------
    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines += [f"{u} {v}" for u, v in self.edge_list()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        """Parse the ``n m`` header + ``u v`` edge-line format.

        Blank lines and ``#`` comments are ignored.  Errors carry the 1-based
        line number of the offending line.
        """
        rows = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                rows.append((lineno, line))
        if not rows:
            raise GraphFormatError("empty input")
        lineno, header = rows[0]
        parts = header.split()
        if len(parts) != 2:
            raise GraphFormatError("header must be 'n m'", lineno)
        try:
            n, m = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError("header must contain two integers", lineno) from None
        if n < 0 or m < 0:
            raise GraphFormatError("negative count in header", lineno)
        if len(rows) - 1 != m:
            raise GraphFormatError(f"header announces {m} edges, found {len(rows) - 1}", lineno)
        seen: set[Edge] = set()
        for lineno, line in rows[1:]:
            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError("edge line must be 'u v'", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError("edge endpoints must be integers", lineno) from None
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"endpoint out of range 0..{n - 1}", lineno)
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}", lineno)
            key = _norm_edge(u, v)
            if key in seen:
                raise GraphFormatError(f"duplicate edge {key[0]} {key[1]}", lineno)
            seen.add(key)
        return cls(n, seen)

    def to_dot(
        self,
        name: str = "G",
        groups: Sequence[Iterable[int]] | None = None,
        highlight: Iterable[Sequence[int]] = (),
        emphasis: Iterable[Sequence[int]] = (),
    ) -> str:
        """Graphviz source.  ``groups`` colours vertex blocks, ``highlight``
        draws edges bold, ``emphasis`` draws edges bold and red."""
        palette = ["lightblue", "palegreen", "khaki", "lightpink", "plum",
                   "lightsalmon", "lightcyan", "wheat", "thistle", "honeydew"]
        colour: dict[int, str] = {}
        for i, block in enumerate(groups or ()):
            for v in block:
                colour[v] = palette[i % len(palette)]
        bold = {_norm_edge(*e) for e in highlight}
        red = {_norm_edge(*e) for e in emphasis}
        out = [f"graph {name} {{"]
        for v in range(self.n):
            attr = f' [style=filled, fillcolor="{colour[v]}"]' if v in colour else ""
            out.append(f"  {v}{attr};")
        for u, v in self.edge_list():
            if (u, v) in red:
                out.append(f"  {u} -- {v} [penwidth=3, color=red];")
            elif (u, v) in bold:
                out.append(f"  {u} -- {v} [penwidth=3];")
            else:
                out.append(f"  {u} -- {v};")
        out.append("}")
        return "\n".join(out) + "\n"


class Digraph:
    """Immutable digraph without loops or repeated arcs; antiparallel arcs are allowed."""

    __slots__ = ("n", "arcs", "out_masks", "in_masks")

    def __init__(self, n: int, arcs: Iterable[Sequence[int]] = ()):
        out_m = [0] * n
        in_m = [0] * n
        seen = set()
        for a in arcs:
            u, v = int(a[0]), int(a[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"arc ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"loop at {u}")
            if (u, v) in seen:
                raise ValueError(f"duplicate arc {(u, v)}")
            seen.add((u, v))
            out_m[u] |= 1 << v
            in_m[v] |= 1 << u
        self.n = n
        self.arcs: frozenset[Edge] = frozenset(seen)
        self.out_masks = tuple(out_m)
        self.in_masks = tuple(in_m)

    @classmethod
    def bidirected(cls, g: Graph) -> "Digraph":
        return cls(g.n, [a for u, v in g.edges for a in ((u, v), (v, u))])

    @classmethod
    def directed_cycle(cls, n: int) -> "Digraph":
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    def successors(self, v: int) -> list[int]:
        return members(self.out_masks[v])

    def has_arc(self, u: int, v: int) -> bool:
        return bool(self.out_masks[u] >> v & 1)

    def reach(self, v: int, within: int, forward: bool = True) -> int:
        step = self.out_masks if forward else self.in_masks
        seen = 1 << v
        frontier = seen
        while frontier:
            nxt = 0
            for u in members(frontier):
                nxt |= step[u]
            nxt &= within & ~seen
            seen |= nxt
            frontier = nxt
        return seen

    def is_strongly_connected(self, within: int | None = None) -> bool:
        allowed = (1 << self.n) - 1 if within is None else within
        if allowed.bit_count() <= 1:
            return True
        v = (allowed & -allowed).bit_length() - 1
        return self.reach(v, allowed, True) == allowed and self.reach(v, allowed, False) == allowed

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Digraph) and self.n == other.n and self.arcs == other.arcs

    def __hash__(self) -> int:
        return hash((self.n, self.arcs))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, arcs={len(self.arcs)})"


# standard families -------------------------------------------------------

def complete_graph(n: int) -> Graph:
    return Graph(n, combinations(range(n), 2))


def empty_graph(n: int) -> Graph:
    return Graph(n)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


# constructions -----------------------------------------------------------

def blow_up(g: Graph, l: int) -> Graph:
    """The ``l``-blow-up: vertex ``v`` becomes the independent class
    ``{v*l, ..., v*l + l - 1}`` and each edge a complete bipartite graph."""
    if l < 1:
        raise ValueError("blow-up factor must be at least 1")
    edges = [
        (u * l + i, v * l + j)
        for u, v in g.edge_list()
        for i in range(l)
        for j in range(l)
    ]
    return Graph(g.n * l, edges)


def codeg_graph(g: Graph, k: int) -> Graph:
    """Join distinct ``u, v`` whenever they have at least ``k`` common neighbours."""
    if k < 0:
        raise ValueError("codegree threshold must be non-negative")
    ms = g.masks
    edges = [
        (u, v)
        for u in range(g.n)
        for v in range(u + 1, g.n)
        if (ms[u] & ms[v]).bit_count() >= k
    ]
    return Graph(g.n, edges)


def max_cross_degree(g: Graph, a: Iterable[int], b: Iterable[int]) -> int:
    """Maximum degree of the bipartite graph ``G[A, B]``."""
    am, bm = mask_of(a), mask_of(b)
    if am & bm:
        raise ValueError("invalid cut: the two sides overlap")
    return _cross_max(g, am, bm)


def _cross_max(g: Graph, am: int, bm: int) -> int:
    best = 0
    for v in members(am):
        best = max(best, (g.masks[v] & bm).bit_count())
    for v in members(bm):
        best = max(best, (g.masks[v] & am).bit_count())
    return best


@dataclass(frozen=True)
class InducedSubgraph:
    graph: Graph
    labels: tuple[int, ...]  # labels[i] is the original vertex of new vertex i

    def to_original(self, vs: Iterable[int]) -> list[int]:
        return [self.labels[v] for v in vs]

    def index(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.labels)}


def induced(g: Graph, s: Iterable[int]) -> InducedSubgraph:
    labels = tuple(sorted(set(s)))
    if not labels:
        raise ValueError("cannot induce on an empty vertex set")
    if labels[0] < 0 or labels[-1] >= g.n:
        raise ValueError("vertex set is not contained in V(G)")
    pos = {v: i for i, v in enumerate(labels)}
    edges = [(pos[u], pos[v]) for u, v in g.edges if u in pos and v in pos]
    return InducedSubgraph(Graph(len(labels), edges), labels)


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Image of ``g`` under the vertex map ``v -> perm[v]``."""
    return Graph(g.n, [(perm[u], perm[v]) for u, v in g.edges])


# isomorphism -------------------------------------------------------------

def _search_order(g: Graph, first: int | None) -> list[int]:
    order: list[int] = []
    seen = [False] * g.n
    starts = ([first] if first is not None else []) + sorted(
        range(g.n), key=lambda v: (-g.degree(v), v)
    )
    for s in starts:
        if seen[s]:
            continue
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            order.append(u)
            for w in g.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return order


def find_isomorphism(
    g: Graph, h: Graph, fixed: dict[int, int] | None = None
) -> list[int] | None:
    """Exact backtracking search for a bijection ``phi`` with ``uv in E(g)``
    iff ``phi(u)phi(v) in E(h)``.  ``fixed`` prescribes some images."""
    if g.n != h.n or g.m != h.m or sorted(g.degrees()) != sorted(h.degrees()):
        return None
    n = g.n
    fixed = dict(fixed or {})
    for u, v in fixed.items():
        if g.degree(u) != h.degree(v):
            return None
    first = next(iter(fixed), None)
    order = _search_order(g, first)
    parent: dict[int, int | None] = {}
    placed = 0
    for v in order:
        prior = g.masks[v] & placed
        parent[v] = members(prior)[0] if prior else None
        placed |= 1 << v
    phi = [-1] * n
    used_h = 0
    mapped_g = 0

    def image(mask: int) -> int:
        out = 0
        for u in members(mask):
            out |= 1 << phi[u]
        return out

    def consistent(v: int, c: int) -> bool:
        return image(g.masks[v] & mapped_g) == (h.masks[c] & used_h)

    def rec(idx: int) -> bool:
        nonlocal used_h, mapped_g
        if idx == n:
            return True
        v = order[idx]
        if v in fixed:
            cands = [fixed[v]] if not used_h >> fixed[v] & 1 else []
        elif parent[v] is not None:
            cands = members(h.masks[phi[parent[v]]] & ~used_h)
        else:
            cands = members(((1 << n) - 1) & ~used_h)
        dv = g.degree(v)
        for c in cands:
            if h.degree(c) != dv or not consistent(v, c):
                continue
            phi[v] = c
            used_h |= 1 << c
            mapped_g |= 1 << v
            if rec(idx + 1):
                return True
            phi[v] = -1
            used_h &= ~(1 << c)
            mapped_g &= ~(1 << v)
        return False

    return list(phi) if rec(0) else None


def are_isomorphic(g: Graph, h: Graph) -> bool:
    return find_isomorphism(g, h) is not None


def fingerprint(g: Graph) -> tuple:
    """Isomorphism invariant: degree sequence plus the multiset of codegrees."""
    ms = g.masks
    codeg = sorted(
        (g.has_edge(u, v), (ms[u] & ms[v]).bit_count())
        for u in range(g.n)
        for v in range(u + 1, g.n)
    )
    return (g.n, g.m, tuple(sorted(g.degrees())), tuple(codeg))


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions of ``items`` (restricted-growth order)."""
    items = list(items)
    if not items:
        yield []
        return

    def rec(i: int, blocks: list[list]) -> Iterator[list[list]]:
        if i == len(items):
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(items[i])
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([items[i]])
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(0, [])
