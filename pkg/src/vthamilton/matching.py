"""Fractional matchings and fractional vertex covers.

Both optima are obtained from one maximum matching in the bipartite double
cover (vertex ``v`` becomes ``v'`` on the left and ``v''`` on the right, edge
``uv`` becomes ``u'v''`` and ``v'u''``).  Folding the matching gives a
half-integral fractional matching; folding a Konig cover of the double cover
gives a half-integral fractional cover of the same total weight.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import HypothesisError
from .graph import Edge, Graph
from .instances import AutomorphismWitness, verify_witness

HALF = Fraction(1, 2)


# bipartite matching ------------------------------------------------------

def max_bipartite_matching(
    n_left: int, n_right: int, adj: Sequence[Sequence[int]]
) -> tuple[list[int], list[int]]:
    """Maximum matching by augmenting paths (Kuhn), trying left vertices and
    their neighbours in ascending order.  Returns ``(match_left, match_right)``
    with ``-1`` for unmatched vertices."""
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    nbrs = [sorted(a) for a in adj]

    def augment(root: int) -> bool:
        # iterative DFS so that long augmenting paths do not hit the recursion limit
        seen = [False] * n_right
        stack = [(root, iter(nbrs[root]))]
        path: list[tuple[int, int]] = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                if seen[v]:
                    continue
                seen[v] = True
                if match_r[v] < 0:
                    path.append((u, v))
                    for a, b in path:
                        match_l[a] = b
                        match_r[b] = a
                    return True
                path.append((u, v))
                stack.append((match_r[v], iter(nbrs[match_r[v]])))
                advanced = True
                break
            if not advanced:
                stack.pop()
                if path:
                    path.pop()
        return False

    for u in range(n_left):
        augment(u)
    return match_l, match_r


def konig_cover(
    n_left: int, n_right: int, adj: Sequence[Sequence[int]], match_l: Sequence[int], match_r: Sequence[int]
) -> tuple[set[int], set[int]]:
    """Minimum vertex cover ``(left part, right part)`` from a maximum matching."""
    z_left = {u for u in range(n_left) if match_l[u] < 0}
    z_right: set[int] = set()
    queue = deque(sorted(z_left))
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v in z_right:
                continue
            z_right.add(v)
            w = match_r[v]
            if w >= 0 and w not in z_left:
                z_left.add(w)
                queue.append(w)
    return set(range(n_left)) - z_left, z_right


def bipartite_matching_between(g: Graph, a: Iterable[int], b: Iterable[int]) -> list[Edge]:
    """Maximum matching of ``G[A, B]`` as edges ``(x, y)`` with ``x in A``, sorted by ``x``."""
    left = sorted(a)
    right = sorted(b)
    pos_r = {v: i for i, v in enumerate(right)}
    adj = [[pos_r[w] for w in g.adj[u] if w in pos_r] for u in left]
    ml, _ = max_bipartite_matching(len(left), len(right), adj)
    return [(left[i], right[j]) for i, j in enumerate(ml) if j >= 0]


# fractional matching -----------------------------------------------------

@dataclass(frozen=True)
class FractionalMatching:
    """Edge weights (only nonzero ones are stored).  Weights are exact
    fractions; optimal witnesses are half-integral, projections may not be."""

    weights: Mapping[Edge, Fraction]

    def __post_init__(self):
        clean = {}
        for (u, v), w in self.weights.items():
            w = Fraction(w)
            if w < 0:
                raise ValueError(f"negative weight on {(u, v)}")
            if w:
                clean[(u, v) if u < v else (v, u)] = w
        object.__setattr__(self, "weights", dict(sorted(clean.items())))

    @property
    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def weight(self, u: int, v: int) -> Fraction:
        return self.weights.get((u, v) if u < v else (v, u), Fraction(0))

    def load(self, v: int) -> Fraction:
        return sum((w for e, w in self.weights.items() if v in e), Fraction(0))

    def is_half_integral(self) -> bool:
        return all(w in (HALF, 1) for w in self.weights.values())

    def is_feasible(self, g: Graph) -> bool:
        if any(not g.has_edge(u, v) for u, v in self.weights):
            return False
        loads = [Fraction(0)] * g.n
        for (u, v), w in self.weights.items():
            loads[u] += w
            loads[v] += w
        return all(x <= 1 for x in loads)

    def doubled(self) -> dict[Edge, int]:
        if not self.is_half_integral():
            raise ValueError("matching is not half-integral")
        return {e: int(2 * w) for e, w in self.weights.items()}

    def to_json(self) -> dict:
        d = self.doubled()
        return {"edges": [[u, v, w] for (u, v), w in d.items()], "total_doubled": sum(d.values())}

    @classmethod
    def from_json(cls, data: dict) -> "FractionalMatching":
        fm = cls({(int(u), int(v)): Fraction(int(w), 2) for u, v, w in data["edges"]})
        if "total_doubled" in data and int(2 * fm.total) != int(data["total_doubled"]):
            raise ValueError("total_doubled does not match the edge weights")
        return fm


@dataclass(frozen=True)
class FractionalCover:
    values: tuple[Fraction, ...]

    @property
    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def is_feasible(self, g: Graph) -> bool:
        if any(not 0 <= x <= 1 for x in self.values):
            return False
        return all(self.values[u] + self.values[v] >= 1 for u, v in g.edges)


def _double_cover(g: Graph):
    adj = [list(g.adj[v]) for v in range(g.n)]
    ml, mr = max_bipartite_matching(g.n, g.n, adj)
    return adj, ml, mr


def nu_star(g: Graph) -> tuple[Fraction, FractionalMatching]:
    """Maximum fractional matching value with a half-integral optimal witness."""
    _, ml, _ = _double_cover(g)
    weights: dict[Edge, Fraction] = {}
    for u, v in enumerate(ml):
        if v >= 0:
            e = (u, v) if u < v else (v, u)
            weights[e] = weights.get(e, Fraction(0)) + HALF
    fm = FractionalMatching(weights)
    return fm.total, fm


def fvc(g: Graph) -> tuple[Fraction, FractionalCover]:
    """Minimum fractional vertex cover with a half-integral optimal witness."""
    adj, ml, mr = _double_cover(g)
    cl, cr = konig_cover(g.n, g.n, adj, ml, mr)
    vals = tuple(Fraction((v in cl) + (v in cr), 2) for v in range(g.n))
    cover = FractionalCover(vals)
    return cover.total, cover


# lifting and projecting --------------------------------------------------

def _half_components(n: int, half_edges: list[Edge]) -> list[tuple[list[int], bool]]:
    """Split the half-weight support into paths and cycles.  Returns vertex
    sequences with a cycle flag, ordered by smallest vertex; a path starts at
    its smaller end, a cycle at its smallest vertex heading to the smaller neighbour."""
    nb: dict[int, list[int]] = {}
    for u, v in half_edges:
        nb.setdefault(u, []).append(v)
        nb.setdefault(v, []).append(u)
    for v, lst in nb.items():
        if len(lst) > 2:
            raise ValueError(f"vertex {v} carries {len(lst)} half-weight edges")
        lst.sort()
    seen: set[int] = set()
    out = []
    for start in sorted(nb):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in nb[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        ends = sorted(v for v in comp if len(nb[v]) == 1)
        cyclic = not ends
        first = min(comp) if cyclic else ends[0]
        seq = [first]
        prev, cur = None, first
        while True:
            nxt = [y for y in nb[cur] if y != prev]
            if not nxt:
                break
            y = nxt[0]
            if y == first:
                break
            seq.append(y)
            prev, cur = cur, y
        out.append((seq, cyclic))
    return out


def lift_blowup_matching(h: Graph, m: FractionalMatching) -> list[Edge]:
    """Integral matching of size ``2 * total(m)`` in ``blow_up(h, 2)``.

    Copy ``s`` (1 or 2) of vertex ``v`` is ``2v + s - 1``.  Weight-1 edges
    become both parallel copies.  Along each half-weight path ``v_1 .. v_r``
    take ``v_j^s v_{j+1}^s`` whenever ``j + s`` is even; a half-weight cycle is
    closed by ``v_r^1 v_1^2`` (odd ``r``) or ``v_r^2 v_1^2`` (even ``r``).
    """
    if not m.is_half_integral():
        raise ValueError("matching must be half-integral")
    if not m.is_feasible(h):
        raise ValueError("matching is not feasible on the graph")

    def copy(v: int, s: int) -> int:
        return 2 * v + s - 1

    out: list[Edge] = []
    half = []
    for (u, v), w in m.weights.items():
        if w == 1:
            out += [(copy(u, 1), copy(v, 1)), (copy(u, 2), copy(v, 2))]
        else:
            half.append((u, v))
    for seq, cyclic in _half_components(h.n, half):
        r = len(seq)
        for j in range(1, r):
            s = 1 if j % 2 else 2  # j + s even
            out.append((copy(seq[j - 1], s), copy(seq[j], s)))
        if cyclic:
            s_last = 1 if r % 2 else 2
            out.append((copy(seq[-1], s_last), copy(seq[0], 2)))
    out = sorted((a, b) if a < b else (b, a) for a, b in out)
    used = [x for e in out for x in e]
    if len(used) != len(set(used)) or len(out) != 2 * m.total:
        raise AssertionError("lifted edge set is not a matching of the expected size")
    return out


def project_matching(
    g_tilde: Graph,
    class_of: Sequence[int],
    r_tilde: Graph,
    m_size: int,
    m: FractionalMatching,
) -> FractionalMatching:
    """Push a fractional matching of a subgraph of ``m_size x R`` down to ``R``:
    ``M_R(AB) = (1/m_size) * sum of M(ab)`` over ``a in A``, ``b in B``."""
    if len(class_of) != g_tilde.n:
        raise ValueError("class map must cover every vertex")
    counts: dict[int, int] = {}
    for v, c in enumerate(class_of):
        if not 0 <= c < r_tilde.n:
            raise ValueError(f"vertex {v} mapped outside the reduced graph")
        counts[c] = counts.get(c, 0) + 1
        if counts[c] > m_size:
            raise ValueError(f"class {c} holds more than {m_size} vertices")
    for u, v in g_tilde.edges:
        a, b = class_of[u], class_of[v]
        if a == b or not r_tilde.has_edge(a, b):
            raise ValueError(f"edge {(u, v)} does not lie over an edge of the reduced graph")
    if not m.is_feasible(g_tilde):
        raise ValueError("matching is not feasible on the subgraph")
    acc: dict[Edge, Fraction] = {}
    for (u, v), w in m.weights.items():
        a, b = class_of[u], class_of[v]
        key = (a, b) if a < b else (b, a)
        acc[key] = acc.get(key, Fraction(0)) + w
    return FractionalMatching({e: w / m_size for e, w in acc.items()})


def cover_after_deletion_check(
    g: Graph, w: AutomorphismWitness, g_prime: Graph, delta: Fraction
) -> bool:
    """Does ``fvc(G') >= (1 - delta) fvc(G)`` hold for a spanning subgraph
    ``G'`` that keeps at least a ``1 - delta`` share of the edges?"""
    delta = Fraction(delta)
    if g_prime.n != g.n or not g_prime.edges <= g.edges:
        raise ValueError("g_prime is not a spanning subgraph of g")
    if not verify_witness(g, w).transitive:
        raise HypothesisError("vertex_transitive", "witness does not certify transitivity")
    if g_prime.m < (1 - delta) * g.m:
        raise HypothesisError("edge_share", f"{g_prime.m} < (1 - {delta}) * {g.m}")
    return fvc(g_prime)[0] >= (1 - delta) * fvc(g)[0]


def is_integral_matching(g: Graph, edges: Iterable[Edge]) -> bool:
    used: set[int] = set()
    for u, v in edges:
        if not g.has_edge(u, v) or u in used or v in used:
            return False
        used |= {u, v}
    return True
