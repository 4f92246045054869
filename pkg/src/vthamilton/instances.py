"""Vertex-transitive instances together with automorphism witnesses.

A witness is a list of generating permutations.  Transitivity is certified by
closing the orbit of vertex 0 under the generators; the group itself is never
materialised.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd
from typing import Sequence

import numpy as np

from .graph import Graph, blow_up, find_isomorphism

Permutation = tuple[int, ...]

GROUP_ELEMENT_CAP = 10**6


class CayleySpecError(ValueError):
    """Invalid Cayley data.  ``code`` is one of ``shape``, ``not_group``,
    ``identity_in_connection_set``, ``not_inverse_closed``, ``bad_element``,
    ``order_mismatch``."""

    def __init__(self, code: str, detail: str):
        super().__init__(f"{code}: {detail}")
        self.code = code


@dataclass(frozen=True)
class AutomorphismWitness:
    generators: tuple[Permutation, ...]

    def __init__(self, generators: Sequence[Sequence[int]]):
        object.__setattr__(self, "generators", tuple(tuple(int(x) for x in p) for p in generators))

    def to_json(self) -> dict:
        return {"generators": [list(p) for p in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "AutomorphismWitness":
        return cls(data["generators"])


@dataclass(frozen=True)
class WitnessVerdict:
    status: str  # "transitive" | "intransitive" | "not_automorphism"
    orbits: tuple[tuple[int, ...], ...] = ()
    generator: int | None = None

    @property
    def transitive(self) -> bool:
        return self.status == "transitive"


def is_permutation(p: Sequence[int], n: int) -> bool:
    return len(p) == n and sorted(p) == list(range(n))


def is_automorphism(g: Graph, p: Sequence[int]) -> bool:
    if not is_permutation(p, g.n):
        return False
    # a bijection that maps edges to edges maps non-edges to non-edges too
    return all(g.has_edge(p[u], p[v]) for u, v in g.edges)


def orbit_partition(n: int, generators: Sequence[Sequence[int]]) -> list[list[int]]:
    """Orbits of the group generated by ``generators``, each sorted, ordered by minimum."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in generators:
        for x in range(n):
            a, b = find(x), find(p[x])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return [groups[k] for k in sorted(groups)]


def verify_witness(g: Graph, w: AutomorphismWitness) -> WitnessVerdict:
    for i, p in enumerate(w.generators):
        if len(p) != g.n:
            raise ValueError(f"generator {i} has length {len(p)}, graph has {g.n} vertices")
    for i, p in enumerate(w.generators):
        if not is_automorphism(g, p):
            return WitnessVerdict("not_automorphism", generator=i)
    orbits = orbit_partition(g.n, w.generators)
    status = "transitive" if len(orbits) <= 1 else "intransitive"
    return WitnessVerdict(status, tuple(tuple(o) for o in orbits))


def find_automorphism(g: Graph, u: int, v: int) -> list[int] | None:
    """Some automorphism mapping ``u`` to ``v`` (exact backtracking)."""
    return find_isomorphism(g, g, {u: v})


def search_witness(g: Graph) -> AutomorphismWitness | None:
    """Build a transitive witness by searching automorphisms ``0 -> v`` for
    each vertex not yet in the orbit of 0.  ``None`` if some vertex is unreachable."""
    gens: list[list[int]] = []
    for v in range(1, g.n):
        orbit0 = orbit_partition(g.n, gens)[0] if gens else [0]
        if v in orbit0:
            continue
        p = find_automorphism(g, 0, v)
        if p is None:
            return None
        gens.append(p)
    return AutomorphismWitness(gens or [list(range(g.n))])


# Cayley graphs -----------------------------------------------------------

def _compose(p: Sequence[int], q: Sequence[int]) -> Permutation:
    """``p * q`` acting as ``x -> p(q(x))``."""
    return tuple(p[x] for x in q)


@dataclass
class CayleySpec:
    order: int
    connection_set: list = field(default_factory=list)
    table: list[list[int]] | None = None
    perm_generators: list[list[int]] | None = None

    @classmethod
    def from_json(cls, data: dict | str) -> "CayleySpec":
        if isinstance(data, str):
            data = json.loads(data)
        if "order" not in data or "connection_set" not in data:
            raise CayleySpecError("shape", "need 'order' and 'connection_set'")
        if ("table" in data) == ("perm_generators" in data):
            raise CayleySpecError("shape", "give exactly one of 'table' and 'perm_generators'")
        return cls(int(data["order"]), list(data["connection_set"]),
                   data.get("table"), data.get("perm_generators"))

    def to_json(self) -> dict:
        out: dict = {"order": self.order, "connection_set": self.connection_set}
        if self.table is not None:
            out["table"] = self.table
        if self.perm_generators is not None:
            out["perm_generators"] = self.perm_generators
        return out


def _table_from_perm_generators(order: int, gens: list[list[int]]):
    """Enumerate the group generated by permutations, identity first, in BFS
    order of right multiplication by the generators."""
    if not gens:
        raise CayleySpecError("shape", "perm_generators is empty")
    deg = len(gens[0])
    for p in gens:
        if not is_permutation(p, deg):
            raise CayleySpecError("not_group", f"{p} is not a permutation of 0..{deg - 1}")
    ident = tuple(range(deg))
    elems = [ident]
    index = {ident: 0}
    i = 0
    while i < len(elems):
        for p in gens:
            q = _compose(elems[i], p)
            if q not in index:
                if len(elems) >= min(order, GROUP_ELEMENT_CAP):
                    raise CayleySpecError("order_mismatch", f"generated group exceeds declared order {order}")
                index[q] = len(elems)
                elems.append(q)
        i += 1
    if len(elems) != order:
        raise CayleySpecError("order_mismatch", f"generators produce a group of order {len(elems)}, declared {order}")
    table = [[index[_compose(a, b)] for b in elems] for a in elems]
    return table, elems, index


def _check_group_table(t: np.ndarray) -> int:
    n = t.shape[0]
    if t.shape != (n, n) or t.min(initial=0) < 0 or t.max(initial=0) >= n:
        raise CayleySpecError("shape", "table must be order x order with entries in range")
    ids = [e for e in range(n) if (t[e] == np.arange(n)).all() and (t[:, e] == np.arange(n)).all()]
    if not ids:
        raise CayleySpecError("not_group", "no identity element")
    e = ids[0]
    for a in range(n):
        if not (t[a] == e).any():
            raise CayleySpecError("not_group", f"element {a} has no inverse")
    idx = np.arange(n)
    left = t[t]  # left[a, b, c] = (a*b)*c
    right = t[idx[:, None, None], t[None, :, :]]  # a*(b*c)
    if not np.array_equal(left, right):
        bad = np.argwhere(left != right)[0]
        raise CayleySpecError("not_group", f"associativity fails at {tuple(int(x) for x in bad)}")
    return e


def _generating_set(t: np.ndarray, e: int) -> list[int]:
    """Greedy generating set: add the smallest element outside the current subgroup."""
    n = t.shape[0]
    gens: list[int] = []
    sub = {e}
    while len(sub) < n:
        g = min(set(range(n)) - sub)
        gens.append(g)
        frontier = list(sub)
        sub = set(sub)
        while frontier:
            x = frontier.pop()
            for s in gens:
                y = int(t[x, s])
                if y not in sub:
                    sub.add(y)
                    frontier.append(y)
    return gens


def cayley_graph(spec: CayleySpec) -> tuple[Graph, AutomorphismWitness]:
    n = spec.order
    if n < 1:
        raise CayleySpecError("shape", "order must be positive")
    if spec.table is not None:
        t = np.asarray(spec.table, dtype=np.int64)
        if t.ndim != 2 or t.shape != (n, n):
            raise CayleySpecError("shape", "table must be order x order")
        e = _check_group_table(t)
        conn = []
        for s in spec.connection_set:
            if isinstance(s, (list, tuple)) or not 0 <= int(s) < n:
                raise CayleySpecError("bad_element", f"{s} is not a group element index")
            conn.append(int(s))
    elif spec.perm_generators is not None:
        table, elems, index = _table_from_perm_generators(n, spec.perm_generators)
        t = np.asarray(table, dtype=np.int64)
        e = 0
        conn = []
        for s in spec.connection_set:
            if isinstance(s, (list, tuple)):
                key = tuple(int(x) for x in s)
                if key not in index:
                    raise CayleySpecError("bad_element", f"{list(s)} is not in the generated group")
                conn.append(index[key])
            else:
                if not 0 <= int(s) < n:
                    raise CayleySpecError("bad_element", f"{s} out of range")
                conn.append(int(s))
    else:
        raise CayleySpecError("shape", "give a table or permutation generators")
    sset = set(conn)
    if e in sset:
        raise CayleySpecError("identity_in_connection_set", "the identity may not be in S")
    inv = {a: int(np.nonzero(t[a] == e)[0][0]) for a in range(n)}
    for s in sorted(sset):
        if inv[s] not in sset:
            raise CayleySpecError("not_inverse_closed", f"inverse of {s} missing from S")
    edges = {tuple(sorted((g, int(t[g, s])))) for g in range(n) for s in sset}
    graph = Graph(n, edges)
    gens = _generating_set(t, e)
    # left translation x -> h*x maps the edge {g, gs} to {hg, hgs}
    perms = [[int(t[h, x]) for x in range(n)] for h in gens] or [list(range(n))]
    return graph, AutomorphismWitness(perms)


def circulant(n: int, offsets) -> tuple[Graph, AutomorphismWitness]:
    if n < 3:
        raise ValueError("circulant needs n >= 3")
    offs = {int(o) % n for o in offsets}
    if not offs:
        raise ValueError("offsets must be nonempty")
    if 0 in offs:
        raise ValueError("offset 0 (mod n) is not allowed")
    offs |= {(-o) % n for o in offs}
    edges = {tuple(sorted((i, (i + o) % n))) for i in range(n) for o in offs}
    rot = [(i + 1) % n for i in range(n)]
    return Graph(n, edges), AutomorphismWitness([rot])


def circulant_connected(n: int, offsets) -> bool:
    g = n
    for o in offsets:
        g = gcd(g, int(o) % n)
    return g == 1


def double_clique(n: int) -> tuple[Graph, AutomorphismWitness]:
    """Two cliques of order n/2 joined by the perfect matching i -- i + n/2."""
    if n % 2:
        raise ValueError("double_clique needs an even vertex count")
    if n < 4:
        raise ValueError("double_clique needs n >= 4")
    h = n // 2
    edges = [(i, j) for i, j in combinations(range(h), 2)]
    edges += [(h + i, h + j) for i, j in combinations(range(h), 2)]
    edges += [(i, i + h) for i in range(h)]
    swap = [(v + h) % n for v in range(n)]
    rot = [(v // h) * h + (v % h + 1) % h for v in range(n)]
    return Graph(n, edges), AutomorphismWitness([swap, rot])


def chained_cliques(k: int = 3, size: int = 4) -> tuple[Graph, AutomorphismWitness | None]:
    """``k`` cliques of order ``size`` in a path, consecutive ones joined by
    the matching ``i <-> i`` on positions.  For ``k = 3`` the middle block has
    valency ``size + 1`` and the ends ``size``, so the graph is not
    vertex-transitive; it serves as a gluing fixture for spanning-tree assembly.
    """
    if k < 2 or size < 3:
        raise ValueError("need at least two cliques of order >= 3")
    n = k * size
    edges = []
    for b in range(k):
        base = b * size
        edges += [(base + i, base + j) for i, j in combinations(range(size), 2)]
    for b in range(k - 1):
        edges += [(b * size + i, (b + 1) * size + i) for i in range(size)]
    rot = [(v // size) * size + (v % size + 1) % size for v in range(n)]
    flip = [(k - 1 - v // size) * size + v % size for v in range(n)]
    return Graph(n, edges), AutomorphismWitness([rot, flip])


def blow_up_witness(w: AutomorphismWitness, n: int, l: int) -> AutomorphismWitness:
    """Lift a witness on ``G`` to ``blow_up(G, l)``: act on classes, plus a
    simultaneous cyclic shift inside every class."""
    gens = [[p[v // l] * l + v % l for v in range(n * l)] for p in w.generators]
    if l > 1:
        gens.append([(v // l) * l + (v % l + 1) % l for v in range(n * l)])
    return AutomorphismWitness(gens)


def blow_up_instance(g: Graph, w: AutomorphismWitness, l: int) -> tuple[Graph, AutomorphismWitness]:
    return blow_up(g, l), blow_up_witness(w, g.n, l)


# fixtures ----------------------------------------------------------------

def petersen() -> Graph:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, edges)


def coxeter() -> Graph:
    a, b, c, d = 0, 7, 14, 21
    edges = []
    for i in range(7):
        edges.append((a + i, a + (i + 1) % 7))
        edges.append((b + i, b + (i + 2) % 7))
        edges.append((c + i, c + (i + 3) % 7))
        edges += [(d + i, a + i), (d + i, b + i), (d + i, c + i)]
    return Graph(28, edges)


def hypercube(dim: int) -> tuple[Graph, AutomorphismWitness]:
    n = 1 << dim
    edges = [(v, v ^ (1 << k)) for v in range(n) for k in range(dim) if v < v ^ (1 << k)]
    gens = [[v ^ (1 << k) for v in range(n)] for k in range(dim)]
    return Graph(n, edges), AutomorphismWitness(gens)


FIXTURE_NAMES = ("petersen", "coxeter", "k_n", "k_nn", "c_n", "q3")
_FIXTURE_RE = re.compile(r"^(petersen|coxeter|q3|k_nn|k_n|c_n)(?:\((\d+)\)|_(\d+))?$")


def fixture(name: str, size: int | None = None) -> tuple[Graph, AutomorphismWitness | None]:
    """Named graphs.  ``k_n``, ``k_nn`` and ``c_n`` take ``size``
    (defaults 5, 3, 6); the name may also carry it, e.g. ``k_nn(3)`` or ``c_7``."""
    match = _FIXTURE_RE.match(name.strip().lower())
    if match is None:
        raise ValueError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")
    key = match.group(1)
    arg = match.group(2) or match.group(3)
    if arg is not None:
        size = int(arg)
    if key == "petersen":
        g = petersen()
        return g, search_witness(g)
    if key == "coxeter":
        g = coxeter()
        return g, search_witness(g)
    if key == "q3":
        return hypercube(3)
    if key == "k_n":
        n = 5 if size is None else size
        if n < 1:
            raise ValueError("k_n needs n >= 1")
        g = Graph(n, combinations(range(n), 2))
        return g, AutomorphismWitness([[(i + 1) % n for i in range(n)]])
    if key == "k_nn":
        n = 3 if size is None else size
        if n < 1:
            raise ValueError("k_nn needs n >= 1")
        g = Graph(2 * n, [(i, n + j) for i in range(n) for j in range(n)])
        rot = [(v // n) * n + (v % n + 1) % n for v in range(2 * n)]
        swap = [(v + n) % (2 * n) for v in range(2 * n)]
        return g, AutomorphismWitness([rot, swap])
    if key == "c_n":
        n = 6 if size is None else size
        return circulant(n, {1})
    raise ValueError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")


def random_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p) from a seeded ``random.Random``."""
    rng = random.Random(seed)
    return Graph(n, [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p])
