"""End-to-end Hamilton cycle assembly.

Pipeline per candidate continent partition ``V_1, ..., V_r``:

1. sanity checks on the candidate (equal sizes, isomorphic blocks, every
   witness generator permutes the blocks, each block iron at the configured level);
2. a bipartite verdict per block (exact distance against ``ceil(c^4 n'^2)``);
3. gluing:

   * ``r = 1``: a Hamilton path between the ends of one edge, tried for one
     representative per edge orbit of the witness group;
   * far from bipartite (``r >= 2``): a spanning tree of the fat-pair graph,
     two connector edges per tree edge, and one path request per block by
     its role in the tree (root, leaf or internal);
   * close to bipartite (``r >= 2``): the bifat graph on the ``2r`` sides, its
     doubling, an Eulerian circuit, distinct connectors per traversal and one
     bipathition request per block.

Every emitted cycle is checked with :func:`verify_hamilton_cycle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .bipartite import (
    Bipartition,
    is_close_to_bipartite,
    local_search_bipartition,
    start_bipartition,
    verify_balanced_bipartition,
)
from .errors import CapacityError, HypothesisError
from .graph import Edge, Graph, induced, mask_of
from .instances import AutomorphismWitness, verify_witness
from .matching import bipartite_matching_between
from .pathition import EndpointRequest, PathitionResult, bipathition, pathition
from .robustness import (
    DecompositionError,
    blocks_isomorphism,
    codeg_island_candidates,
    is_l_iron,
    robust_decomposition,
)

SCHEMA = "vthamilton.pipeline/1"


@dataclass
class PipelineConfig:
    c: Fraction = Fraction(1, 18)
    iron_level: int = 1
    robust_limit: int = 20
    iron_limit: int = 16
    distance_limit: int = 22
    dp_limit: int = 18
    backtrack_limit: int = 24
    node_budget: int = 2_000_000
    budget_ms: int | None = None
    candidate_cap: int = 12
    max_candidates: int = 64
    candidate_source: str = "codeg"  # codeg | decomposition | explicit
    include_decomposition: bool = True
    explicit_partitions: list | None = None
    max_gluing_attempts: int = 4
    iso_exact_limit: int = 10
    exceptional: tuple[int, ...] = ()

    def __post_init__(self):
        self.c = Fraction(self.c)
        if not 0 < self.c < Fraction(1, 17):
            raise ValueError("c must lie in (0, 1/17)")
        if self.candidate_source not in ("codeg", "decomposition", "explicit"):
            raise ValueError("candidate_source must be codeg, decomposition or explicit")
        if self.candidate_source == "explicit" and not self.explicit_partitions:
            raise ValueError("explicit candidate source needs explicit_partitions")
        self.exceptional = tuple(sorted(set(self.exceptional)))

    def engine_kwargs(self) -> dict:
        return {
            "exact_limit": self.dp_limit,
            "backtrack_limit": self.backtrack_limit,
            "node_budget": self.node_budget,
            "budget_ms": self.budget_ms,
        }

    def to_json(self) -> dict:
        return {
            "c": str(self.c),
            "iron_level": self.iron_level,
            "robust_limit": self.robust_limit,
            "iron_limit": self.iron_limit,
            "distance_limit": self.distance_limit,
            "dp_limit": self.dp_limit,
            "backtrack_limit": self.backtrack_limit,
            "node_budget": self.node_budget,
            "budget_ms": self.budget_ms,
            "candidate_cap": self.candidate_cap,
            "max_candidates": self.max_candidates,
            "candidate_source": self.candidate_source,
            "include_decomposition": self.include_decomposition,
            "max_gluing_attempts": self.max_gluing_attempts,
            "iso_exact_limit": self.iso_exact_limit,
            "exceptional": list(self.exceptional),
        }


class GluingFailure(Exception):
    def __init__(self, stage: str, reason: str):
        super().__init__(f"{stage}: {reason}")
        self.stage = stage
        self.reason = reason


# verification ------------------------------------------------------------

def verify_hamilton_cycle(g: Graph, cycle: Sequence[int]) -> bool:
    n = g.n
    if n < 3 or len(cycle) != n or sorted(cycle) != list(range(n)):
        return False
    return all(g.has_edge(cycle[i], cycle[(i + 1) % n]) for i in range(n))


def _stitch(n: int, edges: Iterable[Edge]) -> list[int] | None:
    """Walk the 2-regular edge multiset as a single cycle through every vertex."""
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    if any(len(a) != 2 for a in nbrs):
        return None
    cycle = [0]
    prev, cur = -1, 0
    while True:
        a, b = nbrs[cur]
        nxt = b if a == prev else a
        if nxt == 0:
            break
        if len(cycle) > n:
            return None
        cycle.append(nxt)
        prev, cur = cur, nxt
    return cycle if len(cycle) == n else None


def _path_edges(paths: Iterable[Sequence[int]]) -> list[Edge]:
    return [(p[i], p[i + 1]) for p in paths for i in range(len(p) - 1)]


# block-level helpers -----------------------------------------------------

def _block_request(
    g: Graph,
    block: Sequence[int],
    pairs: Sequence[tuple[int, int]],
    exceptional: Iterable[int],
    cfg: PipelineConfig,
    bipart: Sequence[int] | None = None,
) -> tuple[PathitionResult, list[list[int]] | None, dict]:
    """Run one (bi)pathition request on ``G[block]`` in global labels."""
    sub = induced(g, block)
    idx = sub.index()
    ex = [idx[v] for v in exceptional if v in idx]
    req = EndpointRequest([(idx[x], idx[y]) for x, y in pairs], ex)
    if bipart is None:
        res = pathition(sub.graph, req, **cfg.engine_kwargs())
    else:
        p = Bipartition.of(sub.graph, [idx[v] for v in bipart])
        res = bipathition(sub.graph, p, req, **cfg.engine_kwargs())
    record = {
        "block": list(block),
        "pairs": [list(pr) for pr in pairs],
        "kind": "bipathition" if bipart is not None else "pathition",
        "verdict": res.verdict,
        "engine": res.engine,
    }
    if not res.feasible:
        return res, None, record
    return res, [sub.to_original(pth) for pth in res.system.paths], record


def edge_orbit_representatives(g: Graph, w: AutomorphismWitness, edges: Iterable[Edge] | None = None) -> list[Edge]:
    """Smallest edge of every orbit of the witness group acting on ``edges``
    (default: all edges), ordered by that smallest edge."""
    pool = sorted(g.edges if edges is None else {(min(e), max(e)) for e in edges})
    index = {e: i for i, e in enumerate(pool)}
    parent = list(range(len(pool)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for perm in w.generators:
        for e, i in index.items():
            img = (min(perm[e[0]], perm[e[1]]), max(perm[e[0]], perm[e[1]]))
            j = index.get(img)
            if j is not None:
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    return [pool[i] for i in range(len(pool)) if find(i) == i]


# fat pairs and case I ----------------------------------------------------

@dataclass
class FatPairs:
    h: Graph
    matchings: dict[tuple[int, int], list[Edge]]  # (i, j), i < j -> edges (x in V_i, y in V_j)
    thin: list[tuple[int, int]]
    threshold: int

    def to_json(self) -> dict:
        return {
            "edges": [list(e) for e in self.h.edge_list()],
            "thin": [list(e) for e in self.thin],
            "threshold": self.threshold,
            "matching_sizes": {f"{i}-{j}": len(m) for (i, j), m in sorted(self.matchings.items())},
        }


def fat_pairs(g: Graph, blocks: Sequence[Sequence[int]], threshold: int | None = None) -> FatPairs:
    """Block pairs whose crossing graph has a matching of size at least
    ``ceil(m / r)``; crossing pairs below that are thin."""
    r = len(blocks)
    if r < 2:
        raise ValueError("fat pairs need at least two blocks")
    m = len(blocks[0])
    thr = math.ceil(Fraction(m, r)) if threshold is None else threshold
    masks = [mask_of(b) for b in blocks]
    edges, matchings, thin = [], {}, []
    for i in range(r):
        for j in range(i + 1, r):
            if g.edges_between(masks[i], masks[j]) == 0:
                continue
            mt = bipartite_matching_between(g, blocks[i], blocks[j])
            matchings[(i, j)] = sorted(mt)
            if len(mt) >= thr:
                edges.append((i, j))
            else:
                thin.append((i, j))
    return FatPairs(Graph(r, edges), matchings, thin, thr)


def thin_pair_audit(g: Graph, blocks: Sequence[Sequence[int]]) -> bool:
    return not fat_pairs(g, blocks).thin


@dataclass
class SpanningTree:
    parent: list[int]
    children: list[list[int]]
    order: list[int]  # BFS order from the root

    def to_json(self) -> dict:
        return {"parent": self.parent, "children": self.children, "order": self.order}


def bfs_tree(h: Graph, root: int = 0) -> SpanningTree | None:
    parent = [-1] * h.n
    children: list[list[int]] = [[] for _ in range(h.n)]
    order = [root]
    seen = {root}
    i = 0
    while i < len(order):
        u = order[i]
        for v in h.adj[u]:
            if v not in seen:
                seen.add(v)
                parent[v] = u
                children[u].append(v)
                order.append(v)
        i += 1
    if len(order) != h.n:
        return None
    return SpanningTree(parent, children, order)


@dataclass
class ConnectorSet:
    """Case I: for every non-root block ``i``, two edges to its parent block,
    each oriented ``(x in V_i, y in V_parent)``: ``minus[i]`` and ``plus[i]``."""

    minus: dict[int, Edge]
    plus: dict[int, Edge]

    def edges(self) -> list[Edge]:
        return [self.minus[i] for i in sorted(self.minus)] + [self.plus[i] for i in sorted(self.plus)]

    def to_json(self) -> dict:
        return {
            "minus": {str(i): list(e) for i, e in sorted(self.minus.items())},
            "plus": {str(i): list(e) for i, e in sorted(self.plus.items())},
        }


def _oriented(edge: Edge, first_block_mask: int) -> Edge:
    x, y = edge
    return (x, y) if first_block_mask >> x & 1 else (y, x)


def select_connectors_case1(
    g: Graph,
    blocks: Sequence[Sequence[int]],
    tree: SpanningTree,
    fat: FatPairs,
    exceptional: Iterable[int] = (),
    offset: int = 0,
) -> ConnectorSet:
    """Greedy choice of two matching edges per tree edge (tree edges in BFS
    order, matching edges by ascending endpoints, rotated by ``offset``) so
    that all chosen edges form a matching avoiding the exceptional vertices."""
    blocked = set(exceptional)
    used: set[int] = set()
    minus, plus = {}, {}
    for child in tree.order[1:]:
        par = tree.parent[child]
        key = (min(child, par), max(child, par))
        cands = sorted((min(e), max(e)) for e in fat.matchings.get(key, []))
        if cands:
            k = offset % len(cands)
            cands = cands[k:] + cands[:k]
        picked = []
        for e in cands:
            if e[0] in used or e[1] in used or e[0] in blocked or e[1] in blocked:
                continue
            picked.append(_oriented(e, mask_of(blocks[child])))
            used |= set(e)
            if len(picked) == 2:
                break
        if len(picked) < 2:
            raise GluingFailure("connector_selection", f"tree edge {child}-{par} has fewer than two usable matching edges")
        minus[child], plus[child] = picked
    return ConnectorSet(minus, plus)


def case1_requests(tree: SpanningTree, conn: ConnectorSet) -> dict[int, list[tuple[int, int]]]:
    """Endpoint pairs per block from its role in the tree."""
    out: dict[int, list[tuple[int, int]]] = {}
    for i in tree.order:
        kids = tree.children[i]
        if i == tree.order[0]:
            p = len(kids)
            out[i] = [(conn.plus[kids[j]][1], conn.minus[kids[(j + 1) % p]][1]) for j in range(p)]
        elif not kids:
            out[i] = [(conn.minus[i][0], conn.plus[i][0])]
        else:
            q = len(kids)
            pairs = [(conn.plus[i][0], conn.plus[kids[0]][1])]
            for j in range(q - 1):
                pairs.append((conn.minus[kids[j]][1], conn.plus[kids[j + 1]][1]))
            pairs.append((conn.minus[kids[q - 1]][1], conn.minus[i][0]))
            out[i] = pairs
    return out


def assemble_case1(
    g: Graph,
    blocks: Sequence[Sequence[int]],
    tree: SpanningTree,
    conn: ConnectorSet,
    cfg: PipelineConfig,
    log: list | None = None,
) -> list[int]:
    requests = case1_requests(tree, conn)
    paths: list[list[int]] = []
    for i in sorted(requests):
        res, sys_paths, rec = _block_request(g, blocks[i], requests[i], cfg.exceptional, cfg)
        rec["block_index"] = i
        if log is not None:
            log.append(rec)
        if sys_paths is None:
            raise GluingFailure("pathition", f"block {i} request is {res.verdict}")
        paths += sys_paths
    cycle = _stitch(g.n, _path_edges(paths) + conn.edges())
    if cycle is None or not verify_hamilton_cycle(g, cycle):
        raise AssertionError("case I concatenation did not produce a Hamilton cycle")
    return cycle


# bifat structure and case II ---------------------------------------------

@dataclass
class BifatStructure:
    sides: list[tuple[int, ...]]  # index 2i is A_i, 2i + 1 is B_i
    h: Graph
    matchings: dict[tuple[int, int], list[Edge]]
    bithin: list[tuple[int, int]]
    threshold: int
    doubled: list[tuple[int, int]]  # edge id -> (X, Y); ids 2k and 2k+1 copy H edge k
    circuit: list[tuple[int, int, int]]  # (from, to, doubled edge id)
    degree_identity: bool

    def block_of_side(self, x: int) -> int:
        return x // 2

    def to_json(self) -> dict:
        return {
            "sides": [list(s) for s in self.sides],
            "edges": [list(e) for e in self.h.edge_list()],
            "bithin": [list(e) for e in self.bithin],
            "threshold": self.threshold,
            "circuit": [list(t) for t in self.circuit],
            "degree_identity": self.degree_identity,
        }


def euler_circuit(n_nodes: int, edges: Sequence[tuple[int, int]], start: int = 0, rotate: int = 0) -> list[tuple[int, int, int]]:
    """Hierholzer on a multigraph given as an edge list; at every node the
    unused edge to the smallest neighbour is taken first (``rotate`` cycles
    that preference to produce alternative circuits)."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_nodes)]
    for eid, (u, v) in enumerate(edges):
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    for lst in adj:
        lst.sort()
        if rotate and lst:
            k = rotate % len(lst)
            lst[:] = lst[k:] + lst[:k]
    used = [False] * len(edges)
    ptr = [0] * n_nodes
    stack: list[tuple[int, int]] = [(start, -1)]
    out: list[tuple[int, int]] = []
    while stack:
        v, _ = stack[-1]
        while ptr[v] < len(adj[v]) and used[adj[v][ptr[v]][1]]:
            ptr[v] += 1
        if ptr[v] < len(adj[v]):
            w, eid = adj[v][ptr[v]]
            used[eid] = True
            stack.append((w, eid))
        else:
            out.append(stack.pop())
    out.reverse()
    if len(out) != len(edges) + 1:
        raise ValueError("multigraph is not connected on its edges")
    return [(out[k][0], out[k + 1][0], out[k + 1][1]) for k in range(len(edges))]


def bifat_structure(
    g: Graph,
    blocks: Sequence[Sequence[int]],
    bipartitions: Sequence[tuple[Sequence[int], Sequence[int]]],
    rotate: int = 0,
) -> BifatStructure:
    """``bipartitions[i] = (A_i, B_i)`` splits block ``i`` (global labels)."""
    r = len(blocks)
    m = len(blocks[0])
    sides: list[tuple[int, ...]] = []
    for i, (a, b) in enumerate(bipartitions):
        if sorted([*a, *b]) != sorted(blocks[i]):
            raise ValueError(f"sides of block {i} do not partition it")
        sides += [tuple(sorted(a)), tuple(sorted(b))]
    thr = math.ceil(Fraction(m, 2 * r))
    masks = [mask_of(s) for s in sides]
    edges, matchings, bithin = [], {}, []
    for x in range(2 * r):
        for y in range(x + 1, 2 * r):
            if not masks[x] or not masks[y] or g.edges_between(masks[x], masks[y]) == 0:
                continue
            mt = sorted(bipartite_matching_between(g, sides[x], sides[y]))
            matchings[(x, y)] = mt
            if len(mt) >= thr:
                edges.append((x, y))
            else:
                bithin.append((x, y))
    h = Graph(2 * r, edges)
    if not h.is_connected():
        raise GluingFailure("bifat_connectivity", "the bifat graph is disconnected")
    doubled = [e for e in h.edge_list() for _ in range(2)]
    circuit = euler_circuit(2 * r, doubled, 0, rotate)
    deg = [0] * (2 * r)
    for x, y in doubled:
        deg[x] += 1
        deg[y] += 1
    identity = all(deg[2 * i] == deg[2 * i + 1] for i in range(r))
    return BifatStructure(sides, h, matchings, bithin, thr, doubled, circuit, identity)


@dataclass
class CaseTwoPlan:
    connectors: dict[int, Edge]  # doubled edge id -> (x in X, y in Y) for its (X, Y)
    runs: list[dict]  # block, entry, exit, sides visited
    visits: dict[int, int]  # C_X
    requests: dict[int, list[tuple[int, int]]]

    def to_json(self) -> dict:
        return {
            "connectors": {str(k): list(v) for k, v in sorted(self.connectors.items())},
            "runs": self.runs,
            "visits": {str(k): v for k, v in sorted(self.visits.items())},
            "requests": {str(k): [list(p) for p in v] for k, v in sorted(self.requests.items())},
        }


def plan_case2(st: BifatStructure, exceptional: Iterable[int] = (), offset: int = 0) -> CaseTwoPlan:
    """Distinct connector per inter-block traversal of the doubled graph,
    then cut the circuit into runs: maximal stretches spent inside one block
    (moving between ``A_i`` and ``B_i`` does not leave the block and uses no
    connector).  Each run becomes one endpoint pair ``(entry, exit)`` of that
    block's request."""
    blocked = set(exceptional)
    used: set[int] = set()
    connectors: dict[int, Edge] = {}
    for k, (x, y) in enumerate(st.h.edge_list()):
        if x // 2 == y // 2:
            continue  # A_i B_i edges keep H connected but never carry the cycle
        cands = st.matchings[(x, y)]
        if cands:
            s = offset % len(cands)
            cands = cands[s:] + cands[:s]
        picked = []
        for a, b in cands:
            if a in used or b in used or a in blocked or b in blocked:
                continue
            picked.append((a, b))
            used |= {a, b}
            if len(picked) == 2:
                break
        if len(picked) < 2:
            raise GluingFailure("connector_selection", f"bifat edge {x}-{y} has fewer than two usable matching edges")
        connectors[2 * k], connectors[2 * k + 1] = picked

    def endpoint_in(eid: int, side: int) -> int:
        a, b = connectors[eid]
        x, _ = st.doubled[eid]
        return a if side == x else b

    circ = st.circuit
    L = len(circ)
    visits: dict[int, int] = {x: 0 for x in range(len(st.sides))}
    for _, to, _ in circ:
        visits[to] += 1
    inter = [st.block_of_side(a) != st.block_of_side(b) for a, b, _ in circ]
    if not any(inter):
        raise GluingFailure("bifat_connectivity", "the circuit never leaves a block")
    # rotate so that the circuit re-enters its start node through an inter-block traversal
    s = next(k for k in range(L) if inter[(k - 1) % L])
    circ = circ[s:] + circ[:s]
    inter = inter[s:] + inter[:s]
    runs = []
    first_from = circ[0][0]
    entry = endpoint_in(circ[-1][2], first_from)
    cur_sides = [first_from]
    for k, (a, b, eid) in enumerate(circ):
        if inter[k]:
            exit_v = endpoint_in(eid, a)
            runs.append({"block": st.block_of_side(a), "entry": entry, "exit": exit_v, "sides": cur_sides})
            entry = endpoint_in(eid, b)
            cur_sides = [b]
        else:
            cur_sides = cur_sides + [b]
    requests: dict[int, list[tuple[int, int]]] = {}
    for run in runs:
        requests.setdefault(run["block"], []).append((run["entry"], run["exit"]))
    return CaseTwoPlan(connectors, runs, visits, requests)


def assemble_case2(
    g: Graph,
    blocks: Sequence[Sequence[int]],
    st: BifatStructure,
    plan: CaseTwoPlan,
    cfg: PipelineConfig,
    log: list | None = None,
) -> list[int]:
    paths: list[list[int]] = []
    for i in sorted(plan.requests):
        pairs = plan.requests[i]
        a_side = set(st.sides[2 * i])
        ends = [v for pr in pairs for v in pr]
        if 2 * sum(1 for v in ends if v in a_side) != len(ends):
            raise GluingFailure("bipathition_parity", f"block {i} request is unbalanced")
        res, sys_paths, rec = _block_request(g, blocks[i], pairs, cfg.exceptional, cfg, bipart=st.sides[2 * i])
        rec["block_index"] = i
        if log is not None:
            log.append(rec)
        if sys_paths is None:
            stage = "bipathition_parity" if res.verdict == "parity_violation" else "bipathition"
            raise GluingFailure(stage, f"block {i} request is {res.verdict}")
        paths += sys_paths
    used_edges = [plan.connectors[eid] for a, b, eid in st.circuit if a // 2 != b // 2]
    cycle = _stitch(g.n, _path_edges(paths) + used_edges)
    if cycle is None or not verify_hamilton_cycle(g, cycle):
        raise AssertionError("case II concatenation did not produce a Hamilton cycle")
    return cycle


# single continent --------------------------------------------------------

def _single_block_cycle(
    g: Graph, w: AutomorphismWitness, bipart: Bipartition | None, cfg: PipelineConfig, log: list
) -> list[int]:
    """Hamilton path between the ends of an edge, closed by that edge.  One
    edge per orbit is enough: an automorphism carries any Hamilton cycle
    through some edge of the orbit onto one through the representative."""
    if bipart is None:
        pool = None
    else:
        am = bipart.mask_a
        pool = [(u, v) for u, v in g.edges if (am >> u & 1) != (am >> v & 1)]
    block = list(range(g.n))
    for x, y in edge_orbit_representatives(g, w, pool):
        if bipart is not None and not (bipart.mask_a >> x & 1):
            x, y = y, x
        if x in cfg.exceptional or y in cfg.exceptional:
            continue
        res, sys_paths, rec = _block_request(
            g, block, [(x, y)], cfg.exceptional, cfg, bipart=None if bipart is None else bipart.A
        )
        log.append(rec)
        if sys_paths is not None:
            cycle = sys_paths[0]
            if not verify_hamilton_cycle(g, cycle):
                raise AssertionError("closed Hamilton path is not a Hamilton cycle")
            return cycle
        if res.verdict == "unknown":
            raise GluingFailure("pathition", f"closing edge {x}-{y}: search budget exhausted")
    raise GluingFailure("pathition", "no edge orbit closes a Hamilton path into a cycle")


# pipeline ----------------------------------------------------------------

@dataclass
class CandidateRecord:
    index: int
    source: str
    blocks: list[list[int]]
    status: str = "pending"  # success | rejected | failed | skipped
    stage: str = ""
    reason: str = ""
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "source": self.source,
            "blocks": self.blocks,
            "status": self.status,
            "stage": self.stage,
            "reason": self.reason,
            "details": self.details,
        }


@dataclass
class PipelineReport:
    input: dict
    config: dict
    candidates: list[CandidateRecord]
    notes: list[str]
    cycle: list[int] | None = None
    failure_stage: str = ""
    failure_reason: str = ""
    winner: int | None = None

    @property
    def success(self) -> bool:
        return self.cycle is not None

    def to_json(self) -> dict:
        if self.success:
            outcome = {"status": "hamilton_cycle", "cycle": self.cycle, "candidate": self.winner}
        else:
            outcome = {"status": "failure", "stage": self.failure_stage, "reason": self.failure_reason}
        return {
            "schema": SCHEMA,
            "input": self.input,
            "config": self.config,
            "notes": self.notes,
            "candidates": [c.to_json() for c in self.candidates],
            "outcome": outcome,
        }

    def to_dot(self, g: Graph) -> str:
        win = self.candidates[self.winner] if self.winner is not None else None
        groups = win.blocks if win is not None else None
        cyc = self.cycle or []
        highlight = [(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))]
        conn = win.details.get("connector_edges", []) if win is not None else []
        return g.to_dot("pipeline", groups=groups, highlight=highlight, emphasis=conn)


def _canonical_blocks(blocks: Iterable[Iterable[int]]) -> list[list[int]]:
    return sorted(sorted(int(v) for v in b) for b in blocks)


def _candidates(g: Graph, alpha: Fraction, cfg: PipelineConfig, notes: list[str]) -> list[tuple[str, list[list[int]]]]:
    out: list[tuple[str, list[list[int]]]] = []
    if cfg.candidate_source == "explicit":
        return [("explicit", _canonical_blocks(p)) for p in cfg.explicit_partitions]
    if cfg.candidate_source == "codeg":
        try:
            groupings = codeg_island_candidates(g, alpha, cfg.candidate_cap)
            if len(groupings) > cfg.max_candidates:
                notes.append(f"{len(groupings) - cfg.max_candidates} codeg groupings beyond max_candidates not evaluated")
                groupings = groupings[: cfg.max_candidates]
            out += [("codeg", p) for p in groupings]
        except (CapacityError, HypothesisError) as exc:
            notes.append(f"codeg candidates unavailable: {exc}")
    if cfg.candidate_source == "decomposition" or cfg.include_decomposition:
        try:
            dec = robust_decomposition(g, alpha, cfg.robust_limit, cfg.iso_exact_limit)
            blocks = _canonical_blocks(dec.blocks)
            if all(blocks != p for _, p in out):
                out.append(("decomposition", blocks))
        except (DecompositionError, HypothesisError, CapacityError) as exc:
            notes.append(f"decomposition candidate unavailable: {exc}")
    return out


def _screen_candidate(g: Graph, w: AutomorphismWitness, blocks: list[list[int]], cfg: PipelineConfig, rec: CandidateRecord) -> bool:
    sizes = {len(b) for b in blocks}
    if len(sizes) != 1:
        rec.status, rec.stage, rec.reason = "rejected", "partition", "blocks have different sizes"
        return False
    iso = blocks_isomorphism(g, blocks, cfg.iso_exact_limit)
    rec.details["isomorphism"] = iso
    if iso == "mismatch":
        rec.status, rec.stage, rec.reason = "rejected", "isomorphism", "blocks are not isomorphic"
        return False
    block_sets = {frozenset(b) for b in blocks}
    for gi, perm in enumerate(w.generators):
        for b in blocks:
            if frozenset(perm[v] for v in b) not in block_sets:
                rec.status, rec.stage = "rejected", "witness_respect"
                rec.reason = f"generator {gi} does not permute the blocks"
                return False
    iron = []
    for b in blocks:
        sub = induced(g, b).graph
        if sub.n > cfg.iron_limit:
            iron.append("unchecked")
            continue
        verdict = is_l_iron(sub, cfg.iron_level, cfg.iron_limit)
        iron.append(verdict.status)
        if not verdict.holds:
            rec.details["iron"] = iron
            rec.details["iron_witness"] = verdict.witness.to_json() if verdict.witness else None
            rec.status, rec.stage = "rejected", "iron"
            rec.reason = f"block {blocks.index(b)} is not {cfg.iron_level}-iron"
            return False
    rec.details["iron"] = iron
    return True


def find_hamilton_cycle(
    g: Graph, w: AutomorphismWitness | None, alpha: Fraction | None = None, config: PipelineConfig | None = None
) -> PipelineReport:
    cfg = config or PipelineConfig()
    notes: list[str] = []
    if w is None:
        w = AutomorphismWitness([list(range(g.n))])
        notes.append("no witness supplied; using the identity")
    if alpha is None:
        alpha = Fraction(g.min_degree(), max(g.n, 1))
    alpha = Fraction(alpha)
    wv = verify_witness(g, w)
    info = {
        "n": g.n,
        "m": g.m,
        "alpha": str(alpha),
        "min_degree": g.min_degree(),
        "valency": g.valency,
        "valency_advisory": g.min_degree() >= alpha * g.n,
        "connected": g.is_connected(),
        "witness": wv.status,
    }
    report = PipelineReport(info, cfg.to_json(), [], notes)
    if g.n < 3:
        report.failure_stage, report.failure_reason = "input", "fewer than three vertices"
        return report
    if not info["connected"]:
        report.failure_stage, report.failure_reason = "input", "graph is disconnected"
        return report
    if wv.status == "not_automorphism":
        report.failure_stage = "witness"
        report.failure_reason = f"generator {wv.generator} is not an automorphism"
        return report
    if wv.status == "intransitive":
        notes.append("witness is intransitive; symmetry-based guarantees do not apply")
    if not info["valency_advisory"]:
        notes.append("minimum degree is below alpha * n")
    if not 0 < alpha <= 1:
        report.failure_stage, report.failure_reason = "input", "alpha must lie in (0, 1]"
        return report

    cands = _candidates(g, alpha, cfg, notes)
    for idx, (source, blocks) in enumerate(cands):
        rec = CandidateRecord(idx, source, blocks)
        report.candidates.append(rec)
        if report.success:
            rec.status = "skipped"
            continue
        if not _screen_candidate(g, w, blocks, cfg, rec):
            continue
        try:
            cycle = _glue_candidate(g, w, blocks, cfg, rec)
        except GluingFailure as exc:
            rec.status, rec.stage, rec.reason = "failed", exc.stage, exc.reason
            continue
        except CapacityError as exc:
            rec.status, rec.stage, rec.reason = "failed", "capacity", str(exc)
            continue
        rec.status = "success"
        report.cycle = cycle
        report.winner = idx
    if not report.success:
        report.failure_stage = "all_candidates"
        if not cands:
            report.failure_reason = "no candidate partitions"
        else:
            reasons = [f"#{c.index} {c.status} at {c.stage}: {c.reason}" for c in report.candidates]
            report.failure_reason = "; ".join(reasons)
    elif not verify_hamilton_cycle(g, report.cycle):
        raise AssertionError("pipeline emitted an invalid cycle")
    return report


def _glue_candidate(g: Graph, w: AutomorphismWitness, blocks: list[list[int]], cfg: PipelineConfig, rec: CandidateRecord) -> list[int]:
    r = len(blocks)
    verdicts = []
    parts: list[tuple[list[int], list[int]]] = []
    for b in blocks:
        sub = induced(g, b)
        close, dist, thr, part = is_close_to_bipartite(sub.graph, cfg.c, cfg.distance_limit)
        local = local_search_bipartition(sub.graph, part)
        verdicts.append({"distance": dist, "threshold": thr, "close": close})
        parts.append((sub.to_original(local.A), sub.to_original(local.B)))
    rec.details["bipartite"] = verdicts
    closes = {v["close"] for v in verdicts}
    if len(closes) > 1:
        raise GluingFailure("bipartite_mixed", "some blocks are close to bipartite and some are far")
    close = closes.pop()
    rec.details["case"] = "II" if close else "I"
    log: list = []
    rec.details["requests"] = log
    if close:
        glob = Bipartition.of(g, [v for a, _ in parts for v in a])
        rec.details["balanced_bipartition"] = verify_balanced_bipartition(g, w, glob, cfg.c).to_json()
    if r == 1:
        return _single_block_cycle(g, w, Bipartition.of(g, parts[0][0]) if close else None, cfg, log)
    last: GluingFailure | None = None
    attempts = max(cfg.max_gluing_attempts, 1)
    if not close:
        fat = fat_pairs(g, blocks)
        rec.details["fat_pairs"] = fat.to_json()
        rec.details["thin_pair_audit"] = not fat.thin
        tree = bfs_tree(fat.h, 0)
        if tree is None:
            raise GluingFailure("fat_connectivity", "the fat-pair graph is disconnected")
        rec.details["tree"] = tree.to_json()
        for attempt in range(attempts):
            try:
                conn = select_connectors_case1(g, blocks, tree, fat, cfg.exceptional, attempt)
                rec.details["connectors"] = conn.to_json()
                rec.details["connector_edges"] = [list(e) for e in conn.edges()]
                rec.details["attempts"] = attempt + 1
                return assemble_case1(g, blocks, tree, conn, cfg, log)
            except GluingFailure as exc:
                last = exc
                if exc.stage == "connector_selection":
                    break
        raise last
    for attempt in range(attempts):
        try:
            st = bifat_structure(g, blocks, parts, rotate=attempt)
            rec.details["bifat"] = st.to_json()
            rec.details["bithin_audit"] = not st.bithin
            plan = plan_case2(st, cfg.exceptional, attempt)
            rec.details["plan"] = plan.to_json()
            rec.details["connector_edges"] = [
                list(plan.connectors[eid]) for a, b, eid in st.circuit if a // 2 != b // 2
            ]
            rec.details["attempts"] = attempt + 1
            return assemble_case2(g, blocks, st, plan, cfg, log)
        except GluingFailure as exc:
            last = exc
            if exc.stage in ("connector_selection", "bifat_connectivity"):
                break
    raise last
