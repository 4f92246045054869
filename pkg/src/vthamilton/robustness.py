"""Robust and iron connectivity, islands, and the robust decomposition.

Everything rests on the cut characterisation: deleting an edge set ``E'``
with ``Delta(E') <= l`` can disconnect ``G`` iff some bipartition ``(X, Y)``
of ``V`` has crossing maximum degree at most ``l`` (take ``E' = E(X, Y)``).
So the exact engines scan the ``2^(n-1) - 1`` bipartitions with ``X``
holding the lowest vertex, vectorised over numpy bitmask arrays.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, HypothesisError, InternalConsistencyError
from .graph import (
    Digraph,
    Graph,
    codeg_graph,
    fingerprint,
    find_isomorphism,
    induced,
    mask_of,
    members,
    set_partitions,
)

ROBUST_LIMIT = 20
IRON_LIMIT = 16
STRONG_LIMIT = 20
ISO_EXACT_LIMIT = 10
CANDIDATE_CAP = 12
_CHUNK = 1 << 16


class DecompositionError(RuntimeError):
    """A block produced by the island split fails the valency re-check."""

    def __init__(self, block: Sequence[int], valency: int, required: Fraction, step: int):
        super().__init__(
            f"block {list(block)} at step {step}: min degree {valency} < required {required}"
        )
        self.block = list(block)
        self.valency = valency
        self.required = required
        self.step = step


@dataclass(frozen=True)
class CutWitness:
    removed: tuple[int, ...]
    X: tuple[int, ...]
    Y: tuple[int, ...]
    crossing_max_degree: int

    def to_json(self) -> dict:
        return {
            "removed": list(self.removed),
            "X": list(self.X),
            "Y": list(self.Y),
            "crossing_max_degree": self.crossing_max_degree,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CutWitness":
        return cls(
            tuple(int(v) for v in data.get("removed", [])),
            tuple(int(v) for v in data["X"]),
            tuple(int(v) for v in data["Y"]),
            int(data["crossing_max_degree"]),
        )


def check_cut_witness(g: Graph, w: CutWitness) -> list[str]:
    """Reasons why ``w`` is not a valid cut witness for ``g`` (empty if valid)."""
    problems = []
    u, x, y = set(w.removed), set(w.X), set(w.Y)
    if not x or not y:
        problems.append("empty side")
    if u & x or u & y or x & y:
        problems.append("sides overlap")
    if (u | x | y) != set(range(g.n)) or len(w.removed) + len(w.X) + len(w.Y) != g.n:
        problems.append("sides do not partition V")
    if not problems:
        actual = _cross_max_sets(g, mask_of(x), mask_of(y))
        if actual != w.crossing_max_degree:
            problems.append(f"crossing max degree is {actual}, claimed {w.crossing_max_degree}")
    return problems


def _cross_max_sets(g: Graph, xm: int, ym: int) -> int:
    best = 0
    for v in members(xm):
        best = max(best, (g.masks[v] & ym).bit_count())
    for v in members(ym):
        best = max(best, (g.masks[v] & xm).bit_count())
    return best


@dataclass(frozen=True)
class ConnectivityVerdict:
    status: str  # robust | not_robust | iron | not_iron
    witness: CutWitness | None = None

    @property
    def holds(self) -> bool:
        return self.status in ("robust", "iron")


@dataclass(frozen=True)
class IslandPartition:
    level: int
    blocks: tuple[tuple[int, ...], ...]

    def block_of(self, v: int) -> int:
        for i, b in enumerate(self.blocks):
            if v in b:
                return i
        raise KeyError(v)


# the cut scanner ---------------------------------------------------------

def _scan_cuts(masks: Sequence[int]) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(X, crossing max degree)`` chunks over every bipartition of
    ``0..k-1`` with ``0 in X`` and ``Y`` nonempty, in increasing order of ``X``."""
    k = len(masks)
    if k < 2:
        return
    full = np.uint32((1 << k) - 1)
    adj = [np.uint32(m) for m in masks]
    total = (1 << (k - 1)) - 1
    for start in range(0, total, _CHUNK):
        t = np.arange(start, min(start + _CHUNK, total), dtype=np.uint32)
        x = (t << np.uint32(1)) | np.uint32(1)
        y = full & ~x
        best = np.zeros(len(t), dtype=np.uint8)
        for v in range(k):
            in_x = ((x >> np.uint32(v)) & np.uint32(1)).astype(bool)
            to_y = np.bitwise_count(adj[v] & y)
            to_x = np.bitwise_count(adj[v] & x)
            np.maximum(best, np.where(in_x, to_y, to_x), out=best)
        yield x, best


def _min_cut(masks: Sequence[int]) -> tuple[int, int] | None:
    """Bipartition with the smallest crossing max degree (first such in scan order)."""
    best: tuple[int, int] | None = None
    for x, c in _scan_cuts(masks):
        i = int(np.argmin(c))
        if best is None or int(c[i]) < best[1]:
            best = (int(x[i]), int(c[i]))
    return best


def _local_masks(g: Graph, keep: Sequence[int]) -> list[int]:
    pos = {v: i for i, v in enumerate(keep)}
    out = []
    for v in keep:
        m = 0
        for w in g.adj[v]:
            if w in pos:
                m |= 1 << pos[w]
        out.append(m)
    return out


def _witness(g: Graph, keep: Sequence[int], xloc: int, removed: Iterable[int]) -> CutWitness:
    xs = tuple(keep[i] for i in range(len(keep)) if xloc >> i & 1)
    ys = tuple(keep[i] for i in range(len(keep)) if not xloc >> i & 1)
    return CutWitness(tuple(sorted(removed)), xs, ys, _cross_max_sets(g, mask_of(xs), mask_of(ys)))


def _check_size(what: str, n: int, limit: int) -> None:
    if n > limit:
        raise CapacityError(what, n, limit)
    if n > 31:
        raise CapacityError(what, n, 31)


# public predicates -------------------------------------------------------

def min_cut_witness(g: Graph, removed: Iterable[int] = (), exact_limit: int = ROBUST_LIMIT) -> CutWitness | None:
    """Bipartition of ``V - removed`` minimising the crossing maximum degree."""
    rem = set(removed)
    keep = [v for v in range(g.n) if v not in rem]
    _check_size("robustness scan", len(keep), exact_limit)
    found = _min_cut(_local_masks(g, keep))
    if found is None:
        return None
    return _witness(g, keep, found[0], rem)


def is_l_robust(g: Graph, l: int, exact_limit: int = ROBUST_LIMIT) -> ConnectivityVerdict:
    w = min_cut_witness(g, (), exact_limit)
    if w is not None and w.crossing_max_degree <= l:
        return ConnectivityVerdict("not_robust", w)
    return ConnectivityVerdict("robust")


def is_l_iron(g: Graph, l: int, exact_limit: int = IRON_LIMIT) -> ConnectivityVerdict:
    """Connected after deleting any ``U`` with ``|U| <= l`` together with any
    edge set of maximum degree ``<= l``.  Removals are tried by size, then
    lexicographically."""
    _check_size("iron scan", g.n, exact_limit)
    for size in range(0, max(l, 0) + 1):
        if size > g.n:
            break
        for u in combinations(range(g.n), size):
            keep = [v for v in range(g.n) if v not in u]
            if len(keep) < 2:
                continue
            found = _min_cut(_local_masks(g, keep))
            if found is not None and found[1] <= l:
                return ConnectivityVerdict("not_iron", _witness(g, keep, found[0], u))
    return ConnectivityVerdict("iron")


def robustness_level(g: Graph, exact_limit: int = ROBUST_LIMIT) -> int:
    """Largest ``l`` for which ``g`` is ``l``-robust (``-1`` if disconnected);
    ``n - 1`` stands in for "unbounded" on fewer than two vertices."""
    w = min_cut_witness(g, (), exact_limit)
    return g.n - 1 if w is None else w.crossing_max_degree - 1


def islands(g: Graph, l: int, exact_limit: int = ROBUST_LIMIT) -> IslandPartition:
    """Equivalence classes of ``l``-robust adjacency: two vertices share an
    island iff every bipartition with crossing max degree ``<= l`` keeps them
    on one side."""
    _check_size("island scan", g.n, exact_limit)
    if g.n == 0:
        return IslandPartition(l, ())
    good = [x[c <= l] for x, c in _scan_cuts(g.masks)]
    good_x = np.concatenate(good) if good else np.zeros(0, dtype=np.uint32)
    if len(good_x) == 0:
        return IslandPartition(l, (tuple(range(g.n)),))
    groups: dict[bytes, list[int]] = {}
    for v in range(g.n):
        sig = np.packbits(((good_x >> np.uint32(v)) & np.uint32(1)).astype(np.uint8)).tobytes()
        groups.setdefault(sig, []).append(v)
    blocks = sorted(tuple(b) for b in groups.values())
    return IslandPartition(l, tuple(blocks))


def codeg_threshold(alpha: Fraction, n: int) -> int:
    return math.ceil(Fraction(19, 20) * Fraction(alpha) ** 2 * n)


def codeg_island_candidates(g: Graph, alpha: Fraction, cap: int = CANDIDATE_CAP) -> list[list[list[int]]]:
    """Every grouping of the components of the ``(19 alpha^2 n / 20)``-codeg
    graph, fewest blocks first and then lexicographically.  Each candidate is
    a list of sorted vertex blocks ordered by smallest vertex."""
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    f = codeg_graph(g, codeg_threshold(alpha, g.n))
    comps = [members(c) for c in f.components()]
    if len(comps) > cap:
        raise CapacityError("codeg component groupings", len(comps), cap)
    if len(comps) > 20 / alpha**2:
        raise HypothesisError("component_bound", f"{len(comps)} codeg components exceed 20/alpha^2")
    out = []
    for part in set_partitions(list(range(len(comps)))):
        blocks = sorted(sorted(v for c in block for v in comps[c]) for block in part)
        out.append(blocks)
    out.sort(key=lambda p: (len(p), p))
    return out


# decomposition -----------------------------------------------------------

@dataclass
class DecompositionStep:
    step: int
    block: list[int]
    alpha: Fraction
    level: int
    robust: bool
    split_into: list[list[int]] = field(default_factory=list)


@dataclass
class Decomposition:
    blocks: list[list[int]]
    levels: list[int]  # level each final block was verified robust at
    isomorphism: str  # exact | fingerprint-only | mismatch | single
    history: list[DecompositionStep]

    def to_json(self) -> dict:
        return {
            "blocks": self.blocks,
            "levels": self.levels,
            "isomorphism": self.isomorphism,
            "history": [
                {
                    "step": h.step,
                    "block": h.block,
                    "alpha": str(h.alpha),
                    "level": h.level,
                    "robust": h.robust,
                    "split_into": h.split_into,
                }
                for h in self.history
            ],
        }


def decomposition_level(alpha: Fraction, n: int) -> int:
    return max(math.ceil(Fraction(alpha) ** 4 * n / 40), 1)


def blocks_isomorphism(g: Graph, blocks: Sequence[Sequence[int]], exact_limit: int = ISO_EXACT_LIMIT) -> str:
    """``single``, ``exact`` (all pairwise isomorphic, checked exhaustively),
    ``fingerprint-only`` (invariants agree, sizes beyond the exact limit) or ``mismatch``."""
    if len(blocks) <= 1:
        return "single"
    graphs = [induced(g, b).graph for b in blocks]
    first = graphs[0]
    if any(h.n != first.n for h in graphs):
        return "mismatch"
    if first.n <= exact_limit:
        ok = all(find_isomorphism(first, h) is not None for h in graphs[1:])
        return "exact" if ok else "mismatch"
    fp = fingerprint(first)
    return "fingerprint-only" if all(fingerprint(h) == fp for h in graphs[1:]) else "mismatch"


def robust_decomposition(
    g: Graph,
    alpha: Fraction,
    exact_limit: int = ROBUST_LIMIT,
    iso_exact_limit: int = ISO_EXACT_LIMIT,
) -> Decomposition:
    """Split into islands until every block is robust at its working level.

    A block of order ``n_i`` handled with density ``alpha_i`` is tested at
    level ``max(ceil(alpha_i^4 n_i / 40), 1)``; if it is not robust there it
    is split into islands of that level, every new block must have minimum
    degree at least ``4 alpha_i n' / 3``, and its children are handled with
    ``alpha_{i+1} = 4 alpha_i / 3``.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if g.n == 0:
        raise ValueError("empty graph")
    if g.min_degree() < alpha * g.n:
        raise HypothesisError("valency", f"min degree {g.min_degree()} < alpha*n = {alpha * g.n}")
    history: list[DecompositionStep] = []
    done: list[tuple[list[int], int]] = []
    queue: deque[tuple[list[int], Fraction, int]] = deque([(list(range(g.n)), alpha, 0)])
    while queue:
        block, a, step = queue.popleft()
        sub = induced(g, block)
        level = decomposition_level(a, len(block))
        verdict = is_l_robust(sub.graph, level, exact_limit)
        rec = DecompositionStep(step, block, a, level, verdict.holds)
        history.append(rec)
        if verdict.holds:
            done.append((block, level))
            continue
        parts = islands(sub.graph, level, exact_limit)
        required_ratio = Fraction(4, 3) * a
        for part in parts.blocks:
            verts = sub.to_original(part)
            child = induced(g, verts).graph
            if child.min_degree() < required_ratio * len(verts):
                rec.split_into = [sub.to_original(p) for p in parts.blocks]
                raise DecompositionError(verts, child.min_degree(), required_ratio * len(verts), step)
            rec.split_into.append(verts)
        for verts in rec.split_into:
            queue.append((verts, required_ratio, step + 1))
    done.sort()
    blocks = [b for b, _ in done]
    return Decomposition(blocks, [lv for _, lv in done], blocks_isomorphism(g, blocks, iso_exact_limit), history)


# non-iron witness --------------------------------------------------------

@dataclass(frozen=True)
class NonIronConstruction:
    removed: tuple[int, ...]  # L1 + L + P
    high_l2: tuple[int, ...]  # L
    high_outside: tuple[int, ...]  # P
    deleted_edges: tuple[tuple[int, int], ...]  # E'
    max_deleted_degree: int
    separated: tuple[int, ...]  # W2 minus the removed vertices


def construct_non_iron_witness(
    r: Graph, l1: Iterable[int], l2: Iterable[int], w1: Iterable[int], w2: Iterable[int], rho: Fraction
) -> NonIronConstruction:
    """Build the vertex set and edge set whose removal disconnects ``r``,
    with both of size/max degree at most ``t = 2 sqrt(rho) k'`` (``k' = |V(r)|``).

    Comparisons against ``sqrt(rho) k'`` are made exactly by squaring.
    """
    rho = Fraction(rho)
    if rho <= 0:
        raise HypothesisError("rho_positive", str(rho))
    k = r.n
    L1, L2, W1, W2 = (set(s) for s in (l1, l2, w1, w2))
    rk2 = rho * k * k  # (sqrt(rho) k')^2

    def at_least_t(x: int) -> bool:  # x >= 2 sqrt(rho) k'
        return x * x >= 4 * rk2

    outside = set(range(k)) - L1 - L2
    om = mask_of(outside)
    l2m = mask_of(L2)
    if len(L1) ** 2 > rk2:
        raise HypothesisError("l1_size", f"|L1| = {len(L1)} exceeds sqrt(rho) k'")
    e_l2_out = sum((r.masks[v] & om).bit_count() for v in L2)
    if e_l2_out > rk2:
        raise HypothesisError("l2_edges", f"e(L2, rest) = {e_l2_out} exceeds rho k'^2 = {rk2}")
    if not (W1 <= outside and W2 <= outside):
        raise HypothesisError("w_outside", "W1 and W2 must avoid L1 and L2")
    if W1 & W2:
        raise HypothesisError("w_disjoint", "W1 and W2 intersect")
    nbr_w2 = 0
    for v in W2:
        nbr_w2 |= r.masks[v]
    if nbr_w2 & ~mask_of(L1 | L2):
        raise HypothesisError("w2_neighbourhood", "N(W2) is not contained in L1 + L2")
    if min(len(W1), len(W2)) ** 2 <= 4 * rk2:
        raise HypothesisError("w_size", "min(|W1|, |W2|) must exceed 2 sqrt(rho) k'")

    high_l2 = {v for v in L2 if at_least_t((r.masks[v] & om).bit_count())}
    high_out = {v for v in outside if at_least_t((r.masks[v] & l2m).bit_count())}
    removed = L1 | high_l2 | high_out
    side_a = L2 - high_l2
    side_b = outside - high_out
    deleted = sorted(
        (min(u, v), max(u, v)) for u in side_a for v in members(r.masks[u] & mask_of(side_b))
    )
    deg: dict[int, int] = {}
    for u, v in deleted:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return NonIronConstruction(
        tuple(sorted(removed)),
        tuple(sorted(high_l2)),
        tuple(sorted(high_out)),
        tuple(deleted),
        max(deg.values(), default=0),
        tuple(sorted(W2 - removed)),
    )


def non_iron_witness_check(
    r: Graph, l1: Iterable[int], l2: Iterable[int], w1: Iterable[int], w2: Iterable[int], rho: Fraction
) -> bool:
    """Construct the witness and confirm it: at most ``t`` removed vertices,
    deleted edges of max degree at most ``t``, and the remaining graph
    separates what is left of ``W2`` from what is left of ``W1``."""
    w1 = list(w1)
    c = construct_non_iron_witness(r, l1, l2, w1, w2, rho)
    rk2 = Fraction(rho) * r.n * r.n
    if len(c.removed) ** 2 > 4 * rk2 or c.max_deleted_degree ** 2 > 4 * rk2:
        raise InternalConsistencyError("constructed witness exceeds the 2 sqrt(rho) k' budget")
    rest_w1 = set(w1) - set(c.removed)
    if not c.separated or not rest_w1:
        raise InternalConsistencyError("a witness side became empty after removal")
    cut = set(c.deleted_edges)
    keep = mask_of(set(range(r.n)) - set(c.removed))
    masks = list(r.masks)
    for u, v in cut:
        masks[u] &= ~(1 << v)
        masks[v] &= ~(1 << u)
    h = Graph.from_masks(masks)
    comp = h.component_of(c.separated[0], keep)
    if comp & mask_of(rest_w1):
        raise InternalConsistencyError("W2 is still connected to W1 after removal")
    return True


# digraphs ----------------------------------------------------------------

def is_l_strongly_connected(d: Digraph, l: int, exact_limit: int = STRONG_LIMIT) -> bool:
    """``d - U`` strongly connected for every ``|U| <= l`` (a single vertex counts)."""
    if l >= 1 and d.n > exact_limit:
        raise CapacityError("strong connectivity scan", d.n, exact_limit)
    full = (1 << d.n) - 1
    for size in range(0, max(l, 0) + 1):
        for u in combinations(range(d.n), size):
            if not d.is_strongly_connected(full & ~mask_of(u)):
                return False
    return True


def short_path(d: Digraph, h: int, x: int, y: int) -> list[int]:
    """Shortest directed ``x -> y`` path; its length (arc count) must not
    exceed ``floor(n/h) + 1`` when ``d`` is ``h``-strongly connected."""
    if x == y:
        raise ValueError("endpoints must differ")
    if h < 1:
        raise ValueError("h must be positive")
    prev = {x: -1}
    queue = deque([x])
    while queue and y not in prev:
        u = queue.popleft()
        for v in d.successors(u):
            if v not in prev:
                prev[v] = u
                queue.append(v)
    if y not in prev:
        raise HypothesisError("strongly_connected", f"no directed path from {x} to {y}")
    path = [y]
    while path[-1] != x:
        path.append(prev[path[-1]])
    path.reverse()
    if len(path) - 1 > d.n // h + 1:
        raise InternalConsistencyError(
            f"path of length {len(path) - 1} exceeds n/h + 1 = {d.n // h + 1}"
        )
    return path
