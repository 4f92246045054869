"""Regular pairs at desk scale: exact certificates, slicing, super-regularisation,
ideals, reduced graphs, Hamilton paths in dense pairs and the shifted digraph.

Cluster partitions are always supplied by the caller; nothing here computes a
regularity partition.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, HypothesisError, InternalConsistencyError
from .graph import Digraph, Graph, induced, mask_of
from .pathition import EndpointRequest, pathition

log = logging.getLogger(__name__)

PAIR_LIMIT = 12
_ROWS = 256


def _subset_matrix(k: int) -> np.ndarray:
    """Row ``s`` is the 0/1 membership vector of subset ``s`` of ``range(k)``."""
    s = np.arange(1 << k, dtype=np.int64)
    return ((s[:, None] >> np.arange(k)) & 1).astype(np.int64)


@dataclass(frozen=True)
class PairCertificate:
    A: tuple[int, ...]
    B: tuple[int, ...]
    density: Fraction
    epsilon: Fraction
    d: Fraction
    regular: bool  # epsilon-regular
    super_regular: bool  # epsilon-regular and every degree at least d * (opposite side)
    worst_witness: dict | None = None

    @property
    def dense(self) -> bool:
        return self.density >= self.d

    @property
    def regular_with_density(self) -> bool:
        """The pair is ``(epsilon, d)``-regular: epsilon-regular of density at least ``d``."""
        return self.regular and self.dense

    def to_json(self) -> dict:
        return {
            "A": list(self.A),
            "B": list(self.B),
            "density": str(self.density),
            "epsilon": str(self.epsilon),
            "d": str(self.d),
            "regular": self.regular,
            "super_regular": self.super_regular,
            "worst_witness": self.worst_witness,
        }


def pair_certificate(
    g: Graph, a: Iterable[int], b: Iterable[int], eps: Fraction, d: Fraction, exact_limit: int = PAIR_LIMIT
) -> PairCertificate:
    """Exact regularity verdict by enumerating every ``X`` subset of ``A`` and
    ``Y`` subset of ``B`` with ``|X| >= eps|A|`` and ``|Y| >= eps|B|``.

    With ``eps = p/q`` the test ``|d(X,Y) - d(A,B)| < eps`` is evaluated as
    ``q |e(X,Y)|A||B| - e(A,B)|X||Y|| < p |X||Y||A||B|`` in integers.
    """
    eps, d = Fraction(eps), Fraction(d)
    A, B = sorted(set(a)), sorted(set(b))
    if not A or not B:
        raise ValueError("both sides must be nonempty")
    if set(A) & set(B):
        raise ValueError("sides must be disjoint")
    if max(len(A), len(B)) > exact_limit:
        raise CapacityError("pair certificate", max(len(A), len(B)), exact_limit)
    na, nb = len(A), len(B)
    bm = mask_of(B)
    am = mask_of(A)
    adj = np.array([[1 if g.has_edge(x, y) else 0 for y in B] for x in A], dtype=np.int64)
    e_ab = int(adj.sum())
    density = Fraction(e_ab, na * nb)
    p, q = eps.numerator, eps.denominator

    xs = _subset_matrix(na)
    ys = _subset_matrix(nb)
    xsize = xs.sum(axis=1)
    ysize = ys.sum(axis=1)
    xok = np.nonzero(xsize * q >= p * na)[0]
    yok = np.nonzero(ysize * q >= p * nb)[0]
    regular = True
    worst = None
    worst_key = -1.0
    if len(xok) and len(yok):
        deg_xb = xs[xok] @ adj  # e(X, b) for every qualifying X and every b
        ysel = ys[yok].T
        ysz = ysize[yok]
        ab = na * nb
        for start in range(0, len(xok), _ROWS):
            exy = deg_xb[start:start + _ROWS] @ ysel
            xy = xsize[xok[start:start + _ROWS]][:, None] * ysz[None, :]
            gap = np.abs(exy * ab - e_ab * xy)
            bad = q * gap >= p * xy * ab
            if bad.any():
                regular = False
                dev = np.where(bad, gap / (xy * ab), -1.0)
                i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
                if dev[i, j] > worst_key:
                    worst_key = float(dev[i, j])
                    xi = int(xok[start + i])
                    yj = int(yok[j])
                    X = [A[t] for t in range(na) if xi >> t & 1]
                    Y = [B[t] for t in range(nb) if yj >> t & 1]
                    worst = {
                        "X": X,
                        "Y": Y,
                        "density_XY": str(Fraction(int(exy[i, j]), len(X) * len(Y))),
                        "density_AB": str(density),
                    }
    degrees_ok = all((g.masks[x] & bm).bit_count() >= d * nb for x in A) and all(
        (g.masks[y] & am).bit_count() >= d * na for y in B
    )
    return PairCertificate(tuple(A), tuple(B), density, eps, d, regular, regular and degrees_ok, worst)


def slice_check(
    g: Graph, a, b, a_sub, b_sub, eps: Fraction, d: Fraction, exact_limit: int = PAIR_LIMIT
) -> bool:
    """Is ``(A', B')`` a ``(3 eps, d/2)``-regular pair, given that ``(A, B)`` is
    ``(eps, d)``-regular with ``eps <= d/2`` and ``A', B'`` keep a third of each side?"""
    eps, d = Fraction(eps), Fraction(d)
    a, b, a_sub, b_sub = (sorted(set(s)) for s in (a, b, a_sub, b_sub))
    if not set(a_sub) <= set(a) or not set(b_sub) <= set(b):
        raise HypothesisError("containment", "slices must lie inside the pair")
    if 3 * len(a_sub) < len(a) or 3 * len(b_sub) < len(b):
        raise HypothesisError("slice_size", "each slice must keep at least a third of its side")
    if eps > d / 2:
        raise HypothesisError("eps_vs_d", "need eps <= d/2")
    if not pair_certificate(g, a, b, eps, d, exact_limit).regular_with_density:
        raise HypothesisError("regular_pair", "(A, B) is not (eps, d)-regular")
    ok = pair_certificate(g, a_sub, b_sub, 3 * eps, d / 2, exact_limit).regular_with_density
    if not ok:
        log.warning("slice of a certified regular pair failed the (3 eps, d/2) check")
    return ok


@dataclass(frozen=True)
class ClusterPartition:
    exceptional: tuple[int, ...]
    clusters: tuple[tuple[int, ...], ...]

    def __init__(self, exceptional: Iterable[int], clusters: Iterable[Iterable[int]]):
        ex = tuple(sorted(exceptional))
        cl = tuple(tuple(sorted(c)) for c in clusters)
        sizes = {len(c) for c in cl}
        if len(sizes) > 1:
            raise ValueError("clusters must have equal size")
        flat = list(ex) + [v for c in cl for v in c]
        if len(flat) != len(set(flat)):
            raise ValueError("clusters and exceptional set must be disjoint")
        object.__setattr__(self, "exceptional", ex)
        object.__setattr__(self, "clusters", cl)

    @property
    def cluster_size(self) -> int:
        return len(self.clusters[0]) if self.clusters else 0

    def covers(self, n: int) -> bool:
        return sorted(list(self.exceptional) + [v for c in self.clusters for v in c]) == list(range(n))


@dataclass
class SuperRegularization:
    partition: ClusterPartition
    moved: list[list[int]]
    certificates: dict[tuple[int, int], PairCertificate]
    alarms: list[str] = field(default_factory=list)


def super_regularize(
    g: Graph,
    p: ClusterPartition,
    matching: Sequence[tuple[int, int]],
    eps: Fraction,
    d: Fraction,
    exact_limit: int = PAIR_LIMIT,
) -> SuperRegularization:
    """Move ``ceil(eps m)`` vertices of every cluster into the exceptional set:
    from a matched cluster the ones with fewest neighbours in the partner
    cluster, from an unmatched cluster the lowest labels.  Matched pairs are
    then certified ``(2 eps, d/2)``-super-regular; failures become alarms."""
    eps, d = Fraction(eps), Fraction(d)
    if not p.covers(g.n):
        raise ValueError("cluster partition does not cover V(G)")
    partner: dict[int, int] = {}
    for i, j in matching:
        if i == j or i in partner or j in partner:
            raise ValueError("cluster pairs must form a matching")
        partner[i], partner[j] = j, i
    for i, j in matching:
        cert = pair_certificate(g, p.clusters[i], p.clusters[j], eps, d, exact_limit)
        if not cert.regular_with_density:
            raise HypothesisError("regular_pair", f"clusters {i} and {j} are not (eps, d)-regular")
    m = p.cluster_size
    q = math.ceil(eps * m)
    moved: list[list[int]] = []
    kept: list[list[int]] = []
    for i, c in enumerate(p.clusters):
        if i in partner:
            pm = mask_of(p.clusters[partner[i]])
            order = sorted(c, key=lambda v: ((g.masks[v] & pm).bit_count(), v))
        else:
            order = sorted(c)
        moved.append(sorted(order[:q]))
        kept.append(sorted(order[q:]))
    new_p = ClusterPartition(list(p.exceptional) + [v for mv in moved for v in mv], kept)
    certs: dict[tuple[int, int], PairCertificate] = {}
    alarms = []
    for i, j in matching:
        if not kept[i] or not kept[j]:
            alarms.append(f"pair ({i}, {j}) emptied by the move")
            continue
        cert = pair_certificate(g, kept[i], kept[j], 2 * eps, d / 2, exact_limit)
        certs[(i, j)] = cert
        if not cert.super_regular:
            alarms.append(f"pair ({i}, {j}) is not (2 eps, d/2)-super-regular after the move")
    return SuperRegularization(new_p, moved, certs, alarms)


# ideals ------------------------------------------------------------------

@dataclass
class IdealResult:
    a_star: list[int]
    b_star: list[int]
    threshold: int  # required degree into the opposite ideal part
    steps: int
    trace_a: list[Fraction]  # total unhappiness of B before each step and at the end
    trace_b: list[Fraction]
    alarms: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.alarms


def _greedy_ideal_side(g: Graph, pool: list[int], other: list[int], steps: int, T: int):
    """Pick ``steps`` vertices of ``pool`` so that every vertex of ``other``
    gains ``T`` neighbours, by the unhappiness potential."""
    chosen: list[int] = []
    chosen_mask = 0

    def unhappiness(k: int) -> Fraction:
        # sum_{r=k+1}^{T} 2^-r
        return Fraction(1, 2**k) - Fraction(1, 2**T) if k < T else Fraction(0)

    def totals() -> tuple[Fraction, dict[int, Fraction]]:
        u = {y: unhappiness((g.masks[y] & chosen_mask).bit_count()) for y in other}
        return sum(u.values(), Fraction(0)), u

    trace = []
    for _ in range(steps):
        total, u = totals()
        trace.append(total)
        best, best_w = None, Fraction(-1)
        for x in pool:
            if chosen_mask >> x & 1:
                continue
            w = sum((u[y] / 2 for y in other if g.has_edge(x, y) and u[y] > 0), Fraction(0))
            if w > best_w:
                best, best_w = x, w
        if best is None:
            break
        chosen.append(best)
        chosen_mask |= 1 << best
    trace.append(totals()[0])
    short = [y for y in other if (g.masks[y] & chosen_mask).bit_count() < T]
    return sorted(chosen), trace, short


def build_ideal(g: Graph, a: Iterable[int], b: Iterable[int], theta: Fraction, d: Fraction) -> IdealResult:
    """Greedy constructive ideal of ``ceil(theta m)`` vertices per side: every
    vertex on the opposite side should end with at least ``ceil(theta d m / 4)``
    neighbours in it.  Shortfalls are reported as alarms."""
    theta, d = Fraction(theta), Fraction(d)
    A, B = sorted(set(a)), sorted(set(b))
    if set(A) & set(B):
        raise ValueError("sides must be disjoint")
    m = len(A)
    if len(B) != m:
        raise ValueError("sides must have equal size")
    steps = math.ceil(theta * m)
    if steps < 1:
        raise HypothesisError("theta_m", "theta * m must be at least 1")
    T = math.ceil(theta * d * m / 4)
    a_star, trace_a, short_b = _greedy_ideal_side(g, A, B, steps, T)
    b_star, trace_b, short_a = _greedy_ideal_side(g, B, A, steps, T)
    alarms = []
    if short_b:
        alarms.append(f"vertices {short_b} of B have fewer than {T} neighbours in A*")
    if short_a:
        alarms.append(f"vertices {short_a} of A have fewer than {T} neighbours in B*")
    for name, tr in (("A*", trace_a), ("B*", trace_b)):
        if any(later > earlier for earlier, later in zip(tr, tr[1:])):
            alarms.append(f"total unhappiness increased while building {name}")
    return IdealResult(a_star, b_star, T, steps, trace_a, trace_b, alarms)


def ideal_containment_check(
    g: Graph, a, b, a_star, b_star, a_sub, b_sub, eps_star: Fraction, d_star: Fraction, exact_limit: int = PAIR_LIMIT
) -> bool:
    """Super-regularity of ``(A', B')`` for ``A* <= A' <= A`` and ``B* <= B' <= B``."""
    a, b, a_star, b_star, a_sub, b_sub = (set(s) for s in (a, b, a_star, b_star, a_sub, b_sub))
    if not (a_star <= a_sub <= a and b_star <= b_sub <= b):
        raise ValueError("containment A* <= A' <= A and B* <= B' <= B violated")
    return pair_certificate(g, a_sub, b_sub, eps_star, d_star, exact_limit).super_regular


# reduced graphs ----------------------------------------------------------

@dataclass
class ReducedGraph:
    graph: Graph
    mode: str  # exact | density-only
    densities: dict[tuple[int, int], Fraction]
    irregular_pairs: list[tuple[int, int]]


def reduced_graph(
    g: Graph, p: ClusterPartition, eps: Fraction, d: Fraction, mode: str = "exact", exact_limit: int = PAIR_LIMIT
) -> ReducedGraph:
    """Cluster graph: ``ij`` is an edge when the pair has density at least
    ``d`` (and, in exact mode, is certified eps-regular)."""
    if mode not in ("exact", "density-only"):
        raise ValueError("mode must be 'exact' or 'density-only'")
    d = Fraction(d)
    k = len(p.clusters)
    edges, dens, irregular = [], {}, []
    for i in range(k):
        for j in range(i + 1, k):
            ci, cj = p.clusters[i], p.clusters[j]
            if mode == "exact":
                cert = pair_certificate(g, ci, cj, eps, d, exact_limit)
                dens[(i, j)] = cert.density
                if not cert.regular:
                    irregular.append((i, j))
                    continue
            else:
                dens[(i, j)] = Fraction(g.edges_between(mask_of(ci), mask_of(cj)), len(ci) * len(cj))
            if dens[(i, j)] >= d and dens[(i, j)] > 0:
                edges.append((i, j))
    return ReducedGraph(Graph(k, edges), mode, dens, irregular)


def reduced_graphs_two_densities(
    g: Graph, p: ClusterPartition, eps: Fraction, d1: Fraction, d2: Fraction, mode: str = "exact"
) -> tuple[ReducedGraph, ReducedGraph]:
    if not Fraction(d1) < Fraction(d2):
        raise ValueError("need d1 < d2")
    return reduced_graph(g, p, eps, d1, mode), reduced_graph(g, p, eps, d2, mode)


def hamilton_path_in_pair(
    g: Graph, a: Iterable[int], b: Iterable[int], x: int, y: int, exact_limit: int = PAIR_LIMIT
) -> list[int] | None:
    """Hamilton path of the bipartite graph ``G[A, B]`` from ``x in A`` to
    ``y in B``, or ``None`` when none exists."""
    A, B = sorted(set(a)), sorted(set(b))
    if len(A) != len(B):
        raise ValueError("sides must have equal size")
    if len(A) > exact_limit:
        raise CapacityError("pair Hamilton path", len(A), exact_limit)
    if x not in A or y not in B:
        raise ValueError("need x in A and y in B")
    sub = induced(g, A + B)
    am = mask_of(sub.index()[v] for v in A)
    cross = Graph(sub.graph.n, [(u, v) for u, v in sub.graph.edges if (am >> u & 1) != (am >> v & 1)])
    idx = sub.index()
    res = pathition(cross, EndpointRequest([(idx[x], idx[y])]), exact_limit=2 * exact_limit)
    if not res.feasible:
        return None
    return sub.to_original(res.system.paths[0])


# shifted digraph ---------------------------------------------------------

@dataclass(frozen=True)
class ShiftedDigraph:
    digraph: Digraph
    pairs: tuple[tuple[int, int], ...]  # (A_i, B_i)
    partner: tuple[int, ...]
    source: Graph


def shifted_digraph(r2: Graph, pairs: Sequence[tuple[int, int]]) -> ShiftedDigraph:
    """Arcs ``partner(Y) -> X`` and ``partner(X) -> Y`` for every edge ``XY``
    of ``r2`` that is not itself a matched pair.  On the three edge kinds
    this gives: ``A_iA_j`` yields ``B_j->A_i, B_i->A_j``; ``B_iB_j`` yields
    ``A_j->B_i, A_i->B_j``; ``A_iB_j`` (``i != j``) yields ``A_j->A_i, B_i->B_j``."""
    partner = [-1] * r2.n
    for a, b in pairs:
        if a == b or partner[a] >= 0 or partner[b] >= 0:
            raise ValueError("pairs do not form a matching")
        if not r2.has_edge(a, b):
            raise ValueError(f"pair ({a}, {b}) is not an edge of the reduced graph")
        partner[a], partner[b] = b, a
    if any(p < 0 for p in partner):
        raise ValueError("matching is not perfect")
    arcs = set()
    for x, y in r2.edges:
        if partner[x] == y:
            continue
        arcs.add((partner[y], x))
        arcs.add((partner[x], y))
    return ShiftedDigraph(Digraph(r2.n, arcs), tuple((int(a), int(b)) for a, b in pairs), tuple(partner), r2)


def zigzag_lift(path: Sequence[int], sd: ShiftedDigraph) -> list[int]:
    """``X_1 Y_1 X_2 Y_2 ... X_t Y_t`` with ``Y_j`` the partner of ``X_j``;
    every consecutive pair is checked to be an edge of the source graph."""
    if not path:
        raise ValueError("empty path")
    for u, v in zip(path, path[1:]):
        if not sd.digraph.has_arc(u, v):
            raise ValueError(f"{u} -> {v} is not an arc of the shifted digraph")
    out = []
    for x in path:
        out += [x, sd.partner[x]]
    for u, v in zip(out, out[1:]):
        if not sd.source.has_edge(u, v):
            raise InternalConsistencyError(f"lifted walk uses non-edge {u}-{v}")
    return out
