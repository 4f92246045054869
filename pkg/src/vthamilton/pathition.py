"""Spanning systems of vertex-disjoint paths with prescribed endpoints.

Two engines answer a request ``(x_1, y_1), ..., (x_k, y_k)``:

* a complete subset DP (up to ``DP_LIMIT`` vertices).  The ``k`` paths are
  chained ``x_1 .. y_1 => x_2 .. y_2 => ...``; a state is the set ``S`` of
  non-terminal vertices used so far together with the current path index,
  and ``dp_i[S]`` is the bitset of vertices the current path can end at
  (bit ``N`` meaning "still at ``x_i``").
* a budgeted backtracking search (up to ``BACKTRACK_LIMIT`` vertices) that
  answers ``unknown`` when its node budget or time budget runs out.

Only the ``2k`` terminals must avoid the exceptional set; interior vertices
may lie in it, and every vertex, exceptional or not, must be covered.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph, mask_of, members

DP_LIMIT = 18
BACKTRACK_LIMIT = 24
NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class EndpointRequest:
    pairs: tuple[tuple[int, int], ...]
    exceptional: tuple[int, ...] = ()

    def __init__(self, pairs: Iterable[Sequence[int]], exceptional: Iterable[int] = ()):
        ps = tuple((int(x), int(y)) for x, y in pairs)
        ex = tuple(sorted(set(int(u) for u in exceptional)))
        if not ps:
            raise ValueError("a request needs at least one endpoint pair")
        ends = [v for p in ps for v in p]
        if len(set(ends)) != len(ends):
            raise ValueError("endpoints must be pairwise distinct")
        bad = set(ends) & set(ex)
        if bad:
            raise ValueError(f"endpoints {sorted(bad)} lie in the exceptional set")
        object.__setattr__(self, "pairs", ps)
        object.__setattr__(self, "exceptional", ex)

    @property
    def endpoints(self) -> list[int]:
        return [v for p in self.pairs for v in p]

    def to_json(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs], "exceptional": list(self.exceptional)}

    @classmethod
    def from_json(cls, data: dict) -> "EndpointRequest":
        return cls(data["pairs"], data.get("exceptional", []))


@dataclass(frozen=True)
class PathSystem:
    paths: tuple[tuple[int, ...], ...]

    def __init__(self, paths: Iterable[Sequence[int]]):
        object.__setattr__(self, "paths", tuple(tuple(int(v) for v in p) for p in paths))

    @property
    def endpoint_map(self) -> dict[int, tuple[int, int]]:
        return {i: (p[0], p[-1]) for i, p in enumerate(self.paths) if p}

    def vertices(self) -> list[int]:
        return [v for p in self.paths for v in p]

    def to_json(self) -> dict:
        return {"paths": [list(p) for p in self.paths]}

    @classmethod
    def from_json(cls, data: dict) -> "PathSystem":
        return cls(data["paths"])


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class PathitionResult:
    verdict: str  # feasible | infeasible | parity_violation | unknown
    system: PathSystem | None = None
    engine: str = ""
    nodes: int = 0
    detail: str = ""

    @property
    def feasible(self) -> bool:
        return self.verdict == "feasible"

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "engine": self.engine, "nodes": self.nodes, "detail": self.detail}
        out["system"] = self.system.to_json() if self.system is not None else None
        return out


# verification ------------------------------------------------------------

def verify_path_system(g: Graph, req: EndpointRequest, s: PathSystem, spanning: bool = True) -> CheckResult:
    reasons = []
    if len(s.paths) != len(req.pairs):
        reasons.append(f"count: {len(s.paths)} paths for {len(req.pairs)} pairs")
    seen: dict[int, int] = {}
    for i, p in enumerate(s.paths):
        if len(p) < 2:
            reasons.append(f"path {i} has fewer than two vertices")
            continue
        if any(not 0 <= v < g.n for v in p):
            reasons.append(f"path {i} leaves the vertex range")
            continue
        if len(set(p)) != len(p):
            reasons.append(f"path {i} repeats a vertex")
        for a, b in zip(p, p[1:]):
            if not g.has_edge(a, b):
                reasons.append(f"path {i}: {a}-{b} is not an edge")
                break
        for v in p:
            if v in seen and seen[v] != i:
                reasons.append(f"disjointness: vertex {v} in paths {seen[v]} and {i}")
            seen.setdefault(v, i)
        if i < len(req.pairs) and (p[0], p[-1]) != req.pairs[i]:
            reasons.append(f"path {i} runs {p[0]}..{p[-1]}, requested {req.pairs[i][0]}..{req.pairs[i][1]}")
    if spanning and set(seen) != set(range(g.n)):
        missing = sorted(set(range(g.n)) - set(seen))
        reasons.append(f"coverage: vertices {missing} are not covered")
    return CheckResult(not reasons, tuple(reasons))


def is_extension(s: PathSystem, s_prime: PathSystem) -> CheckResult:
    """``s_prime`` extends ``s``: same endpoints per index, vertex sets grow,
    and the paths of ``s_prime`` are pairwise disjoint."""
    if len(s.paths) != len(s_prime.paths):
        return CheckResult(False, ("count mismatch",))
    reasons = []
    for i, (p, q) in enumerate(zip(s.paths, s_prime.paths)):
        if not p or not q or (p[0], p[-1]) != (q[0], q[-1]):
            reasons.append(f"path {i}: endpoints differ")
        if not set(p) <= set(q):
            reasons.append(f"path {i}: vertex set is not contained")
    flat = s_prime.vertices()
    if len(flat) != len(set(flat)):
        reasons.append("extension paths are not disjoint")
    return CheckResult(not reasons, tuple(reasons))


# subset DP engine --------------------------------------------------------

class _LayerIndex:
    """For every non-terminal ``u`` and popcount layer, the states containing ``u``."""

    def __init__(self, n_free: int):
        size = 1 << n_free
        states = np.arange(size, dtype=np.int64)
        pc = np.bitwise_count(states)
        self.steps: list[list[tuple[int, np.ndarray, np.ndarray]]] = []
        for p in range(1, n_free + 1):
            layer = states[pc == p]
            row = []
            for u in range(n_free):
                sel = layer[(layer >> u) & 1 == 1]
                row.append((u, sel, sel ^ (1 << u)))
            self.steps.append(row)


def _dp_pathition(g: Graph, pairs: Sequence[tuple[int, int]]) -> PathSystem | None:
    terms = {v for p in pairs for v in p}
    free = [v for v in range(g.n) if v not in terms]
    nf = len(free)
    pos = {v: i for i, v in enumerate(free)}
    at_x = 1 << nf

    def free_nbrs(v: int) -> int:
        m = 0
        for w in g.adj[v]:
            if w in pos:
                m |= 1 << pos[w]
        return m

    layers = _LayerIndex(nf)
    size = 1 << nf
    dps: list[np.ndarray] = []
    preds: list[list[int]] = []
    closes: list[int] = []
    for i, (x, y) in enumerate(pairs):
        pred = [free_nbrs(v) | (at_x if g.has_edge(x, v) else 0) for v in free]
        close = free_nbrs(y) | (at_x if g.has_edge(x, y) else 0)
        if i == 0:
            dp = np.zeros(size, dtype=np.int64)
            dp[0] = at_x
        else:
            dp = np.where((dps[-1] & closes[-1]) != 0, at_x, 0).astype(np.int64)
        for row in layers.steps:
            for u, sel, src in row:
                hit = (dp[src] & pred[u]) != 0
                if hit.any():
                    dp[sel[hit]] |= 1 << u
        dps.append(dp)
        preds.append(pred)
        closes.append(close)

    full = size - 1
    last = int(dps[-1][full]) & closes[-1]
    if not last:
        return None
    paths: list[list[int]] = []
    s = full
    end = last & -last
    for i in range(len(pairs) - 1, -1, -1):
        interior = []
        while end != at_x:
            u = end.bit_length() - 1
            interior.append(free[u])
            s ^= end
            cand = int(dps[i][s]) & preds[i][u]
            end = cand & -cand
        x, y = pairs[i]
        paths.append([x] + interior[::-1] + [y])
        if i > 0:
            cand = int(dps[i - 1][s]) & closes[i - 1]
            end = cand & -cand
    if s != 0:
        raise AssertionError("reconstruction did not consume every free vertex")
    return PathSystem(paths[::-1])


# backtracking engine -----------------------------------------------------

class _OutOfBudget(Exception):
    pass


def _backtrack_pathition(
    g: Graph, pairs: Sequence[tuple[int, int]], node_budget: int, deadline: float | None
) -> tuple[PathSystem | None, int]:
    k = len(pairs)
    full = g.full_mask
    term_mask = mask_of(v for p in pairs for v in p)
    later_terms = [mask_of(v for p in pairs[i + 1:] for v in p) for i in range(k)]
    masks = g.masks
    nodes = 0
    paths: list[list[int]] = []

    def viable(i: int, cur: int, used: int) -> bool:
        rest = full & ~used
        avail = rest | (1 << cur) | (1 << pairs[i][1]) | later_terms[i]
        for v in members(rest):
            if (masks[v] & avail).bit_count() < 2:
                return False
        return True

    def rec(i: int, cur: int, used: int, path: list[int]) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise _OutOfBudget
        if deadline is not None and nodes % 1024 == 0 and time.monotonic() > deadline:
            raise _OutOfBudget
        x, y = pairs[i]
        rest = full & ~used
        opts = members(masks[cur] & rest)
        opts.sort(key=lambda v: ((masks[v] & rest).bit_count(), v))
        for v in opts:
            nu = used | (1 << v)
            if not viable(i, v, nu):
                continue
            path.append(v)
            if rec(i, v, nu, path):
                return True
            path.pop()
        if masks[cur] >> y & 1:
            done = path + [y]
            if i == k - 1:
                if rest == 0:
                    paths.append(done)
                    return True
                return False
            nx = pairs[i + 1][0]
            paths.append(done)
            if rec(i + 1, nx, used, [nx]):
                return True
            paths.pop()
        return False

    x0 = pairs[0][0]
    try:
        found = rec(0, x0, term_mask, [x0])
    except _OutOfBudget:
        return None, -nodes
    return (PathSystem(paths) if found else None), nodes


# front ends --------------------------------------------------------------

def pathition(
    g: Graph,
    req: EndpointRequest,
    exact_limit: int = DP_LIMIT,
    backtrack_limit: int = BACKTRACK_LIMIT,
    node_budget: int = NODE_BUDGET,
    budget_ms: int | None = None,
) -> PathitionResult:
    """Spanning path system realising ``req`` in ``g``, or a verdict."""
    for v in req.endpoints + list(req.exceptional):
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} is outside the graph")
    pairs = list(req.pairs)
    if g.n <= exact_limit:
        system = _dp_pathition(g, pairs)
        if system is None:
            return PathitionResult("infeasible", None, "dp")
        _assert_valid(g, req, system)
        return PathitionResult("feasible", system, "dp")
    if g.n <= backtrack_limit:
        deadline = None if budget_ms is None else time.monotonic() + budget_ms / 1000
        system, nodes = _backtrack_pathition(g, pairs, node_budget, deadline)
        if nodes < 0:
            return PathitionResult("unknown", None, "backtrack", -nodes, "search budget exhausted")
        if system is None:
            return PathitionResult("infeasible", None, "backtrack", nodes)
        _assert_valid(g, req, system)
        return PathitionResult("feasible", system, "backtrack", nodes)
    return PathitionResult(
        "unknown", None, "none", 0, f"{g.n} vertices exceed the engine limit {max(exact_limit, backtrack_limit)}"
    )


def balance_holds(req: EndpointRequest, side_a: Iterable[int]) -> bool:
    a = set(side_a)
    ends = req.endpoints
    in_a = sum(1 for v in ends if v in a)
    return 2 * in_a == len(ends)


def bipathition(g: Graph, p, req: EndpointRequest, **kw) -> PathitionResult:
    """As :func:`pathition`, but refuses requests whose terminals are not
    split evenly between the two sides of the bipartition ``p``.  Paths may
    use any edge of ``g``."""
    if not balance_holds(req, p.A):
        return PathitionResult("parity_violation", None, "", 0, "terminals are not balanced between A and B")
    return pathition(g, req, **kw)


def _assert_valid(g: Graph, req: EndpointRequest, system: PathSystem) -> None:
    check = verify_path_system(g, req, system, spanning=True)
    if not check:
        raise AssertionError(f"engine produced an invalid path system: {check.reasons}")
