"""Run the Hamilton cycle pipeline on a handful of instances and summarise
which route (single continent, spanning-tree gluing, circuit gluing) won."""

from vthamilton import PipelineConfig, find_hamilton_cycle, verify_hamilton_cycle
from vthamilton.graph import Graph
from vthamilton.instances import AutomorphismWitness, chained_cliques, circulant, double_clique, fixture


def kk_k2(k):
    n, s = 4 * k, 2 * k
    edges = [(L * s + i, L * s + k + j) for L in (0, 1) for i in range(k) for j in range(k)]
    edges += [(i, s + i) for i in range(s)]
    swap = [(v + s) % n for v in range(n)]
    rot = [(v // s) * s + ((v % s) // k) * k + ((v % s) % k + 1) % k for v in range(n)]
    side = [(v // s) * s + (v % s + k) % s for v in range(n)]
    return Graph(n, edges), AutomorphismWitness([swap, rot, side])


def show(name, g, w, cfg=None):
    rep = find_hamilton_cycle(g, w, config=cfg)
    if rep.success:
        win = rep.candidates[rep.winner]
        ok = verify_hamilton_cycle(g, rep.cycle)
        print(f"{name:22s} cycle found  blocks={len(win.blocks)} case={win.details['case']} verified={ok}")
        print(f"{'':22s} {' '.join(map(str, rep.cycle))}")
    else:
        print(f"{name:22s} no cycle     stage={rep.failure_stage}")
        for c in rep.candidates:
            print(f"{'':22s} candidate {c.index} ({c.source}, {len(c.blocks)} blocks): {c.status} at {c.stage}")


if __name__ == "__main__":
    show("circulant(12,{1,2,3})", *circulant(12, {1, 2, 3}))
    show("double_clique(12)", *double_clique(12))
    show("chained cliques 3x4", *chained_cliques(3, 4))
    k = kk_k2(3)
    layers = [list(range(6)), list(range(6, 12))]
    show("K33 x K2 (two layers)", *k, PipelineConfig(iron_level=0, candidate_source="explicit", explicit_partitions=[layers]))
    show("petersen", *fixture("petersen"))
