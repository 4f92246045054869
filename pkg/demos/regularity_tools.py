"""Exact pair certificates, the greedy ideal and the shifted digraph."""

from fractions import Fraction as F

from vthamilton.graph import Graph
from vthamilton.regularity import build_ideal, pair_certificate, shifted_digraph, zigzag_lift

half = Graph(8, [(i, 4 + j) for i in range(4) for j in range(4) if i <= j])
cert = pair_certificate(half, range(4), range(4, 8), F(1, 4), F(1, 2))
print("half graph 4+4: density", cert.density, "regular", cert.regular, "witness", cert.worst_witness)

m = 8
near = Graph(2 * m, [(i, m + j) for i in range(m) for j in range(m) if i != j])
ideal = build_ideal(near, range(m), range(m, 2 * m), F(1, 2), F(3, 4))
print("ideal A*", ideal.a_star, "B*", ideal.b_star, "threshold", ideal.threshold, "alarms", ideal.alarms)
print("unhappiness trace", [str(t) for t in ideal.trace_a])

r2 = Graph(6, [(0, 1), (2, 3), (4, 5), (0, 2), (3, 5)])
sd = shifted_digraph(r2, [(0, 1), (2, 3), (4, 5)])
print("shifted digraph arcs", sorted(sd.digraph.arcs))
print("zigzag of 1 -> 2 -> 5:", zigzag_lift([1, 2, 5], sd))
