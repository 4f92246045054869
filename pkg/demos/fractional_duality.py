"""Fractional matching and cover on the Petersen graph and an odd cycle,
and the lift of a half-integral matching to the 2-blow-up."""

from vthamilton.graph import blow_up, cycle_graph
from vthamilton.instances import fixture
from vthamilton.matching import fvc, is_integral_matching, lift_blowup_matching, nu_star

for name, g in (("petersen", fixture("petersen")[0]), ("C5", cycle_graph(5))):
    val, m = nu_star(g)
    cval, cover = fvc(g)
    print(f"{name}: nu* = {val}, fvc = {cval}")
    print("  matching weights:", {e: str(w) for e, w in m.weights.items()})
    print("  cover values:    ", [str(x) for x in cover.values])
    lifted = lift_blowup_matching(g, m)
    print(f"  lift to 2-blow-up: {len(lifted)} edges, matching = {is_integral_matching(blow_up(g, 2), lifted)}")
