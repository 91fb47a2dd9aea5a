"""Replay a cutoff-raising run move by move.

Loads the prop2 fixture, runs the random-order cutoff-raising mechanism,
then replays its trace from the all-zeros profile. Each move names a
college and the rows that went up together (raising the plain row can
drag resource rows along, and vice versa). The final profile is optimal:
one more unit anywhere would break feasibility of the induced demand.
"""

from capmatch import MECHANISMS, audit, load_fixture
from capmatch.cutoffs import increment, induced_matching, zero_profile

SEED = 1

market = load_fixture("prop2")
trace = MECHANISMS["irc"](market, seed=SEED)

k = zero_profile(market)
print(f"start  {k.to_lists()}  demand size {len(induced_matching(market, k))}")
for step, (college, rows) in enumerate(trace.moves, start=1):
    k = increment(market, k, college, rows[0])
    demand = induced_matching(market, k)
    print(
        f"move {step:2d}  college {college} rows {list(rows)} -> "
        f"{k.to_lists()}  demand size {len(demand)}"
    )

assert k == trace.profile
assert induced_matching(market, k) == trace.matching

print()
print("final matching:", sorted(trace.matching.contracts))
report = audit(market, trace.matching)
print("direct_envy_stable:", report.direct_envy_stable)
print("weakly_stable:     ", report.weakly_stable)
print("resource_efficient:", report.resource_efficient)
print()
print("The shared unit stays on the shelf: the only direct-envy stable")
print("matching here wastes it, and every mechanism that guarantees")
print("direct-envy stability must land on it.")
