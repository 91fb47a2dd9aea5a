"""Build a tiny market by hand and poke at it.

Three students, two colleges with one seat each, and a single scholarship
unit shared between both colleges. Walks through construction, validation,
feasibility checks, a blocking audit, and the exhaustive census.
"""

from capmatch import (
    Contract,
    Market,
    Matching,
    audit,
    census,
    is_feasible,
    validate_market,
)

# Pair notation: (college, resource). Resource 0 is "no resource", any
# other index means admission bundled with one unit of that resource.
market = Market(
    n_students=3,
    college_quotas=[1, 1],
    resource_quotas=[1],
    regions=[[0, 1]],
    priorities=[(0, 1, 2), (2, 0, 1)],
    preferences=[
        ((0, 1), (0, 0), (1, 0)),
        ((0, 0), (1, 1), (1, 0)),
        ((1, 1), (1, 0)),
    ],
)

print("validation findings:")
for level, message in validate_market(market) or [("ok", "none")]:
    print(f"  [{level}] {message}")

print()
both_scholarships = Matching([Contract(0, 0, 1), Contract(2, 1, 1)])
one_scholarship = Matching([Contract(0, 0, 1), Contract(1, 1, 0)])
print("two scholarships at once feasible?", is_feasible(market, both_scholarships))
print("one scholarship plus a plain seat? ", is_feasible(market, one_scholarship))

print()
print("audit of the one-scholarship matching:")
report = audit(market, one_scholarship)
print("  counts:", report.counts, "total:", report.total)
for name, value in report.flags.items():
    print(f"  {name}: {value}")

print()
cen = census(market)
print(f"census: {len(cen.matchings)} feasible individually rational matchings")
for flag in ("stable", "direct_envy_stable", "weakly_stable", "envy_free"):
    hits = cen.set_of(flag)
    print(f"  {flag}: {len(hits)}")
    for mu in hits:
        print(f"    {sorted(mu.contracts)}")
