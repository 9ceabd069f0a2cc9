"""From a graph coloring to a fair-division impossibility, step by step.

K(4,2,2) has the six 2-subsets of {0,1,2,3} as vertices, with an edge
whenever two subsets share at most one element. Any two distinct 2-subsets
qualify, so the graph is complete and needs 6 colors. Reading each vertex
as "the bundle the first group might get" turns a proper coloring into six
agents, one per color, each rejecting exactly the balanced bundles of her
color class. Six agents block all six balanced splits; five agents always
leave one open.
"""

from groupfair import (
    EF1,
    Instance,
    SearchConstraints,
    build_kneser,
    chromatic_number,
    find_fair,
    tightness_instance,
)

g = build_kneser(4, 2, 2)
print(f"K(4,2,2): {g.n} vertices, {len(g.edges())} edges")
for i, v in enumerate(g.vertices):
    print(f"  vertex {i}: goods {{{', '.join(str(b) for b in range(4) if v >> b & 1)}}}")

lower, upper, col = chromatic_number(g)
print(f"chromatic number: {upper} (lower bound {lower} met)")
print(f"coloring: {list(col.colors)}")

inst = tightness_instance(g, col, (3, 3))
print(f"\ntightness instance: {inst.n} agents in groups of 3+3 over {inst.m} goods")

cert = find_fair(inst, SearchConstraints(EF1, balanced_allocation=True))
assert not cert.found
print(f"balanced EF1 search: exhausted all {cert.examined} balanced splits, none works")

# the same six agents all on one side block the splits just as well; drop
# any one color class and exactly her vertex reopens as the first bundle
solo = tightness_instance(g, col, (6, 0))
assert not find_fair(solo, SearchConstraints(EF1, balanced_allocation=True)).found
print("\nsame story with all six agents in the first group; now drop one:")
for drop in range(6):
    keep = [solo.agents[a] for a in range(6) if a != drop]
    sub = Instance.fixed(4, keep, [list(range(5)), []])
    cert = find_fair(sub, SearchConstraints(EF1, balanced_allocation=True))
    bundles = [list(b) for b in cert.allocation.goods_lists()]
    print(f"  without the color-{drop} agent: found {bundles}")

print("\nsix colors force the impossibility; five agents never can")
