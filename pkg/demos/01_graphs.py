"""Transitive graphs and their girth.

Every experiment in girthlab is gated on girth, so the first thing to look at
is which graphs we have and how tree-like they are.
"""

from girthlab.graphs import LCF_CATALOG, build_cayley, build_cycle, build_lcf, is_bipartite

print("cycles: girth equals length")
for n in (5, 12, 200):
    print(" ", build_cycle(n))

print("\ncubic symmetric graphs from LCF notation")
for name in LCF_CATALOG:
    g = build_lcf(name)
    print(f"  {name:14s} n={g.n:3d} girth={g.girth:2d} bipartite={is_bipartite(g)}")

# Cayley graphs of SL(2, p) with A = [[1,2],[0,1]], B = [[1,0],[2,1]] and inverses.
# The girth grows slowly with p while n grows like p^3.
print("\nCayley graphs of SL(2, p)")
for p in (3, 5, 7, 13):
    g = build_cayley(p)
    print(f"  p={p:2d} n={g.n:5d} d={g.d} girth={g.girth}")
