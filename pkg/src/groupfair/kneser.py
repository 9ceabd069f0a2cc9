"""Generalized Kneser graphs, exact chromatic numbers, and the coloring
based construction of monotone instances without balanced fair allocations.

K(b, r, s) has all r-element subsets of a b-element ground set as vertices;
two subsets are adjacent when they share at most s-1 elements. These graphs
parameterize balanced two-group allocations: with b = 2t goods, a vertex is
the first group's bundle of a balanced allocation, and adjacency captures
"the bundles overlap in at most one good". A proper coloring with y colors
turns into an instance with y monotone agents none of whose balanced
allocations is fair for everyone: the agent owning the color of the first
bundle values it (or, seen from the second group, its complement) at zero
while every one-good-removed rival bundle is worth one to her.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .errors import SearchSpaceTooLargeError
from .model import Instance, Valuation, full_mask

# Largest vertex count we will materialize, and the branch-and-bound cap.
BUILD_GUARD = 10**4
EXACT_VERTEX_CAP = 70


@dataclass(frozen=True)
class KneserGraph:
    """K(b, r, s) with vertices in lexicographic subset order.

    ``vertices[i]`` is the i-th r-subset as a bitmask over 0..b-1;
    ``adj[i]`` is the bitmask of vertex indices adjacent to i.
    """

    b: int
    r: int
    s: int
    vertices: tuple[int, ...]
    adj: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.vertices)

    def is_edge(self, i: int, j: int) -> bool:
        return bool(self.adj[i] >> j & 1)

    def degree(self, i: int) -> int:
        return self.adj[i].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [
            (i, j) for i in range(self.n) for j in range(i + 1, self.n) if self.adj[i] >> j & 1
        ]


@dataclass(frozen=True)
class Coloring:
    """A proper vertex coloring; colors are 0..num_colors-1, all used."""

    colors: tuple[int, ...]
    num_colors: int


def build_kneser(b: int, r: int, s: int) -> KneserGraph:
    """Construct K(b, r, s); subsets adjacent iff they share < s elements."""
    if not (b >= r >= s >= 1):
        raise ValueError(f"need b >= r >= s >= 1, got ({b}, {r}, {s})")
    count = math.comb(b, r)
    if count > BUILD_GUARD:
        raise SearchSpaceTooLargeError(
            f"K({b},{r},{s}) has {count} vertices, above the cap of {BUILD_GUARD}", bound=count
        )
    vertices = [0] * count
    for i, combo in enumerate(combinations(range(b), r)):
        mask = 0
        for e in combo:
            mask |= 1 << e
        vertices[i] = mask
    adj = [0] * count
    for i in range(count):
        vi = vertices[i]
        for j in range(i + 1, count):
            if (vi & vertices[j]).bit_count() <= s - 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return KneserGraph(b, r, s, tuple(vertices), tuple(adj))


def is_proper(g: KneserGraph, col: Coloring) -> bool:
    if len(col.colors) != g.n or col.num_colors <= 0:
        return False
    used = set()
    for c in col.colors:
        if not (0 <= c < col.num_colors):
            return False
        used.add(c)
    if len(used) != col.num_colors:
        return False
    for i in range(g.n):
        rest = g.adj[i] >> (i + 1)
        j = i + 1
        while rest:
            if rest & 1 and col.colors[i] == col.colors[j]:
                return False
            rest >>= 1
            j += 1
    return True


def to_dimacs(g: KneserGraph) -> str:
    """DIMACS graph format, vertices 1-based."""
    edges = g.edges()
    lines = [f"c K({g.b},{g.r},{g.s})", f"p edge {g.n} {len(edges)}"]
    lines.extend(f"e {i + 1} {j + 1}" for i, j in edges)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# chromatic number


def _greedy_clique(g: KneserGraph) -> list[int]:
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    clique: list[int] = []
    cmask = 0
    for v in order:
        if g.adj[v] & cmask == cmask:
            clique.append(v)
            cmask |= 1 << v
    return clique


def _greedy_coloring(g: KneserGraph) -> Coloring:
    # largest degree first, smallest feasible color
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    colors = [-1] * g.n
    for v in order:
        taken = 0
        rest = g.adj[v]
        while rest:
            low = rest & -rest
            u = low.bit_length() - 1
            rest ^= low
            if colors[u] >= 0:
                taken |= 1 << colors[u]
        c = 0
        while taken >> c & 1:
            c += 1
        colors[v] = c
    return Coloring(tuple(colors), max(colors) + 1)


def _dsatur_exact(g: KneserGraph, clique: list[int], ub: Coloring) -> Coloring:
    n = g.n
    deg = [g.degree(v) for v in range(n)]
    best_num = ub.num_colors
    best = list(ub.colors)
    colors = [-1] * n
    nbr_colors = [0] * n  # bitmask of colors seen on each vertex's neighbors

    def paint(v: int, c: int) -> list[int]:
        colors[v] = c
        touched = []
        rest = g.adj[v]
        while rest:
            low = rest & -rest
            u = low.bit_length() - 1
            rest ^= low
            if not nbr_colors[u] >> c & 1:
                nbr_colors[u] |= 1 << c
                touched.append(u)
        return touched

    def unpaint(v: int, c: int, touched: list[int]) -> None:
        colors[v] = -1
        for u in touched:
            nbr_colors[u] &= ~(1 << c)

    # symmetry breaking: a maximal clique needs pairwise distinct colors
    for i, v in enumerate(clique):
        paint(v, i)
    start_used = len(clique)

    def rec(done: int, used: int) -> None:
        nonlocal best_num, best
        if used >= best_num:
            return
        if done == n:
            best_num = used
            best = colors[:]
            return
        v = -1
        key = None
        for u in range(n):
            if colors[u] < 0:
                cand = (-nbr_colors[u].bit_count(), -deg[u], u)
                if key is None or cand < key:
                    key = cand
                    v = u
        limit = min(used + 1, best_num - 1)
        taken = nbr_colors[v]
        for c in range(limit):
            if taken >> c & 1:
                continue
            touched = paint(v, c)
            rec(done + 1, max(used, c + 1))
            unpaint(v, c, touched)
            if best_num <= max(used, len(clique)):
                return  # cannot beat the clique bound anyway

    if start_used < best_num:
        rec(start_used, start_used)
    return Coloring(tuple(best), best_num)


def chromatic_number(g: KneserGraph, mode: str = "exact") -> tuple[int, int, Coloring | None]:
    """Chromatic bounds: (lower, upper, witness coloring for the upper).

    ``bounds`` mode returns a greedy clique lower bound and a
    largest-degree-first greedy upper bound. ``exact`` mode closes the gap
    by branch and bound; lower == upper == chi there.
    """
    if mode not in ("exact", "bounds"):
        raise ValueError(f"unknown mode {mode!r}")
    if g.n == 0:
        return 0, 0, Coloring((), 0)
    clique = _greedy_clique(g)
    greedy = _greedy_coloring(g)
    if mode == "bounds":
        return len(clique), greedy.num_colors, greedy
    if g.n > EXACT_VERTEX_CAP:
        raise SearchSpaceTooLargeError(
            f"exact coloring capped at {EXACT_VERTEX_CAP} vertices, graph has {g.n}", bound=g.n
        )
    if len(clique) == greedy.num_colors:
        return greedy.num_colors, greedy.num_colors, greedy
    exact = _dsatur_exact(g, clique, greedy)
    return exact.num_colors, exact.num_colors, exact


# ---------------------------------------------------------------------------
# tightness construction


def tightness_instance(g: KneserGraph, col: Coloring, split: tuple[int, int]) -> Instance:
    """Instance with one monotone agent per color and b goods such that no
    balanced two-group allocation is fair for all agents.

    Needs K(2t, t, 2). A vertex is read as the bundle the first group gets;
    an agent placed in the second group therefore interprets the vertices
    of her color through their complements. Each agent values a bundle at 0
    exactly when it is a subset of one of her color's bundles, and at 1
    otherwise. In any balanced allocation the first bundle is a vertex, its
    color names one agent, and that agent values her group's bundle at 0
    while the other group's bundle stays at 1 after any single removal.
    """
    if g.s != 2 or g.b != 2 * g.r:
        raise ValueError("tightness construction needs K(2t, t, 2)")
    if not is_proper(g, col):
        raise ValueError("coloring is not proper for this graph")
    n1, n2 = split
    if n1 < 0 or n2 < 0 or n1 + n2 != col.num_colors:
        raise ValueError(f"split {split} must sum to {col.num_colors} colors")
    m = g.b
    full = full_mask(m)
    class_bundles: list[list[int]] = [[] for _ in range(col.num_colors)]
    for v, c in enumerate(col.colors):
        class_bundles[c].append(g.vertices[v])
    agents = []
    for c in range(col.num_colors):
        in_first = c < n1
        bundles = [bm if in_first else full ^ bm for bm in class_bundles[c]]
        table = {}
        for sub in range(full + 1):
            table[sub] = 0 if any(sub & ~bm == 0 for bm in bundles) else 1
        agents.append(Valuation.table_of(m, table))
    members = [list(range(n1)), list(range(n1, n1 + n2))]
    return Instance.fixed(m, agents, members)
