"""Class membership tests and basic-graph classification.

Covers: exhaustive even-hole search (desk scale), polynomial star-cutset
detection, clique-cutset detection via minimal triangulation, and
classification into the basic kinds (clique / hole / long pyramid /
extended nontrivial basic).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import OverBudgetError
from .graph import (
    Graph,
    bits,
    components_masks,
    is_clique,
    is_connected,
    mask_of,
    maximal_cliques,
)

CLIQUE = "clique"
HOLE = "hole"
LONG_PYRAMID = "long_pyramid"
EXTENDED_BASIC = "extended_nontrivial_basic"
NOT_BASIC = "not_basic"

EVEN_HOLE_MAX_N = 64


@dataclass(frozen=True)
class HoleWitness:
    """Chordless cycle of length >= 4, in traversal order."""

    cycle: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.cycle)

    def is_even(self) -> bool:
        return len(self.cycle) % 2 == 0

    def validate(self, g: Graph) -> bool:
        c = self.cycle
        k = len(c)
        if k < 4 or len(set(c)) != k:
            return False
        for i in range(k):
            for j in range(i + 1, k):
                expected = j - i == 1 or (i == 0 and j == k - 1)
                if g.has_edge(c[i], c[j]) != expected:
                    return False
        return True


@dataclass(frozen=True)
class StarCutsetWitness:
    """Cutset with a center adjacent to every other cutset vertex."""

    center: int
    cutset: frozenset[int]

    def validate(self, g: Graph) -> bool:
        if self.center not in self.cutset:
            return False
        for v in self.cutset:
            if v != self.center and not g.has_edge(self.center, v):
                return False
        return len(components_masks(g, mask_of(self.cutset))) >= 2


@dataclass(frozen=True)
class PyramidStructure:
    apex: int
    triangle: tuple[int, int, int]
    paths: tuple[tuple[int, ...], ...]  # each from triangle vertex to apex


@dataclass(frozen=True)
class ExtendedBasicStructure:
    """Line graph of a tree plus the adjacent special pair."""

    x: int
    y: int
    line_vertices: tuple[int, ...]
    extended_cliques: tuple[frozenset[int], ...]  # maximal cliques of size >= 3
    leaf_nodes: frozenset[int]
    tree_edges: tuple[tuple[int, int], ...]  # reconstructed tree, synthetic ids
    tree_edge_of: dict[int, tuple[int, int]] = field(hash=False)  # L-vertex -> tree edge


@dataclass(frozen=True)
class BasicKind:
    tag: str
    pyramid: PyramidStructure | None = None
    extended: ExtendedBasicStructure | None = None

    @property
    def is_basic(self) -> bool:
        return self.tag != NOT_BASIC


def holes(g: Graph) -> Iterator[tuple[int, ...]]:
    """Enumerate every hole (chordless cycle, length >= 4) exactly once.

    DFS over chordless paths rooted at the least cycle vertex; each hole is
    reported with its least vertex first and second vertex smaller than the
    last (canonical direction). Yield order is lexicographic.
    """
    adj = g.adj
    for v0 in range(g.n):
        alive = ~((1 << (v0 + 1)) - 1) & g.full_mask
        a0 = adj[v0]

        def rec(path: list[int], banned: int):
            last = path[-1]
            cand = adj[last] & alive & ~banned
            if len(path) >= 3:
                for w in bits(cand & a0):
                    if path[1] < w:
                        yield tuple(path) + (w,)
            for w in bits(cand & ~a0):
                yield from rec(path + [w], banned | adj[last] | (1 << w))

        for v1 in bits(a0 & alive):
            yield from rec([v0, v1], (1 << v0) | (1 << v1))


def find_even_hole(g: Graph, max_n: int = EVEN_HOLE_MAX_N) -> HoleWitness | None:
    """First even hole in the canonical enumeration, or None.

    Exhaustive search intended for desk-scale inputs; refuses n > max_n.
    """
    if g.n > max_n:
        raise OverBudgetError(f"find_even_hole: n={g.n} exceeds limit {max_n}")
    for cyc in holes(g):
        if len(cyc) % 2 == 0:
            return HoleWitness(cyc)
    return None


def find_star_cutset(g: Graph) -> StarCutsetWitness | None:
    """Polynomial star-cutset test over all centers x.

    Three exhaustive cases per center: (a) removing N[x] leaves >= 2
    components; (b) some neighbor u with N(u) inside N[x] can be isolated
    from the nonempty remainder by N[x] - u; (c) x dominates the graph and
    two non-adjacent neighbors survive the removal of N[x] minus both.
    Returns the first witness in scan order (center ascending, cases in the
    above order, least qualifying vertices).
    """
    if not is_connected(g):
        raise ValueError("find_star_cutset expects a connected graph")
    for x in range(g.n):
        closed = g.closed_mask(x)
        rest = g.full_mask & ~closed
        if len(components_masks(g, closed)) >= 2:
            return StarCutsetWitness(x, frozenset(bits(closed)))
        if rest:
            for u in bits(g.adj[x]):
                if not g.adj[u] & rest:
                    return StarCutsetWitness(x, frozenset(bits(closed & ~(1 << u))))
        else:
            for u in bits(g.adj[x]):
                others = g.adj[x] & ~g.adj[u] & ~((1 << (u + 1)) - 1)
                if others:
                    v = (others & -others).bit_length() - 1
                    s = closed & ~(1 << u) & ~(1 << v)
                    return StarCutsetWitness(x, frozenset(bits(s)))
    return None


def _mcs_m(g: Graph) -> tuple[list[int], list[int]]:
    """MCS-M minimal triangulation.

    Returns (elimination order: first eliminated first, filled adjacency
    masks). Ties in the weight selection break to the least vertex id.
    """
    n = g.n
    weight = [0] * n
    numbered = 0
    filled = list(g.adj)
    visit_order: list[int] = []  # numbered n, n-1, ..., 1
    for _ in range(n):
        v = -1
        best = -1
        for u in range(n):
            if not (numbered >> u) & 1 and weight[u] > best:
                best = weight[u]
                v = u
        # Reachability: u gains weight if some path v..u has unnumbered
        # interior vertices, every one of weight < weight[u].
        unnumbered = g.full_mask & ~numbered & ~(1 << v)
        reached: list[int] = []
        for u in bits(unnumbered):
            if filled[v] >> u & 1:
                reached.append(u)
                continue
            interior_ok = mask_of(
                w for w in bits(unnumbered & ~(1 << u)) if weight[w] < weight[u]
            )
            seen = 1 << v
            frontier = 1 << v
            hit = False
            while frontier and not hit:
                nxt = 0
                for a in bits(frontier):
                    if filled[a] >> u & 1:
                        hit = True
                        break
                    nxt |= filled[a] & interior_ok & ~seen
                seen |= nxt
                frontier = nxt
            if hit:
                reached.append(u)
        for u in reached:
            weight[u] += 1
            filled[v] |= 1 << u
            filled[u] |= 1 << v
        numbered |= 1 << v
        visit_order.append(v)
    return list(reversed(visit_order)), filled


def find_clique_cutset(g: Graph) -> StarCutsetWitness | None:
    """Clique cutset via minimal triangulation (MCS-M) madj sets.

    Every clique minimal separator of g appears as the higher-neighborhood
    of some vertex in a minimal elimination order, so checking each such set
    for clique-ness and separation is complete. Center of the returned
    witness is the least cutset member.
    """
    if not is_connected(g):
        raise ValueError("find_clique_cutset expects a connected graph")
    order, filled = _mcs_m(g)
    position = {v: i for i, v in enumerate(order)}
    for v in order:
        later = mask_of(u for u in bits(filled[v]) if position[u] > position[v])
        if later and is_clique(g, later):
            if len(components_masks(g, later)) >= 2:
                members = list(bits(later))
                return StarCutsetWitness(members[0], frozenset(members))
    return None


def _find_long_pyramid(g: Graph) -> PyramidStructure | None:
    """Recognize graphs that are exactly a long pyramid.

    Degree profile must be four vertices of degree 3 (triangle + apex) and
    the rest of degree 2; the three paths are recovered by walking from the
    apex and validated for coverage, length >= 2, and equal parity.
    """
    n = g.n
    if n < 7:
        return None
    deg3 = [v for v in g.vertices() if g.degree(v) == 3]
    if len(deg3) != 4 or any(g.degree(v) not in (2, 3) for v in g.vertices()):
        return None
    for apex in deg3:
        tri = [v for v in deg3 if v != apex]
        if not (
            g.has_edge(tri[0], tri[1])
            and g.has_edge(tri[0], tri[2])
            and g.has_edge(tri[1], tri[2])
        ):
            continue
        if any(g.has_edge(apex, t) for t in tri):
            continue  # a length-1 path would make the pyramid not long
        tri_mask = mask_of(tri)
        paths = []
        used = 1 << apex
        ok = True
        for start in bits(g.adj[apex]):
            path = [apex, start]
            used |= 1 << start
            cur, prev = start, apex
            while not ((1 << cur) & tri_mask):
                nxts = [w for w in bits(g.adj[cur]) if w != prev]
                if len(nxts) != 1:
                    ok = False
                    break
                prev, cur = cur, nxts[0]
                path.append(cur)
                if (1 << cur) & used:
                    ok = False
                    break
                used |= 1 << cur
            if not ok:
                break
            paths.append(tuple(reversed(path)))  # triangle end first
        if not ok or len(paths) != 3:
            continue
        ends = sorted(p[0] for p in paths)
        if ends != sorted(tri):
            continue
        if used != g.full_mask:
            continue
        lengths = [len(p) - 1 for p in paths]
        if any(l < 2 for l in lengths) or len({l % 2 for l in lengths}) != 1:
            continue
        if g.num_edges() != 3 + sum(lengths):
            continue
        paths.sort(key=lambda p: p[0])
        return PyramidStructure(apex, tuple(sorted(tri)), tuple(paths))
    return None


def _try_extended(g: Graph, x: int, y: int) -> ExtendedBasicStructure | None:
    lmask = g.full_mask & ~(1 << x) & ~(1 << y)
    if lmask == 0:
        return None
    # Cheap necessary conditions before clique enumeration: no line vertex may
    # see both specials, and prospective leaf nodes (seeing exactly one) are
    # the only attachments.
    if g.adj[x] & g.adj[y] & lmask:
        return None
    if not (g.adj[x] & lmask) or not (g.adj[y] & lmask):
        return None
    if not is_connected(g, lmask):
        return None
    cliques = sorted(maximal_cliques(g, within=lmask))
    if any(m.bit_count() < 2 for m in cliques):
        return None
    # Krausz partition: every vertex in at most 2 maximal cliques, every edge
    # in exactly one.
    membership: dict[int, list[int]] = {v: [] for v in bits(lmask)}
    edge_cover = 0
    for i, m in enumerate(cliques):
        k = m.bit_count()
        edge_cover += k * (k - 1) // 2
        for v in bits(m):
            membership[v].append(i)
            if len(membership[v]) > 2:
                return None
    m_l = sum((g.adj[v] & lmask).bit_count() for v in bits(lmask)) // 2
    if edge_cover != m_l:
        return None
    # Reconstruct the tree: clique nodes then pendant nodes.
    n_cliques = len(cliques)
    pendant_id: dict[int, int] = {}
    tree_edges = []
    edge_of: dict[int, tuple[int, int]] = {}
    next_id = n_cliques
    for v in bits(lmask):
        mem = membership[v]
        if len(mem) == 2:
            e = (mem[0], mem[1])
        else:
            pendant_id[v] = next_id
            e = (mem[0], next_id)
            next_id += 1
        tree_edges.append(e)
        edge_of[v] = e
    n_nodes = next_id
    if n_nodes != lmask.bit_count() + 1:
        return None
    tadj: dict[int, set[int]] = {i: set() for i in range(n_nodes)}
    for a, b in tree_edges:
        tadj[a].add(b)
        tadj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        a = stack.pop()
        for b in tadj[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    if len(seen) != n_nodes:
        return None
    extended = [m for m in cliques if m.bit_count() >= 3]
    if len(extended) < 2:
        return None
    leaf_nodes = frozenset(v for v, mem in membership.items() if len(mem) == 1)
    xy = (1 << x) | (1 << y)
    for v in bits(lmask):
        hits = (g.adj[v] & xy).bit_count()
        if (v in leaf_nodes) != (hits == 1) or hits > 1:
            return None
    return ExtendedBasicStructure(
        x=x,
        y=y,
        line_vertices=tuple(bits(lmask)),
        extended_cliques=tuple(frozenset(bits(m)) for m in extended),
        leaf_nodes=leaf_nodes,
        tree_edges=tuple(sorted(tree_edges)),
        tree_edge_of=edge_of,
    )


def extended_basic_structures(g: Graph) -> Iterator[ExtendedBasicStructure]:
    """All valid (x, y) representations, in ascending (x, y) order."""
    if g.n < 7:  # 2 extended cliques need >= 5 line vertices
        return
    for x, y in g.edges():
        s = _try_extended(g, x, y)
        if s is not None:
            yield s


def classify_basic(g: Graph) -> BasicKind:
    """Taxonomy tag with witness structure; NOT_BASIC when nothing matches.

    Precedence: clique, hole, long pyramid, extended nontrivial basic.
    """
    if is_clique(g, g.full_mask):
        return BasicKind(CLIQUE)
    if g.n >= 4 and all(g.degree(v) == 2 for v in g.vertices()) and is_connected(g):
        return BasicKind(HOLE)
    pyr = _find_long_pyramid(g)
    if pyr is not None:
        return BasicKind(LONG_PYRAMID, pyramid=pyr)
    for ext in extended_basic_structures(g):
        return BasicKind(EXTENDED_BASIC, extended=ext)
    return BasicKind(NOT_BASIC)


def check_extended_clique_neighbors(g: Graph, ext: ExtendedBasicStructure) -> bool:
    """True iff x and y each see at most one vertex per extended clique and
    no extended clique sees both."""
    for k in ext.extended_cliques:
        km = mask_of(k)
        nx = (g.adj[ext.x] & km).bit_count()
        ny = (g.adj[ext.y] & km).bit_count()
        if nx > 1 or ny > 1 or (nx and ny):
            return False
    return True
