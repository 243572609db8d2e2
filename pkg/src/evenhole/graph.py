"""Bitset-backed simple undirected graphs and GF(2) linear algebra.

Vertex sets are Python ints used as bitsets throughout the internals;
public helpers accept either a bitmask or an iterable of vertex ids.
All values are immutable after construction, so they can be shared
freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


class GraphError(ValueError):
    """Invalid graph construction or vertex out of range."""


def mask_of(vertices: Iterable[int]) -> int:
    """Pack an iterable of vertex ids into a bitmask."""
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Iterate set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Simple undirected graph on dense vertex ids 0..n-1.

    Adjacency is stored as one bitmask per vertex. The empty graph
    (n == 0) is legal and counts as connected.
    """

    __slots__ = ("n", "adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphError(f"negative vertex count {n}")
        adj = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.adj = tuple(adj)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def vertices(self) -> range:
        return range(self.n)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as sorted (u, v) pairs with u < v."""
        out = []
        for u in range(self.n):
            rest = self.adj[u] >> (u + 1)
            for off in bits(rest):
                out.append((u, u + 1 + off))
        return out

    def num_edges(self) -> int:
        return sum(m.bit_count() for m in self.adj) // 2

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self.adj[v]))

    def closed_mask(self, v: int) -> int:
        return self.adj[v] | (1 << v)

    def as_mask(self, s) -> int:
        """Coerce an int bitmask or an iterable of ids to a validated mask."""
        m = s if isinstance(s, int) else mask_of(s)
        if m < 0 or m & ~self.full_mask:
            raise GraphError(f"vertex set out of range for n={self.n}")
        return m

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges()})"


def induced_subgraph(g: Graph, keep) -> tuple[Graph, list[int]]:
    """Subgraph induced on `keep`; returns (subgraph, new-id -> old-id list).

    New ids follow the increasing order of kept old ids.
    """
    keep_mask = g.as_mask(keep)
    old = list(bits(keep_mask))
    pos = {v: i for i, v in enumerate(old)}
    sub = Graph.__new__(Graph)
    adj = []
    for v in old:
        m = 0
        for w in bits(g.adj[v] & keep_mask):
            m |= 1 << pos[w]
        adj.append(m)
    sub.n = len(old)
    sub.adj = tuple(adj)
    return sub, old


def components_masks(g: Graph, removed: int = 0) -> list[int]:
    """Connected components of g minus `removed`, as masks, by least member."""
    alive = g.full_mask & ~removed
    out = []
    while alive:
        seed = alive & -alive
        comp = seed
        frontier = seed
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= g.adj[v]
            nxt &= alive & ~comp
            comp |= nxt
            frontier = nxt
        out.append(comp)
        alive &= ~comp
    return out


def components(g: Graph, removed=0) -> list[list[int]]:
    """Partition of V minus removed into connected components (vertex lists)."""
    return [list(bits(m)) for m in components_masks(g, g.as_mask(removed))]


def is_connected(g: Graph, within: int | None = None) -> bool:
    """Connectivity of g, or of g[within] when a mask is given.

    The empty graph is connected by convention.
    """
    alive = g.full_mask if within is None else within
    if alive == 0:
        return True
    removed = g.full_mask & ~alive
    return len(components_masks(g, removed)) == 1


def is_clique(g: Graph, s) -> bool:
    m = g.as_mask(s)
    for v in bits(m):
        if m & ~g.closed_mask(v):
            return False
    return True


def is_path_graph(g: Graph, s) -> bool:
    """True iff g[s] is a path (single vertices count, empty set does not)."""
    m = g.as_mask(s)
    k = m.bit_count()
    if k == 0:
        return False
    if k == 1:
        return True
    ends = 0
    for v in bits(m):
        d = (g.adj[v] & m).bit_count()
        if d > 2 or d == 0:
            return False
        if d == 1:
            ends += 1
    return ends == 2 and is_connected(g, m)


def shortest_path(g: Graph, sources, targets, allowed_interior) -> list[int] | None:
    """Shortest path from a source to a target with interior in allowed_interior.

    Endpoints need not lie in allowed_interior. Deterministic: BFS discovers
    vertices in increasing id order, so parents and the reported target are
    the least possible at each level.
    """
    src = g.as_mask(sources)
    dst = g.as_mask(targets)
    inter = g.as_mask(allowed_interior)
    if src & dst:
        both = src & dst
        return [(both & -both).bit_length() - 1]
    parent: dict[int, int] = {}
    seen = src
    frontier = src
    found = 0
    while frontier and not found:
        nxt = 0
        for v in bits(frontier):
            for w in bits(g.adj[v] & ~seen & (inter | dst)):
                if w not in parent:
                    parent[w] = v
                if (1 << w) & dst:
                    found |= 1 << w
                else:
                    nxt |= 1 << w
        seen |= nxt | found
        frontier = nxt
    if not found:
        return None
    path = [(found & -found).bit_length() - 1]
    while not ((1 << path[-1]) & src):
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _walk_chain(g: Graph, start: int, first: int, deg2: int):
    """Follow degree-2 vertices from `start` via `first`.

    Returns (extension list of degree-2 vertices, boundary vertex or None,
    cyclic flag). Boundary is the first vertex of degree != 2; cyclic means
    the walk returned to `start` (component is a cycle of degree-2 vertices).
    """
    ext: list[int] = []
    prev, cur = start, first
    while True:
        if not ((1 << cur) & deg2):
            return ext, cur, False
        if cur == start:
            return ext, None, True
        ext.append(cur)
        nxt = [w for w in bits(g.adj[cur]) if w != prev]
        prev, cur = cur, nxt[0]


def maximal_flat_paths(g: Graph) -> list[tuple[int, ...]]:
    """Maximal induced paths whose interior vertices all have degree 2.

    Only paths with at least one interior vertex are reported (bare edges
    between branch vertices are trivially flat and are omitted). Components
    that are pure cycles are skipped. Candidates whose boundary vertices are
    adjacent are not induced paths and are dropped. Canonical orientation:
    smaller end first.
    """
    deg2 = mask_of(v for v in g.vertices() if g.degree(v) == 2)
    seen = 0
    out = []
    for v0 in bits(deg2):
        if (1 << v0) & seen:
            continue
        nb = g.neighbors(v0)
        right_ext, right_b, cyc = _walk_chain(g, v0, nb[1], deg2)
        if cyc:
            seen |= mask_of([v0] + right_ext)
            continue
        left_ext, left_b, _ = _walk_chain(g, v0, nb[0], deg2)
        chain = list(reversed(left_ext)) + [v0] + right_ext
        seen |= mask_of(chain)
        path = chain[:]
        if left_b is not None:
            path.insert(0, left_b)
        if right_b is not None:
            path.append(right_b)
        if path[0] > path[-1]:
            path.reverse()
        if is_flat_path(g, path):
            out.append(tuple(path))
    out.sort()
    return out


def is_flat_path(g: Graph, path: Iterable[int]) -> bool:
    """True iff `path` is an induced path in g whose interior has degree 2."""
    seq = list(path)
    if len(seq) != len(set(seq)) or not seq:
        return False
    for i, v in enumerate(seq):
        for j in range(i + 1, len(seq)):
            if g.has_edge(v, seq[j]) != (j == i + 1):
                return False
    return all(g.degree(v) == 2 for v in seq[1:-1])


def flat_subpaths(g: Graph, length: int) -> list[tuple[int, ...]]:
    """All flat paths of exactly `length` >= 2 edges, canonical orientation."""
    if length < 2:
        raise GraphError("flat subpath enumeration needs length >= 2")
    out = set()
    for base in maximal_flat_paths(g):
        k = len(base) - 1
        for off in range(k - length + 1):
            seg = base[off : off + length + 1]
            if all(g.degree(v) == 2 for v in seg[1:-1]):
                out.add(seg if seg[0] < seg[-1] else tuple(reversed(seg)))
    return sorted(out)


def maximal_cliques(g: Graph, within: int | None = None) -> Iterator[int]:
    """Bron-Kerbosch with pivoting; yields maximal cliques as masks."""
    sub = g.full_mask if within is None else within

    def expand(r: int, p: int, x: int):
        if p == 0 and x == 0:
            yield r
            return
        pivot = -1
        best = -1
        for u in bits(p | x):
            c = (g.adj[u] & p).bit_count()
            if c > best:
                best = c
                pivot = u
        for v in bits(p & ~g.adj[pivot]):
            vb = 1 << v
            yield from expand(r | vb, p & g.adj[v], x & g.adj[v])
            p &= ~vb
            x |= vb

    if sub:
        yield from expand(0, sub, 0)


@dataclass(frozen=True)
class Gf2Matrix:
    """Matrix over GF(2): row-major bit rows, row i bit j = entry (i, j)."""

    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if self.rows != len(self.data):
            raise GraphError("row count does not match data")
        if self.cols < 0 or any(r >> self.cols for r in self.data):
            raise GraphError("entry outside declared column range")

    @classmethod
    def from_rows(cls, bit_rows: Iterable[int], cols: int) -> "Gf2Matrix":
        data = tuple(bit_rows)
        return cls(len(data), cols, data)

    @classmethod
    def identity(cls, k: int) -> "Gf2Matrix":
        return cls(k, k, tuple(1 << i for i in range(k)))


def _rank_of_rows(rows: Iterable[int]) -> int:
    """Gaussian elimination over GF(2) on int bitset rows."""
    basis: list[int] = []
    for row in rows:
        for b in basis:
            if row & (b & -b):
                row ^= b
        if row:
            basis.append(row)
    return len(basis)


def gf2_rank(m: Gf2Matrix) -> int:
    """Rank of a GF(2) matrix; empty matrices have rank 0."""
    return _rank_of_rows(m.data)


def cut_rank(g: Graph, a) -> int:
    """GF(2) rank of the bipartite adjacency submatrix between a and V-a."""
    am = g.as_mask(a)
    comp = g.full_mask & ~am
    return _rank_of_rows(g.adj[v] & comp for v in bits(am))
