"""2-join detection, parity-correct blocks, and extreme decomposition trees.

The 2-join finder seeds on an unordered pair of directed crossing edges
(one per attachment block), grows both sides by forced closure, branches on
the few vertices left unresolved, and validates each completed partition
from scratch. Every returned split therefore satisfies the full definition
regardless of search internals.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

from .detect import BasicKind, classify_basic, find_even_hole, find_star_cutset
from .errors import DecompositionError, OutOfClassError, SearchBudgetExceeded
from .graph import (
    Graph,
    bits,
    is_connected,
    is_path_graph,
    mask_of,
    shortest_path,
)


@dataclass(frozen=True)
class TwoJoinSplit:
    """Split (X1, X2, A1, B1, A2, B2) of a 2-join; C_i are derived."""

    x1: frozenset[int]
    x2: frozenset[int]
    a1: frozenset[int]
    b1: frozenset[int]
    a2: frozenset[int]
    b2: frozenset[int]

    @property
    def c1(self) -> frozenset[int]:
        return self.x1 - self.a1 - self.b1

    @property
    def c2(self) -> frozenset[int]:
        return self.x2 - self.a2 - self.b2

    def side(self, i: int) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
        """(X_i, A_i, B_i) for i in {1, 2}."""
        if i == 1:
            return self.x1, self.a1, self.b1
        if i == 2:
            return self.x2, self.a2, self.b2
        raise ValueError("side must be 1 or 2")

    def canonical(self) -> "TwoJoinSplit":
        """Orient so vertex min(V) lies in X1 and min attach is in the A-block."""
        s = self
        if min(min(s.x1), min(s.x2)) in s.x2:
            s = TwoJoinSplit(s.x2, s.x1, s.a2, s.b2, s.a1, s.b1)
        if min(min(s.b1), min(s.b2)) < min(min(s.a1), min(s.a2)):
            s = TwoJoinSplit(s.x1, s.x2, s.b1, s.a1, s.b2, s.a2)
        return s

    def signature(self) -> tuple:
        s = self.canonical()
        return (
            tuple(sorted(s.x1)),
            tuple(sorted(s.a1)),
            tuple(sorted(s.b1)),
            tuple(sorted(s.a2)),
            tuple(sorted(s.b2)),
        )

    def swapped(self) -> "TwoJoinSplit":
        return TwoJoinSplit(self.x2, self.x1, self.a2, self.b2, self.a1, self.b1)


def _paths_uncrossed(g: Graph, x1_mask: int, forbidden) -> bool:
    full = g.full_mask
    for p in forbidden:
        pm = mask_of(p)
        if pm & x1_mask and pm & (full & ~x1_mask):
            return False
    return True


def split_from_partition(g: Graph, x1_mask: int, forbidden=()) -> TwoJoinSplit | None:
    """Derive and fully validate the split induced by a bipartition, if any.

    The attachment blocks are forced: X1 vertices with identical nonempty
    crossing neighborhoods form one block each; a valid 2-join has exactly
    two such patterns and they must be disjoint.
    """
    full = g.full_mask
    x2_mask = full & ~x1_mask
    if x1_mask.bit_count() < 3 or x2_mask.bit_count() < 3:
        return None
    if not _paths_uncrossed(g, x1_mask, forbidden):
        return None
    patterns: dict[int, int] = {}
    for v in bits(x1_mask):
        cr = g.adj[v] & x2_mask
        if cr:
            patterns.setdefault(cr, 0)
            patterns[cr] |= 1 << v
    if len(patterns) != 2:
        return None
    (p_a, a1m), (p_b, b1m) = sorted(patterns.items(), key=lambda kv: kv[1] & -kv[1])
    if p_a & p_b:
        return None
    for side_mask, am, bm in ((x1_mask, a1m, b1m), (x2_mask, p_a, p_b)):
        if shortest_path(g, am, bm, side_mask & ~am & ~bm) is None:
            return None
        if is_path_graph(g, side_mask):
            return None
    return TwoJoinSplit(
        x1=frozenset(bits(x1_mask)),
        x2=frozenset(bits(x2_mask)),
        a1=frozenset(bits(a1m)),
        b1=frozenset(bits(b1m)),
        a2=frozenset(bits(p_a)),
        b2=frozenset(bits(p_b)),
    )


def verify_split(g: Graph, s: TwoJoinSplit, forbidden=()) -> bool:
    """Check every 2-join condition directly against the graph."""
    full = g.full_mask
    x1m, x2m = mask_of(s.x1), mask_of(s.x2)
    if x1m & x2m or (x1m | x2m) != full:
        return False
    if len(s.x1) < 3 or len(s.x2) < 3:
        return False
    a1m, b1m, a2m, b2m = mask_of(s.a1), mask_of(s.b1), mask_of(s.a2), mask_of(s.b2)
    for am, bm, xm in ((a1m, b1m, x1m), (a2m, b2m, x2m)):
        if not am or not bm or am & bm or (am | bm) & ~xm:
            return False
    for v in bits(x1m):
        cr = g.adj[v] & x2m
        if (a1m >> v) & 1:
            if cr != a2m:
                return False
        elif (b1m >> v) & 1:
            if cr != b2m:
                return False
        elif cr:
            return False
    for w in bits(x2m):
        cr = g.adj[w] & x1m
        expected = a1m if (a2m >> w) & 1 else b1m if (b2m >> w) & 1 else 0
        if cr != expected:
            return False
    for xm, am, bm in ((x1m, a1m, b1m), (x2m, a2m, b2m)):
        if shortest_path(g, am, bm, xm & ~am & ~bm) is None:
            return False
        if is_path_graph(g, xm):
            return False
    return _paths_uncrossed(g, x1m, forbidden)


def _force_mask(adj, na, nb, u, role_a, role_b):
    """Vertices that can no longer sit opposite `u` after u joined a side.

    na/nb are the adjacency masks of that side's opposite-seed vertices;
    role_a/role_b say whether u landed in the A- or B-attachment.
    """
    nu = adj[u]
    if role_a:
        return (na & ~nu) | (nb & nu) | (~na & ~nb & nu)
    if role_b:
        return (nb & ~nu) | (na & nu) | (~na & ~nb & nu)
    return nu


class _SeedSearch:
    """Forced closure plus branch-and-propagate for one seed quadruple."""

    def __init__(self, g: Graph, a1: int, a2: int, b1: int, b2: int, node_budget: int):
        self.g = g
        self.full = g.full_mask
        self.na1, self.nb1 = g.adj[a1], g.adj[b1]
        self.na2, self.nb2 = g.adj[a2], g.adj[b2]
        self.a1, self.a2, self.b1, self.b2 = a1, a2, b1, b2
        self.nodes_left = node_budget
        self.exhausted = False

    def _propagate(self, x1: int, x2: int, pending: list[tuple[int, int]]):
        # Canonical-seed pruning: every split is also found from the seed
        # made of the minimum vertex of each attachment block, so any state
        # that places a vertex smaller than a seed into that seed's block
        # can be abandoned without losing completeness.
        adj = self.g.adj
        while pending:
            u, side = pending.pop()
            if side == 1:
                ra, rb = (self.na2 >> u) & 1, (self.nb2 >> u) & 1
                if ra and rb:
                    return None
                if (ra and u < self.a1) or (rb and u < self.b1):
                    return None
                forced = _force_mask(adj, self.na1, self.nb1, u, ra, rb) & self.full
                if forced & x2:
                    return None
                new = forced & ~x1
                x1 |= new
                for v in bits(new):
                    pending.append((v, 1))
            else:
                ra, rb = (self.na1 >> u) & 1, (self.nb1 >> u) & 1
                if ra and rb:
                    return None
                if (ra and u < self.a2) or (rb and u < self.b2):
                    return None
                forced = _force_mask(adj, self.na2, self.nb2, u, ra, rb) & self.full
                if forced & x1:
                    return None
                new = forced & ~x2
                x2 |= new
                for v in bits(new):
                    pending.append((v, 2))
        return x1, x2

    def run(self, collect, forbidden) -> None:
        x1 = (1 << self.a1) | (1 << self.b1)
        x2 = (1 << self.a2) | (1 << self.b2)
        pending = [(self.a1, 1), (self.b1, 1), (self.a2, 2), (self.b2, 2)]
        state = self._propagate(x1, x2, pending)
        if state is None:
            return
        stack = [state]
        while stack:
            if self.nodes_left <= 0:
                self.exhausted = True
                return
            self.nodes_left -= 1
            x1, x2 = stack.pop()
            unknown = self.full & ~x1 & ~x2
            if not unknown:
                s = split_from_partition(self.g, x1, forbidden)
                if s is not None:
                    collect(s)
                continue
            v = (unknown & -unknown).bit_length() - 1
            for side in (1, 2):
                nx1 = x1 | (1 << v) if side == 1 else x1
                nx2 = x2 | (1 << v) if side == 2 else x2
                nxt = self._propagate(nx1, nx2, [(v, side)])
                if nxt is not None:
                    stack.append(nxt)


def all_two_joins(
    g: Graph,
    forbidden=(),
    *,
    node_budget: int = 50_000,
    strict: bool = True,
) -> list[TwoJoinSplit]:
    """Every 2-join whose crossing edges avoid the forbidden flat paths.

    Splits are deduplicated by partition and returned sorted by canonical
    signature. When the per-seed branch budget is exhausted somewhere and
    nothing was found, strict mode raises SearchBudgetExceeded instead of
    returning a silently incomplete empty list.
    """
    n = g.n
    if n < 6:
        return []
    directed = []
    for u, v in g.edges():
        directed.append((u, v))
        directed.append((v, u))
    found: dict[frozenset, TwoJoinSplit] = {}

    def collect(s: TwoJoinSplit):
        key = frozenset((s.x1, s.x2))
        if key not in found:
            found[key] = s.canonical()

    exhausted = False
    adj = g.adj
    m = len(directed)
    for i in range(m):
        a1, a2 = directed[i]
        for j in range(i + 1, m):
            b1, b2 = directed[j]
            if a1 == b1 or a2 == b2 or a1 == b2 or b1 == a2:
                continue
            if (adj[a1] >> b2) & 1 or (adj[b1] >> a2) & 1:
                continue
            search = _SeedSearch(g, a1, a2, b1, b2, node_budget)
            search.run(collect, forbidden)
            exhausted = exhausted or search.exhausted
    if exhausted and strict and not found:
        raise SearchBudgetExceeded("2-join search hit its branch budget")
    return sorted(found.values(), key=TwoJoinSplit.signature)


def find_two_join(g: Graph, forbidden=(), **kw) -> TwoJoinSplit | None:
    """Least-signature 2-join avoiding the forbidden paths, or None."""
    splits = all_two_joins(g, forbidden, **kw)
    return splits[0] if splits else None


def _induced_ab_paths(g: Graph, a: int, b: int, allowed: int, cap: int) -> list[list[int]]:
    """Induced a-b paths with interior inside `allowed`, up to cap many."""
    out: list[list[int]] = []
    bbit = 1 << b

    def rec(path: list[int], banned: int):
        if len(out) >= cap:
            return
        last = path[-1]
        cand = g.adj[last] & ~banned
        if cand & bbit:
            out.append(path + [b])
        for w in bits(cand & allowed & ~bbit):
            rec(path + [w], banned | g.adj[last] | (1 << w))

    rec([a], 1 << a)
    return out


def side_path_parity(g: Graph, s: TwoJoinSplit, side: int, *, verify: bool = False) -> int:
    """Parity (1 = odd) of the A_i..B_i paths with interior in C_i.

    One shortest path decides; with verify=True every pair shortest path and
    a bounded enumeration of induced paths must agree, otherwise the input
    cannot be even-hole-free and OutOfClassError is raised.
    """
    _, am, bm = s.side(side)
    cm = mask_of(s.c1 if side == 1 else s.c2)
    a_mask, b_mask = mask_of(am), mask_of(bm)
    sp = shortest_path(g, a_mask, b_mask, cm)
    if sp is None:
        raise ValueError("no attachment-to-attachment path with interior in C")
    parity = (len(sp) - 1) % 2
    if verify:
        for a in sorted(am):
            for b in sorted(bm):
                pair = shortest_path(g, 1 << a, 1 << b, cm)
                if pair is not None and (len(pair) - 1) % 2 != parity:
                    raise OutOfClassError("attachment path parity disagreement")
        a0 = min(am)
        b0 = min(bm)
        for p in _induced_ab_paths(g, a0, b0, cm, cap=200):
            if (len(p) - 1) % 2 != parity:
                raise OutOfClassError("attachment path parity disagreement")
    return parity


@dataclass(frozen=True)
class Block:
    """One side of a 2-join with the other side replaced by a marker path."""

    graph: Graph
    origin: tuple[int | None, ...]  # block id -> parent id (None for marker)
    marker: tuple[int, ...]  # marker path, attachment-a end first
    side: int  # 1 or 2: which X_i this block kept

    @property
    def marker_interior(self) -> tuple[int, ...]:
        return self.marker[1:-1]

    @property
    def marker_length(self) -> int:
        return len(self.marker) - 1

    def to_parent(self, vs) -> list[int]:
        return [self.origin[v] for v in vs]


def build_blocks(g: Graph, s: TwoJoinSplit, *, verify: bool = False) -> tuple[Block, Block]:
    """Blocks of decomposition with parity-chosen marker lengths.

    Block i keeps X_i and replaces the other side by a marker path of length
    3 when the other side's attachment paths are odd, 4 otherwise; the a-end
    is complete to A_i and the b-end to B_i.
    """
    parities = {
        1: side_path_parity(g, s, 1, verify=verify),
        2: side_path_parity(g, s, 2, verify=verify),
    }
    out = []
    for side in (1, 2):
        xm, am, bm = s.side(side)
        other = 2 if side == 1 else 1
        k = 3 if parities[other] == 1 else 4
        kept = sorted(xm)
        origin: list[int | None] = list(kept)
        index = {v: i for i, v in enumerate(kept)}
        nk = len(kept)
        marker = tuple(range(nk, nk + k + 1))
        origin += [None] * (k + 1)
        edges = []
        gm = mask_of(xm)
        for u, v in g.edges():
            if (gm >> u) & 1 and (gm >> v) & 1:
                edges.append((index[u], index[v]))
        edges += [(marker[i], marker[i + 1]) for i in range(k)]
        edges += [(marker[0], index[v]) for v in am]
        edges += [(marker[-1], index[v]) for v in bm]
        block = Block(Graph(nk + k + 1, edges), tuple(origin), marker, side)
        if verify:
            _assert_block_in_class(block)
        out.append(block)
    return out[0], out[1]


def _assert_block_in_class(block: Block) -> None:
    g = block.graph
    if not is_connected(g):
        raise OutOfClassError("block of decomposition is disconnected")
    w = find_even_hole(g)
    if w is not None:
        raise OutOfClassError("block of decomposition has an even hole", w)
    w = find_star_cutset(g)
    if w is not None:
        raise OutOfClassError("block of decomposition has a star cutset", w)


def recompose(blocks: tuple[Block, Block], s: TwoJoinSplit) -> Graph:
    """Invert build_blocks: drop markers, glue sides back along the split.

    Origin maps give exact parent ids, so the result must equal the parent
    graph vertex for vertex.
    """
    b1, b2 = blocks
    edges = set()
    n = 0
    for block in (b1, b2):
        for u, v in block.graph.edges():
            pu, pv = block.origin[u], block.origin[v]
            if pu is not None and pv is not None:
                edges.add((min(pu, pv), max(pu, pv)))
                n = max(n, pu + 1, pv + 1)
    for u in s.a1:
        for v in s.a2:
            edges.add((min(u, v), max(u, v)))
    for u in s.b1:
        for v in s.b2:
            edges.add((min(u, v), max(u, v)))
    n = max([n] + [v + 1 for v in s.x1 | s.x2])
    return Graph(n, sorted(edges))


@dataclass
class DecompNode:
    """Node of an extreme non-crossing 2-join decomposition tree.

    A leaf is normally basic; a `stuck` leaf is a graph that is neither basic
    in the simplified taxonomy nor splittable by an extreme non-crossing
    non-path 2-join (the paper's own tight example at k=3 is one such graph).
    Downstream consumers handle stuck leaves by exact desk-scale methods.
    """

    graph: Graph
    flat_paths: tuple[tuple[int, ...], ...]
    kind: BasicKind
    marker_path: tuple[int, ...] | None = None  # the path added when this node was built
    split: TwoJoinSplit | None = None
    blocks: tuple[Block, Block] | None = None
    children: tuple["DecompNode", ...] = ()
    basic_child_index: int | None = None
    stuck: bool = False

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self) -> Iterator["DecompNode"]:
        yield self
        for c in self.children:
            yield from c.walk()

    def to_json(self) -> dict:
        doc = {
            "vertices": self.graph.n,
            "edges": self.graph.edges(),
            "flat_paths": [list(p) for p in self.flat_paths],
            "basic_kind": self.kind.tag,
        }
        if self.split is not None:
            doc["split"] = {
                "X1": sorted(self.split.x1),
                "X2": sorted(self.split.x2),
                "A1": sorted(self.split.a1),
                "B1": sorted(self.split.b1),
                "A2": sorted(self.split.a2),
                "B2": sorted(self.split.b2),
            }
            doc["marker_lengths"] = [b.marker_length for b in self.blocks]
        doc["children"] = [c.to_json() for c in self.children]
        return doc


def _paths_to_block(block: Block, paths) -> list[tuple[int, ...]]:
    """Re-express parent flat paths that live inside this block's side."""
    back = {p: i for i, p in enumerate(block.origin) if p is not None}
    out = []
    for p in paths:
        if all(v in back for v in p):
            out.append(tuple(back[v] for v in p))
    return out


class _UnmanageableStuck(Exception):
    """Internal: a subtree bottomed out in a stuck node too big for exact handling."""


# A stuck leaf is acceptable when its marker-contracted super-vertex count
# stays within the exact-DP budget used by the rank-decomposition fallback.
MANAGEABLE_STUCK_SUPERS = 12


def _supers_count(graph: Graph, paths) -> int:
    covered = sum(len(p) for p in paths)
    return graph.n - covered + len(paths)


def build_decomposition_tree(
    g: Graph,
    *,
    check_class: bool = False,
    verify: bool = False,
    allow_stuck: bool = True,
    node_budget: int = 50_000,
) -> DecompNode:
    """Extreme non-crossing 2-join decomposition tree with basic leaves.

    At each non-basic node the valid non-crossing splits are tried in
    (basic block size, canonical signature) order; a candidate is committed
    only if its recursion completes, where stuck leaves (graphs that are
    neither basic nor splittable) are tolerated only below the exact-DP size
    budget. Candidates whose subtree bottoms out in an oversized stuck node
    are skipped in favor of the next split. With allow_stuck=False any stuck
    node raises DecompositionError instead.
    """
    if not is_connected(g):
        raise OutOfClassError("decomposition expects a connected graph")
    if check_class:
        w = find_even_hole(g)
        if w is not None:
            raise OutOfClassError("input has an even hole", w)
        w = find_star_cutset(g)
        if w is not None:
            raise OutOfClassError("input has a star cutset", w)

    def stuck_leaf(graph: Graph, paths, marker, kind: BasicKind) -> DecompNode:
        if not allow_stuck:
            raise DecompositionError(
                "no extreme non-crossing 2-join found (out-of-class input?)"
            )
        if _supers_count(graph, paths) > MANAGEABLE_STUCK_SUPERS:
            raise _UnmanageableStuck(
                f"stuck node with {_supers_count(graph, paths)} supers"
            )
        return DecompNode(graph, tuple(paths), kind, marker_path=marker, stuck=True)

    def rec(graph: Graph, paths, marker, depth: int) -> DecompNode:
        kind = classify_basic(graph)
        if kind.is_basic:
            return DecompNode(graph, tuple(paths), kind, marker_path=marker)
        if depth > g.n:
            raise DecompositionError("decomposition recursion exceeded depth bound")
        candidates = []
        for s in all_two_joins(graph, paths, node_budget=node_budget):
            blocks = build_blocks(graph, s, verify=verify)
            kinds = (classify_basic(blocks[0].graph), classify_basic(blocks[1].graph))
            sized = [(blocks[i].graph.n, i) for i in (0, 1) if kinds[i].is_basic]
            if sized:
                candidates.append((min(sized), s.signature(), s, blocks, kinds))
        if not candidates:
            return stuck_leaf(graph, paths, marker, kind)
        candidates.sort(key=lambda c: (c[0], c[1]))
        last_exc: _UnmanageableStuck | None = None
        for (_, basic_idx), _, s, blocks, kinds in candidates:
            try:
                children = []
                for i in (0, 1):
                    block = blocks[i]
                    child_paths = _paths_to_block(block, paths) + [block.marker]
                    if kinds[i].is_basic:
                        children.append(
                            DecompNode(
                                block.graph,
                                tuple(child_paths),
                                kinds[i],
                                marker_path=block.marker,
                            )
                        )
                    else:
                        children.append(
                            rec(block.graph, child_paths, block.marker, depth + 1)
                        )
            except _UnmanageableStuck as exc:
                last_exc = exc
                continue
            return DecompNode(
                graph,
                tuple(paths),
                kind,
                marker_path=marker,
                split=s,
                blocks=blocks,
                children=tuple(children),
                basic_child_index=basic_idx,
            )
        raise last_exc if last_exc is not None else DecompositionError("no usable split")

    try:
        return rec(g, [], None, 0)
    except _UnmanageableStuck as exc:
        raise DecompositionError(f"every extreme split leads to {exc}") from exc
