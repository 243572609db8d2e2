"""Rank decompositions of width 3: caterpillar constructions and combination.

Basic graphs get the characteristic-tree construction (chains of the line
graph assembled bottom-up through caterpillars); 2-joins are combined by
grafting the two block decompositions along their marker-separating edges;
stuck leaves fall back to an exact subset DP over marker-contracted
super-vertices. Every produced decomposition is audited edge by edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .detect import CLIQUE, EXTENDED_BASIC, HOLE, LONG_PYRAMID, BasicKind
from .errors import DecompositionError
from .graph import Graph, bits, cut_rank, mask_of, maximal_cliques
from .twojoin import Block, DecompNode, TwoJoinSplit, build_decomposition_tree


@dataclass
class RankDecomposition:
    """Tree with a leaf bijection to V(G); degree-2 internal nodes allowed."""

    n_nodes: int
    edges: list[tuple[int, int]]
    leaf_of: dict[int, int]  # graph vertex -> tree node

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {i: [] for i in range(self.n_nodes)}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def validate(self, g: Graph) -> None:
        if sorted(self.leaf_of) != list(g.vertices()):
            raise DecompositionError("leaf map is not a bijection from V")
        if len(set(self.leaf_of.values())) != g.n:
            raise DecompositionError("leaf map collides on tree nodes")
        if self.n_nodes > 1 and len(self.edges) != self.n_nodes - 1:
            raise DecompositionError("decomposition graph is not a tree")
        adj = self.adjacency()
        mapped = set(self.leaf_of.values())
        for t in mapped:
            if len(adj[t]) > 1:
                raise DecompositionError(f"mapped node {t} is not a tree leaf")
        for t in range(self.n_nodes):
            if len(adj[t]) > 3:
                raise DecompositionError(f"node {t} exceeds degree 3")
        seen = {0}
        stack = [0]
        while stack:
            a = stack.pop()
            for b in adj[a]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        if len(seen) != self.n_nodes:
            raise DecompositionError("decomposition tree is disconnected")

    def edge_partitions(self, g: Graph) -> dict[tuple[int, int], int]:
        """For each tree edge, the vertex mask on the child side of a rooting."""
        if not self.edges:
            return {}
        adj = self.adjacency()
        vertex_at = {t: v for v, t in self.leaf_of.items()}
        below: dict[tuple[int, int], int] = {}
        order: list[tuple[int, int]] = []
        seen = {0}
        stack = [(0, -1)]
        topo: list[tuple[int, int]] = []
        while stack:
            u, p = stack.pop()
            topo.append((u, p))
            for w in adj[u]:
                if w != p:
                    seen.add(w)
                    stack.append((w, u))
        acc = {t: (1 << vertex_at[t]) if t in vertex_at else 0 for t in range(self.n_nodes)}
        for u, p in reversed(topo):
            if p != -1:
                below[(p, u)] = acc[u]
                acc[p] |= acc[u]
        return below

    def per_edge_widths(self, g: Graph) -> dict[tuple[int, int], int]:
        return {e: cut_rank(g, m) for e, m in self.edge_partitions(g).items()}

    def to_json(self) -> dict:
        return {
            "nodes": self.n_nodes,
            "edges": [list(e) for e in self.edges],
            "leaf_map": {str(v): t for v, t in sorted(self.leaf_of.items())},
        }

    def to_dot(self) -> str:
        lines = ["graph rankdec {"]
        vertex_at = {t: v for v, t in self.leaf_of.items()}
        for t in range(self.n_nodes):
            label = f"v{vertex_at[t]}" if t in vertex_at else ""
            lines.append(f'  n{t} [label="{label}"];')
        for a, b in self.edges:
            lines.append(f"  n{a} -- n{b};")
        lines.append("}")
        return "\n".join(lines)


def decomposition_width(g: Graph, d: RankDecomposition) -> int:
    """Maximum cut-rank over tree edges; 0 for edgeless decompositions."""
    d.validate(g)
    widths = d.per_edge_widths(g)
    return max(widths.values(), default=0)


def is_separated(d: RankDecomposition, g: Graph, xset) -> bool:
    """True iff some tree edge induces exactly the partition (xset, rest)."""
    xm = g.as_mask(xset)
    if xm == 0 or xm == g.full_mask:
        return False
    for m in d.edge_partitions(g).values():
        if m == xm or m == g.full_mask & ~xm:
            return True
    return False


def normalize(d: RankDecomposition) -> RankDecomposition:
    """Contract degree-2 nodes and drop unmapped degree-<=1 nodes."""
    edges = {tuple(sorted(e)) for e in d.edges}
    mapped = set(d.leaf_of.values())
    nodes = set(range(d.n_nodes))
    changed = True
    while changed:
        changed = False
        deg: dict[int, set[int]] = {t: set() for t in nodes}
        for a, b in edges:
            deg[a].add(b)
            deg[b].add(a)
        for t in list(nodes):
            if t in mapped:
                continue
            nb = deg.get(t, set())
            if len(nb) <= 1:
                nodes.discard(t)
                edges = {e for e in edges if t not in e}
                changed = True
            elif len(nb) == 2:
                u, w = sorted(nb)
                nodes.discard(t)
                edges = {e for e in edges if t not in e}
                if u != w:
                    edges.add((min(u, w), max(u, w)))
                changed = True
    relabel = {t: i for i, t in enumerate(sorted(nodes))}
    return RankDecomposition(
        len(nodes),
        sorted((relabel[a], relabel[b]) for a, b in edges),
        {v: relabel[t] for v, t in d.leaf_of.items()},
    )


class _TreeBuilder:
    def __init__(self):
        self.count = 0
        self.edges: list[tuple[int, int]] = []
        self.leaf_of: dict[int, int] = {}

    def node(self) -> int:
        self.count += 1
        return self.count - 1

    def edge(self, a: int, b: int) -> None:
        self.edges.append((a, b))

    def leaf(self, vertex: int) -> int:
        t = self.node()
        self.leaf_of[vertex] = t
        return t

    def caterpillar(self, slots: list[tuple[str, int]]) -> int:
        """Spine with one slot per leaf position; root is the first spine node.

        Slots are ('vertex', v) for fresh mapped leaves or ('tree', root) to
        identify an existing subtree root with the leaf position.
        """
        k = len(slots)
        if k == 0:
            raise DecompositionError("empty caterpillar")

        def fill(spine: int, slot: tuple[str, int]) -> None:
            kind, val = slot
            tgt = self.leaf(val) if kind == "vertex" else val
            self.edge(spine, tgt)

        if k == 1:
            a1 = self.node()
            fill(a1, slots[0])
            return a1
        spine = [self.node() for _ in range(k - 1)]
        for i in range(k - 2):
            self.edge(spine[i], spine[i + 1])
        for i in range(k - 1):
            fill(spine[i], slots[i])
        fill(spine[k - 2], slots[k - 1])
        return spine[0]

    def path_decomposition(self, seq: list[int], runs: list[tuple[int, int]]) -> int:
        """Caterpillar for an ordered flat path, separating each marked run.

        `runs` are inclusive index ranges (the contained distinguished paths);
        segments between runs become their own sub-caterpillars.
        """
        if not runs or (len(runs) == 1 and runs[0] == (0, len(seq) - 1)):
            return self.caterpillar([("vertex", v) for v in seq])
        segments: list[list[int]] = []
        pos = 0
        for a, b in sorted(runs):
            if pos < a:
                segments.append(seq[pos:a])
            segments.append(seq[a : b + 1])
            pos = b + 1
        if pos < len(seq):
            segments.append(seq[pos:])
        roots = [self.caterpillar([("vertex", v) for v in seg]) for seg in segments]
        if len(roots) == 1:
            return roots[0]
        return self.caterpillar([("tree", r) for r in roots])

    def freeze(self) -> RankDecomposition:
        return RankDecomposition(self.count, list(self.edges), dict(self.leaf_of))


def _runs_for(seq: list[int], paths) -> list[tuple[int, int]]:
    """Index ranges of the distinguished paths contained in this sequence."""
    pos = {v: i for i, v in enumerate(seq)}
    runs = []
    for p in paths:
        if all(v in pos for v in p):
            idx = sorted(pos[v] for v in p)
            if idx[-1] - idx[0] != len(p) - 1:
                raise DecompositionError("distinguished path is not contiguous in its chain")
            runs.append((idx[0], idx[-1]))
        elif any(v in pos for v in p):
            raise DecompositionError("distinguished path straddles two chains")
    return runs


def _clique_decomposition(g: Graph, paths) -> RankDecomposition:
    if paths:
        raise DecompositionError("cliques carry no flat paths of length >= 3")
    tb = _TreeBuilder()
    vs = list(g.vertices())
    if len(vs) == 1:
        t = tb.leaf(vs[0])
        return tb.freeze()
    tb.caterpillar([("vertex", v) for v in vs])
    return tb.freeze()


def _hole_decomposition(g: Graph, paths) -> RankDecomposition:
    order = [0]
    prev = -1
    while len(order) < g.n:
        cur = order[-1]
        nxt = [w for w in bits(g.adj[cur]) if w != prev]
        prev, cur = cur, nxt[0]
        order.append(cur)
    if paths:
        starts = {p[0] for p in paths} | {p[-1] for p in paths}
        covered = {v for p in paths for v in p}
        candidates = [i for i, v in enumerate(order) if v not in covered]
        if not candidates:
            candidates = [i for i, v in enumerate(order) if v in starts]
        rot = candidates[0]
        order = order[rot:] + order[:rot]
        pos = {v: i for i, v in enumerate(order)}
        for p in paths:
            idx = sorted(pos[v] for v in p)
            if idx[-1] - idx[0] != len(p) - 1:
                order = list(reversed(order))
                pos = {v: i for i, v in enumerate(order)}
                idx = sorted(pos[v] for v in p)
                if idx[-1] - idx[0] != len(p) - 1:
                    raise DecompositionError("hole rotation cannot align flat paths")
    tb = _TreeBuilder()
    tb.path_decomposition(order, _runs_for(order, paths))
    return tb.freeze()


def _chains_of_line_part(g: Graph, hmask: int, ext_cliques: list[int]):
    """Orderered chains left after deleting extended-clique edges from H."""
    clique_pair: dict[tuple[int, int], int] = {}
    for km in ext_cliques:
        vs = list(bits(km))
        for i, u in enumerate(vs):
            for v in vs[i + 1 :]:
                clique_pair[(u, v)] = km
    kept: dict[int, list[int]] = {v: [] for v in bits(hmask)}
    for u in bits(hmask):
        for v in bits(g.adj[u] & hmask):
            if u < v and (u, v) not in clique_pair:
                kept[u].append(v)
                kept[v].append(u)
    chains = []
    seen = set()
    for v in bits(hmask):
        if v in seen or len(kept[v]) > 1:
            continue
        seq = [v]
        seen.add(v)
        prev = None
        cur = v
        while True:
            nxt = [w for w in kept[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            seq.append(cur)
            seen.add(cur)
        chains.append(seq)
    for v in bits(hmask):
        if v not in seen:
            raise DecompositionError("line part chains do not cover the component")
    return chains


def _rankdec_extended(g: Graph, ext, paths) -> RankDecomposition:
    hmask = mask_of(ext.line_vertices)
    ext_cliques = [mask_of(k) for k in ext.extended_cliques]
    root_clique = min(ext_cliques, key=lambda m: m & -m)
    chains = _chains_of_line_part(g, hmask, ext_cliques)

    member_cliques: dict[int, list[int]] = {}
    for km in ext_cliques:
        for v in bits(km):
            member_cliques.setdefault(v, []).append(km)

    def cliques_at(chain_end: int) -> list[int]:
        return member_cliques.get(chain_end, [])

    # Incidence between chains and extended cliques through chain endpoints.
    chain_id = {tuple(c): i for i, c in enumerate(chains)}
    incident: dict[int, list[int]] = {i: [] for i in range(len(chains))}
    chains_of_clique: dict[int, list[int]] = {id(km): [] for km in ext_cliques}
    key_of = {id(km): km for km in ext_cliques}
    for i, c in enumerate(chains):
        ends = {c[0], c[-1]} if len(c) > 1 else {c[0]}
        for e in ends:
            for km in cliques_at(e):
                incident[i].append(id(km))
                chains_of_clique[id(km)].append(i)

    # Root the alternating clique/chain incidence structure at the root
    # clique: a chain's father is the chain through which its entry clique
    # was first reached.
    parent_of_chain: dict[int, int | None] = {}
    children_of_chain: dict[int, list[int]] = {i: [] for i in range(len(chains))}
    entry_clique: dict[int, int] = {}
    root_chains: list[int] = []
    seen_cliques = {id(root_clique)}
    seen_chains: set[int] = set()
    queue: list[tuple[int, int | None]] = [(id(root_clique), None)]
    while queue:
        kq, via = queue.pop(0)
        for ci in sorted(chains_of_clique[kq], key=lambda i: min(chains[i])):
            if ci == via or ci in seen_chains:
                continue
            seen_chains.add(ci)
            entry_clique[ci] = kq
            if via is None:
                root_chains.append(ci)
                parent_of_chain[ci] = None
            else:
                children_of_chain[via].append(ci)
                parent_of_chain[ci] = via
            for kq2 in incident[ci]:
                if kq2 not in seen_cliques:
                    seen_cliques.add(kq2)
                    queue.append((kq2, ci))
    if len(seen_chains) != len(chains):
        raise DecompositionError("characteristic tree does not reach every chain")

    # Orient each chain with its root-ward end first.
    def orient(ci: int) -> list[int]:
        seq = list(chains[ci])
        if len(seq) == 1:
            return seq
        upm = key_of[entry_clique[ci]]
        if (upm >> seq[-1]) & 1 and not (upm >> seq[0]) & 1:
            seq.reverse()
        return seq

    seqs = {ci: orient(ci) for ci in range(len(chains))}

    # Place the specials at leaf chains.
    for s in (ext.x, ext.y):
        host = None
        for p in paths:
            if p[0] == s or p[-1] == s:
                nb = p[1] if p[0] == s else p[-2]
                host = next(ci for ci, seq in seqs.items() if nb in seq)
                break
        if host is None:
            cands = [
                ci
                for ci, seq in seqs.items()
                if not children_of_chain[ci] and g.has_edge(s, seq[-1])
            ]
            if not cands:
                raise DecompositionError("no leaf chain adjacent to a special vertex")
            host = min(cands, key=lambda ci: seqs[ci][-1])
        seq = seqs[host]
        if not g.has_edge(s, seq[-1]):
            raise DecompositionError("special vertex does not extend its host chain")
        seq.append(s)

    tb = _TreeBuilder()

    def build_chain(ci: int) -> int:
        seq = seqs[ci]
        own = tb.path_decomposition(seq, _runs_for(seq, paths))
        kids = sorted(children_of_chain[ci], key=lambda cj: min(seqs[cj]))
        if not kids:
            return own
        slots = [("tree", own)] + [("tree", build_chain(cj)) for cj in kids]
        return tb.caterpillar(slots)

    roots = [("tree", build_chain(ci)) for ci in sorted(root_chains, key=lambda ci: min(seqs[ci]))]
    tb.caterpillar(roots)
    return tb.freeze()


def _rankdec_pyramid(g: Graph, pyr, paths) -> RankDecomposition:
    seqs = [list(p[:-1]) for p in pyr.paths]  # each leg minus the shared apex
    y = pyr.apex
    host = None
    for p in paths:
        if p[0] == y or p[-1] == y:
            nb = p[1] if p[0] == y else p[-2]
            host = next(i for i, seq in enumerate(seqs) if nb in seq)
            break
    if host is None:
        host = min(range(3), key=lambda i: seqs[i][-1])
    seqs[host].append(y)
    tb = _TreeBuilder()
    roots = [("tree", tb.path_decomposition(seq, _runs_for(seq, paths))) for seq in seqs]
    tb.caterpillar(roots)
    return tb.freeze()


def _exact_separating_decomposition(
    g: Graph, paths, max_supers: int = 13
) -> RankDecomposition:
    """Optimal-width decomposition separating each path, by subset DP.

    Paths are contracted to super-vertices (any separating decomposition
    contracts this way without width increase), the optimal branch structure
    over supers is extracted from the DP, and path supers are re-expanded as
    caterpillars (prefix cuts of a flat path have rank at most 2).
    """
    covered = 0
    supers: list[int] = []
    for p in paths:
        pm = mask_of(p)
        supers.append(pm)
        covered |= pm
    for v in bits(g.full_mask & ~covered):
        supers.append(1 << v)
    ns = len(supers)
    if ns > max_supers:
        raise DecompositionError(f"exact decomposition over {ns} supers exceeds budget")
    if ns == 0:
        return RankDecomposition(0, [], {})

    vmask = [0] * (1 << ns)
    for s in range(1, 1 << ns):
        low = s & -s
        vmask[s] = vmask[s ^ low] | supers[low.bit_length() - 1]
    cutrk = [0] * (1 << ns)
    for s in range(1, (1 << ns) - 1):
        cutrk[s] = cut_rank(g, vmask[s])
    h = [0] * (1 << ns)
    choice = [0] * (1 << ns)
    order = sorted(range(1, 1 << ns), key=lambda m: m.bit_count())
    for m in order:
        if m.bit_count() == 1:
            h[m] = cutrk[m]
            continue
        fixed = m & -m
        rest = m ^ fixed
        best = None
        best_s = 0
        s = rest
        while s:
            part = max(h[fixed | (rest ^ s)], h[s])
            if best is None or part < best:
                best = part
                best_s = s
            s = (s - 1) & rest
        h[m] = max(cutrk[m], best)
        choice[m] = best_s

    tb = _TreeBuilder()
    path_tuples = list(paths)

    def expand(si: int) -> int:
        m = supers[si]
        if m.bit_count() == 1:
            t = tb.node()
            v = (m & -m).bit_length() - 1
            leaf = tb.leaf(v)
            tb.edge(t, leaf)
            return t
        seq = next(list(p) for p in path_tuples if mask_of(p) == m)
        return tb.caterpillar([("vertex", v) for v in seq])

    def extract(mask: int) -> int:
        if mask.bit_count() == 1:
            return expand((mask & -mask).bit_length() - 1)
        s = choice[mask]
        a = extract(mask ^ s)
        b = extract(s)
        t = tb.node()
        tb.edge(t, a)
        tb.edge(t, b)
        return t

    full = (1 << ns) - 1
    if ns == 1:
        expand(0)
        return normalize(tb.freeze())
    s = choice[full]
    a = extract(full ^ s)
    b = extract(s)
    tb.edge(a, b)
    return normalize(tb.freeze())


def rank_decomposition_basic(g: Graph, paths, kind: BasicKind | None = None) -> RankDecomposition:
    """Width-<=3 decomposition of a basic graph separating each given path."""
    from .detect import classify_basic

    kind = kind or classify_basic(g)
    paths = tuple(tuple(p) for p in paths)
    try:
        if kind.tag == LONG_PYRAMID:
            d = _rankdec_pyramid(g, kind.pyramid, paths)
        elif kind.tag == EXTENDED_BASIC:
            d = _rankdec_extended(g, kind.extended, paths)
        elif kind.tag == HOLE:
            d = _hole_decomposition(g, paths)
        elif kind.tag == CLIQUE:
            d = _clique_decomposition(g, paths)
        else:
            raise DecompositionError(f"not a basic graph: {kind.tag}")
        d.validate(g)
        for p in paths:
            if not is_separated(d, g, p):
                raise DecompositionError("constructed decomposition misses a separation")
    except DecompositionError:
        d = _exact_separating_decomposition(g, paths)
        d.validate(g)
        for p in paths:
            if not is_separated(d, g, p):
                raise
    return d


def combine_rank_decompositions(
    d1: RankDecomposition,
    d2: RankDecomposition,
    blocks: tuple[Block, Block],
    s: TwoJoinSplit,
    parent: Graph,
    audit: list | None = None,
) -> RankDecomposition:
    """Graft the block decompositions along their marker-separating edges.

    The marker-side subtrees are discarded and the two cut ends are joined;
    the new bridge edge induces exactly the (X1, X2) partition. Optionally
    records the bridge width and preservation of every surviving edge width.
    """
    b1, b2 = blocks
    pieces = []
    for d, b in ((d1, b1), (d2, b2)):
        marker_mask = mask_of(b.marker)
        parts = d.edge_partitions(b.graph)
        sep = None
        for (p, u), m in parts.items():
            if m == marker_mask or m == b.graph.full_mask & ~marker_mask:
                keep_from = u if m != marker_mask else p
                sep = (p, u, keep_from)
                break
        if sep is None:
            raise DecompositionError("marker path is not separated in a block decomposition")
        p, u, keep_from = sep
        drop_from = u if keep_from == p else p
        adj = d.adjacency()
        keep = {keep_from}
        stack = [keep_from]
        while stack:
            a = stack.pop()
            for bnode in adj[a]:
                if bnode == drop_from and a == keep_from:
                    continue
                if bnode not in keep:
                    keep.add(bnode)
                    stack.append(bnode)
        pieces.append((d, b, keep, keep_from))

    out_edges: list[tuple[int, int]] = []
    leaf_of: dict[int, int] = {}
    relabeled: list[dict[int, int]] = []
    count = 0
    for d, b, keep, _ in pieces:
        rel = {}
        for t in sorted(keep):
            rel[t] = count
            count += 1
        for a, bb in d.edges:
            if a in keep and bb in keep:
                out_edges.append((rel[a], rel[bb]))
        for v, t in d.leaf_of.items():
            if t in keep:
                pv = b.origin[v]
                if pv is None:
                    raise DecompositionError("marker leaf survived the graft")
                leaf_of[pv] = rel[t]
        relabeled.append(rel)
    bridge = (relabeled[0][pieces[0][3]], relabeled[1][pieces[1][3]])
    out_edges.append(bridge)
    combined = RankDecomposition(count, out_edges, leaf_of)

    if audit is not None:
        widths_new = combined.per_edge_widths(parent)
        bridge_key = bridge if bridge in widths_new else (bridge[1], bridge[0])
        record = {
            "bridge_width": widths_new[bridge_key],
            "preserved": True,
        }
        for (d, b, keep, _), rel in zip(pieces, relabeled):
            old = d.per_edge_widths(b.graph)
            for (p, u), w in old.items():
                if p in keep and u in keep:
                    key = (rel[p], rel[u])
                    if key not in widths_new:
                        key = (key[1], key[0])
                    if widths_new[key] != w:
                        record["preserved"] = False
        audit.append(record)
    return combined


def rank_decomposition(
    g: Graph,
    *,
    tree: DecompNode | None = None,
    audit_combines: list | None = None,
) -> RankDecomposition:
    """Width-<=3 rank decomposition of a connected in-class graph.

    Basic roots use the direct constructions; otherwise the extreme
    decomposition tree is walked bottom-up, combining block decompositions
    across each 2-join. Stuck leaves use the exact separating DP.
    """
    if g.n <= 1:
        d = RankDecomposition(g.n, [], {0: 0} if g.n else {})
        return d
    if tree is None:
        tree = build_decomposition_tree(g)

    def build(node: DecompNode) -> RankDecomposition:
        if node.is_leaf:
            if node.stuck:
                return _exact_separating_decomposition(node.graph, node.flat_paths)
            return rank_decomposition_basic(node.graph, node.flat_paths, node.kind)
        d1 = build(node.children[0])
        d2 = build(node.children[1])
        return combine_rank_decompositions(
            d1, d2, node.blocks, node.split, node.graph, audit=audit_combines
        )

    return build(tree)
