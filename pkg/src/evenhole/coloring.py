"""Label-aware elimination orders and the omega+1 greedy coloring.

The pipeline: build the extreme decomposition tree, push special labels
(C, F) down to blocks, produce a nice elimination order for each basic
leaf (with the distinguished marker-path suffix), and merge orders across
each 2-join with the attachment-substitution rules. Every produced order
is audited step by step; structured constructions fall back to a direct
backtracking search rather than emitting an unchecked order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .detect import (
    CLIQUE,
    EXTENDED_BASIC,
    HOLE,
    LONG_PYRAMID,
    BasicKind,
    extended_basic_structures,
)
from .errors import OrderConstructionError
from .graph import (
    Graph,
    bits,
    is_clique,
    mask_of,
    maximal_cliques,
    maximal_flat_paths,
)
from .twojoin import Block, DecompNode, TwoJoinSplit, build_decomposition_tree


@dataclass(frozen=True)
class SpecialLabels:
    """The (C, F) vertex labels carried through the decomposition."""

    c_set: frozenset[int]
    f_set: frozenset[int]

    @staticmethod
    def empty() -> "SpecialLabels":
        return SpecialLabels(frozenset(), frozenset())

    def violations(self, g: Graph) -> list[str]:
        out = []
        if self.c_set & self.f_set:
            out.append("C and F intersect")
        fm = mask_of(self.f_set)
        for f in self.f_set:
            if g.degree(f) != 2:
                out.append(f"F vertex {f} has degree {g.degree(f)}")
        for c in self.c_set:
            if not g.adj[c] & fm:
                out.append(f"C vertex {c} has no F neighbor")
        return out

    def validate(self, g: Graph) -> None:
        problems = self.violations(g)
        if problems:
            raise OrderConstructionError("; ".join(problems))


def is_almost_simplicial(g: Graph, labels: SpecialLabels, v: int, present=None) -> bool:
    """Neighborhood is a clique, or a clique plus one vertex outside C.

    `present` restricts to the residual graph (mask or iterable); vertices
    in F are assumed absent from any residual by construction.
    """
    pm = g.full_mask if present is None else g.as_mask(present)
    nb = g.adj[v] & pm
    if is_clique(g, nb):
        return True
    cm = mask_of(labels.c_set)
    for u in bits(nb & ~cm):
        if is_clique(g, nb & ~(1 << u)):
            return True
    return False


def propagate_labels(s: TwoJoinSplit, labels: SpecialLabels, block: Block) -> SpecialLabels:
    """Labels for a block of decomposition, in block-vertex ids.

    Kept-side labels are inherited; each marker end lands in C unless the
    kept attachment is a single C vertex whose replaced-side partners meet
    F, in which case the end lands in F; the marker interior is all F.
    """
    kept = block.side
    _, a_kept, b_kept = s.side(kept)
    _, a_rep, b_rep = s.side(3 - kept)
    back = {p: i for i, p in enumerate(block.origin) if p is not None}
    c_new = {back[v] for v in labels.c_set if v in back}
    f_new = {back[v] for v in labels.f_set if v in back}
    a_end, b_end = block.marker[0], block.marker[-1]
    for end, att_kept, att_rep in ((a_end, a_kept, a_rep), (b_end, b_kept, b_rep)):
        single = len(att_kept) == 1 and next(iter(att_kept)) in labels.c_set
        if single and att_rep & labels.f_set:
            f_new.add(end)
        else:
            c_new.add(end)
    f_new.update(block.marker_interior)
    return SpecialLabels(frozenset(c_new), frozenset(f_new))


def clique_number(g: Graph) -> int:
    return max((m.bit_count() for m in maximal_cliques(g)), default=0)


def greedy_color(g: Graph, order: list[int]) -> list[int]:
    """Greedy coloring in reverse elimination order; 1-based colors."""
    if sorted(order) != list(g.vertices()):
        raise ValueError("order must cover every vertex exactly once")
    colors = [0] * g.n
    for v in reversed(order):
        used = 0
        for w in bits(g.adj[v]):
            if colors[w]:
                used |= 1 << (colors[w] - 1)
        c = 1
        while used & (1 << (c - 1)):
            c += 1
        colors[v] = c
    return colors


def audit_nice_order(g: Graph, labels: SpecialLabels, order: list[int]) -> None:
    """Replay the order and check the almost-simplicial condition stepwise."""
    fm = mask_of(labels.f_set)
    present = g.full_mask & ~fm
    expected = set(bits(present))
    if sorted(order) != sorted(expected):
        raise OrderConstructionError("order does not cover V minus F exactly once")
    for v in order:
        if not (present >> v) & 1:
            raise OrderConstructionError(f"vertex {v} eliminated twice or absent")
        if not is_almost_simplicial(g, labels, v, present):
            raise OrderConstructionError(f"vertex {v} is not almost simplicial at its turn")
        present &= ~(1 << v)


def _direct_nice_order(
    g: Graph,
    labels: SpecialLabels,
    suffix: frozenset[int] = frozenset(),
    node_budget: int = 200_000,
) -> list[int]:
    """Backtracking search for a nice order, optionally with a suffix set.

    Vertices of `suffix` must occupy the final positions (in some internal
    order). Failed residual states are memoized. Used for stuck leaves and
    as the fallback when a structured construction fails its audit.
    """
    fm = mask_of(labels.f_set)
    present0 = g.full_mask & ~fm
    suffix_mask = mask_of(suffix) & present0
    failed: set[int] = set()
    budget = node_budget

    def rec(present: int, acc: list[int]) -> bool:
        nonlocal budget
        if present == 0:
            return True
        if present in failed:
            return False
        budget -= 1
        if budget <= 0:
            raise OrderConstructionError("direct nice-order search budget exhausted")
        pool = present & ~suffix_mask
        if pool == 0:
            pool = present
        for v in bits(pool):
            if is_almost_simplicial(g, labels, v, present):
                acc.append(v)
                if rec(present & ~(1 << v), acc):
                    return True
                acc.pop()
        failed.add(present)
        return False

    acc: list[int] = []
    if not rec(present0, acc):
        raise OrderConstructionError("no nice elimination order found by direct search")
    return acc


def _maximal_flat_extension(g: Graph, path) -> tuple[int, ...]:
    """Extend a flat path through degree-2 ends as far as it stays induced."""
    seq = list(path)
    for direction in (0, 1):
        while True:
            end = seq[0] if direction == 0 else seq[-1]
            if g.degree(end) != 2 or len(seq) < 2:
                break
            prev = seq[1] if direction == 0 else seq[-2]
            nxt = [w for w in bits(g.adj[end]) if w != prev]
            if not nxt or nxt[0] in seq:
                break
            w = nxt[0]
            if any(g.has_edge(w, u) for u in seq if u != end):
                break
            if direction == 0:
                seq.insert(0, w)
            else:
                seq.append(w)
    return tuple(seq)


def _q_set(g: Graph, labels: SpecialLabels, path) -> frozenset[int]:
    """Q_P: the path plus each end's outside neighborhood when it is a clique."""
    pm = mask_of(path)
    out = set(path)
    for end in (path[0], path[-1]):
        k = g.adj[end] & ~pm
        if k and is_clique(g, k):
            out |= set(bits(k))
    return frozenset(out) - labels.f_set


def _separates(g: Graph, comp: int, v: int, root: int, target: int) -> bool:
    """Inside comp, does removing v cut every target vertex from the root?"""
    alive = comp & ~(1 << v)
    frontier = root & alive
    seen = frontier
    tgt = target & alive & ~root
    if not tgt:
        return True
    while frontier:
        nxt = 0
        for u in bits(frontier):
            nxt |= g.adj[u]
        nxt &= alive & ~seen
        if nxt & tgt:
            return False
        seen |= nxt
        frontier = nxt
    return True


def _line_graph_order(
    g: Graph,
    comp: int,
    root: int,
    labels: SpecialLabels,
    special_adj: int,
    skip: int,
) -> list[int]:
    """Elimination order for a line-graph-of-a-tree component minus its root clique.

    Children are visited before parents; within the children of a clique's
    cut vertex, the child adjacent to a special vertex goes last. Vertices in
    `skip` (F or already emitted) are omitted.
    """
    if comp == root:
        return []
    cliques = [m for m in maximal_cliques(g, within=comp) if m.bit_count() >= 3]
    b_of: dict[int, int] = {}
    b_cliques: dict[int, list[int]] = {}
    for kq in cliques:
        if kq == root:
            continue
        bv = None
        for v in bits(kq):
            if _separates(g, comp, v, root, kq):
                bv = v
                break
        if bv is None:
            raise OrderConstructionError("clique without a cut vertex toward the root")
        b_of[kq] = bv
        b_cliques.setdefault(bv, []).append(kq)

    clique_of_edge: dict[tuple[int, int], int] = {}
    for kq in cliques:
        vs = list(bits(kq))
        for i, u in enumerate(vs):
            for v in vs[i + 1 :]:
                clique_of_edge[(u, v)] = kq

    tadj: dict[int, list[int]] = {v: [] for v in bits(comp)}
    r = -1
    tadj[r] = []
    n_edges = 0
    for u in bits(comp):
        for v in bits(g.adj[u] & comp):
            if v <= u:
                continue
            kq = clique_of_edge.get((u, v))
            if kq == root or (kq is None and (root >> u) & 1 and (root >> v) & 1):
                continue
            if kq is not None and b_of[kq] != u and b_of[kq] != v:
                continue
            tadj[u].append(v)
            tadj[v].append(u)
            n_edges += 1
    for m in bits(root):
        tadj[r].append(m)
        tadj[m].append(r)
        n_edges += 1
    if n_edges != comp.bit_count():  # tree on comp plus r
        raise OrderConstructionError("component edges do not reduce to a tree")

    parent: dict[int, int] = {r: r}
    order_stack = [r]
    seen = {r}
    while order_stack:
        u = order_stack.pop()
        for v in tadj[u]:
            if v not in seen:
                seen.add(v)
                parent[v] = u
                order_stack.append(v)
    if len(seen) != comp.bit_count() + 1:
        raise OrderConstructionError("component tree is disconnected")

    children: dict[int, list[int]] = {v: [] for v in seen}
    for v, p in parent.items():
        if v != p:
            children[p].append(v)

    def child_key(u: int, c: int):
        late = 0
        for kq in b_cliques.get(u, []):
            if (kq >> c) & 1 and g.adj[c] & special_adj:
                late = 1
        return (late, c)

    out: list[int] = []

    def emit(u: int) -> None:
        for c in sorted(children[u], key=lambda c: child_key(u, c)):
            emit(c)
        if u != r and not ((root >> u) & 1) and not ((skip >> u) & 1):
            out.append(u)

    emit(r)
    return out


def _structured_extended(
    g: Graph, labels: SpecialLabels, ext, path
) -> tuple[list[int], frozenset[int]]:
    x, y = ext.x, ext.y
    fm = mask_of(labels.f_set)
    if path is None:
        # Base construction: root at an extended clique, then x, y, then the root.
        root = mask_of(min(ext.extended_cliques, key=lambda k: min(k)))
        q = frozenset()
        p_ext = None
    else:
        p_ext = _maximal_flat_extension(g, path)
        q = _q_set(g, labels, path)
    order: list[int] = []
    emitted = 0

    def push(vs) -> None:
        nonlocal emitted
        for v in vs:
            if not ((fm >> v) & 1) and not ((emitted >> v) & 1):
                order.append(v)
                emitted |= 1 << v

    special_adj = g.adj[x] | g.adj[y]

    if p_ext is None:
        protected = root | (1 << x) | (1 << y)
        front = sorted(
            v
            for v in labels.c_set
            if not ((protected >> v) & 1)
            and not ((fm >> v) & 1)
            and is_clique(g, g.adj[v] & ~fm)
        )
        push(front)
        comp = g.full_mask & ~(1 << x) & ~(1 << y)
        push(_line_graph_order(g, comp, root, labels, special_adj, emitted | fm))
        _push_specials(g, labels, [x, y], emitted, fm, push)
        push(sorted(bits(root)))
        return order, q

    pm = mask_of(p_ext)
    x_on = bool((pm >> x) & 1)
    y_on = bool((pm >> y) & 1)
    if (x_on and x not in (p_ext[0], p_ext[-1]) and g.degree(x) > 2) or (
        y_on and y not in (p_ext[0], p_ext[-1]) and g.degree(y) > 2
    ):
        raise OrderConstructionError("special vertex trapped inside the flat path")

    specials_off = [v for v in (x, y) if not ((pm >> v) & 1)]
    removed = pm | mask_of(specials_off)
    q_prot = mask_of(q) | pm
    front = sorted(
        v
        for v in labels.c_set
        if not ((q_prot >> v) & 1)
        and v not in (x, y)
        and not ((fm >> v) & 1)
        and is_clique(g, g.adj[v] & ~fm)
    )
    push(front)

    from .graph import components_masks

    comps = components_masks(g, removed)
    ends_l = [e for e in (p_ext[0], p_ext[-1]) if e not in (x, y)]
    k_sides = {}
    for comp in comps:
        contribs = [(e, g.adj[e] & comp) for e in ends_l if g.adj[e] & comp]
        if not contribs:
            raise OrderConstructionError("component attached only through specials")
        if len(contribs) > 1:
            raise OrderConstructionError("component attached to both path ends")
        end, root = contribs[0]
        if not is_clique(g, root):
            raise OrderConstructionError("path-end attachment is not a clique")
        push(_line_graph_order(g, comp, root, labels, special_adj, emitted | fm))
        k_sides.setdefault(end, 0)
        k_sides[end] |= root
    _push_specials(g, labels, specials_off, emitted, fm, push)
    _push_q_peel(g, p_ext, k_sides, q, fm, push)
    missing = g.full_mask & ~emitted & ~fm
    if missing:
        raise OrderConstructionError("structured order left vertices behind")
    return order, q


def _push_specials(g, labels, specials, emitted, fm, push) -> None:
    live = [v for v in specials if not ((fm >> v) & 1)]
    if not live:
        return
    present = g.full_mask & ~fm & ~emitted

    def res_deg(v: int) -> int:
        return (g.adj[v] & present & ~(1 << v)).bit_count()

    live.sort(key=lambda v: (res_deg(v), v))
    push(live)


def _push_q_peel(g, p_ext, k_sides, q, fm, push) -> None:
    """Peel the clique-path-clique zone, leaving exactly Q_P for last."""
    k1 = k_sides.get(p_ext[0], 0)
    k2 = k_sides.get(p_ext[-1], 0)
    qm = mask_of(q)
    push(sorted(v for v in bits(k1) if not ((qm >> v) & 1)))
    left_out = []
    for v in p_ext:
        if (qm >> v) & 1:
            break
        left_out.append(v)
    push(left_out)
    push(sorted(v for v in bits(k2) if not ((qm >> v) & 1)))
    right_out = []
    for v in reversed(p_ext):
        if (qm >> v) & 1:
            break
        right_out.append(v)
    push(right_out)
    on_path = [v for v in p_ext if (qm >> v) & 1]
    extras = q - set(p_ext)
    q_left = sorted(v for v in extras if on_path and g.has_edge(v, on_path[0]))
    q_right = sorted(extras - set(q_left))
    push(q_left)
    push(on_path)
    push(q_right)


def _structured_pyramid(
    g: Graph, labels: SpecialLabels, pyr, path
) -> tuple[list[int], frozenset[int]]:
    legs = {frozenset(p): p for p in pyr.paths}
    if path is None:
        p_ext = pyr.paths[0]
        q = frozenset()
    else:
        p_ext = _maximal_flat_extension(g, path)
        q = _q_set(g, labels, path)
    key = frozenset(p_ext)
    if key not in legs:
        raise OrderConstructionError("flat path does not extend to a pyramid leg")
    leg = legs[key]
    if p_ext[0] != leg[0]:
        p_ext = tuple(reversed(p_ext))
    fm = mask_of(labels.f_set)
    other_tri = [t for t in pyr.triangle if t != leg[0]]
    k1 = mask_of(other_tri)
    q_zone = mask_of(p_ext) | k1
    order: list[int] = []
    emitted = 0

    def push(vs) -> None:
        nonlocal emitted
        for v in vs:
            if not ((fm >> v) & 1) and not ((emitted >> v) & 1):
                order.append(v)
                emitted |= 1 << v

    # Other-leg interiors: greedy almost-simplicial elimination.
    pool = set(bits(g.full_mask & ~q_zone & ~fm))
    while pool:
        present = g.full_mask & ~fm & ~emitted
        step = None
        for v in sorted(pool):
            if is_almost_simplicial(g, labels, v, present):
                step = v
                break
        if step is None:
            raise OrderConstructionError("pyramid leg elimination is stuck")
        push([step])
        pool.remove(step)
    q_target = q if path is not None else frozenset(bits(q_zone)) - labels.f_set
    _push_q_peel(g, p_ext, {p_ext[0]: k1}, q_target, fm, push)
    missing = g.full_mask & ~emitted & ~fm
    if missing:
        raise OrderConstructionError("structured pyramid order left vertices behind")
    return order, q


def nice_order_basic(
    g: Graph,
    labels: SpecialLabels,
    kind: BasicKind,
    path=None,
) -> tuple[list[int], frozenset[int]]:
    """Nice elimination order of V minus F with Q_P as its suffix.

    Returns (order, Q_P set). For cliques and holes the suffix constraint
    is honored through the direct search; pyramids and extended basics use
    the structured constructions, audited, with a direct-search fallback.
    """
    q = _q_set(g, labels, path) if path is not None else frozenset()
    if kind.tag == CLIQUE:
        base = sorted(set(bits(g.full_mask)) - labels.f_set - q)
        order = base + sorted(q)
    elif kind.tag == HOLE:
        order = _direct_nice_order(g, labels, suffix=q)
    else:
        try:
            if kind.tag == LONG_PYRAMID:
                order, q = _structured_pyramid(g, labels, kind.pyramid, path)
            elif kind.tag == EXTENDED_BASIC:
                order, q = _try_extended_orders(g, labels, kind.extended, path)
            else:
                raise OrderConstructionError(f"unsupported basic kind {kind.tag}")
            audit_nice_order(g, labels, order)
        except OrderConstructionError:
            order = _direct_nice_order(g, labels, suffix=q)
    audit_nice_order(g, labels, order)
    if q and set(order[-len(q):]) != set(q):
        raise OrderConstructionError("Q_P is not a suffix of the leaf order")
    return order, q


def _try_extended_orders(g, labels, ext, path):
    """Try every (x, y) representation, preferring ones clear of the path."""
    p_ext = _maximal_flat_extension(g, path) if path is not None else None

    def entangle(e):
        if p_ext is None:
            return (0, e.x, e.y)
        score = 0
        for v in (e.x, e.y):
            if v in p_ext:
                score += 1 if v in (p_ext[0], p_ext[-1]) else 5
        return (score, e.x, e.y)

    structs = sorted(extended_basic_structures(g), key=entangle)
    if not structs:
        raise OrderConstructionError("no extended basic representation")
    last: OrderConstructionError | None = None
    for e in structs:
        try:
            return _structured_extended(g, labels, e, path)
        except OrderConstructionError as err:
            last = err
    raise last if last is not None else OrderConstructionError("no representation worked")


def _order_for_node(node: DecompNode, labels: SpecialLabels, audit: bool) -> list[int]:
    g = node.graph
    if audit:
        labels.validate(g)
    if node.is_leaf:
        if node.stuck:
            return _direct_nice_order(g, labels)
        if node.kind.tag in (CLIQUE, HOLE) or node.marker_path is None:
            if node.kind.tag == CLIQUE:
                return sorted(set(bits(g.full_mask)) - labels.f_set)
            if node.kind.tag == HOLE:
                return _direct_nice_order(g, labels)
            order, _ = nice_order_basic(g, labels, node.kind, path=None)
            return order
        order, _ = nice_order_basic(g, labels, node.kind, path=node.marker_path)
        return order

    s = node.split
    bi = node.basic_child_index
    block_b, block_o = node.blocks[bi], node.blocks[1 - bi]
    child_b, child_o = node.children[bi], node.children[1 - bi]
    labels_b = propagate_labels(s, labels, block_b)
    labels_o = propagate_labels(s, labels, block_o)
    o1_full, q = nice_order_basic(child_b.graph, labels_b, child_b.kind, block_b.marker)
    o1 = [v for v in o1_full if v not in q]
    o2 = _order_for_node(child_o, labels_o, audit)

    _, a_rep, b_rep = s.side(3 - block_o.side)  # attachments the marker stands in for
    alpha, beta = block_o.marker[0], block_o.marker[-1]
    f_parent = labels.f_set
    out = [block_b.origin[v] for v in o1]
    for v in o2:
        if v == alpha:
            if alpha in labels_o.c_set and is_clique(node.graph, a_rep):
                out.extend(sorted(set(a_rep) - f_parent))
        elif v == beta:
            if beta in labels_o.c_set and is_clique(node.graph, b_rep):
                out.extend(sorted(set(b_rep) - f_parent))
        else:
            out.append(block_o.origin[v])
    return out


def nice_order(g: Graph, *, tree: DecompNode | None = None, audit: bool = True) -> list[int]:
    """Nice elimination order of the whole vertex set (top-level F is empty).

    Built over the extreme decomposition tree; audited per-step unless audit
    is disabled. A failed merge falls back to the direct search before
    giving up.
    """
    if g.n == 0:
        return []
    if tree is None:
        tree = build_decomposition_tree(g)
    labels = SpecialLabels.empty()
    try:
        order = _order_for_node(tree, labels, audit)
        audit_nice_order(g, labels, order)
    except OrderConstructionError:
        order = _direct_nice_order(g, labels)
        audit_nice_order(g, labels, order)
    return order
