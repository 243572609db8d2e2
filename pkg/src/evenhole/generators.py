"""Constructors for the extremal families and synthetic in-class instances.

All generators are deterministic given their parameters (and seed, for the
composition corpus). Families keep a name table alongside dense ids so tests
can refer to labeled vertices.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import ComposeError
from .graph import (
    Graph,
    GraphError,
    bits,
    flat_subpaths,
    is_connected,
    is_flat_path,
    mask_of,
)


@dataclass(frozen=True)
class NamedGraph:
    graph: Graph
    names: dict[str, int] = field(hash=False)

    def id_of(self, name: str) -> int:
        return self.names[name]


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def tight_chromatic_graph(k: int) -> NamedGraph:
    """Family with clique number k and chromatic number k+1, on 6k-7 vertices.

    Cliques A, C, E and independent sets B, D of size k-1 plus an independent
    set F of size k-2, wired so that any k-coloring forces the same color on
    all of B and D and then runs out of colors on the clique a_{k-1} + E.
    """
    if k < 3:
        raise GraphError("tight chromatic family needs k >= 3")
    names: dict[str, int] = {}
    nid = 0
    for prefix, size in (("a", k - 1), ("b", k - 1), ("c", k - 1), ("d", k - 1), ("e", k - 1), ("f", k - 2)):
        for i in range(1, size + 1):
            names[f"{prefix}{i}"] = nid
            nid += 1
    edges = []

    def group(prefix, size):
        return [names[f"{prefix}{i}"] for i in range(1, size + 1)]

    a, b, c, d, e, f = (
        group("a", k - 1),
        group("b", k - 1),
        group("c", k - 1),
        group("d", k - 1),
        group("e", k - 1),
        group("f", k - 2),
    )
    for grp in (a, c, e):
        edges += [(u, v) for i, u in enumerate(grp) for v in grp[i + 1 :]]
    edges += [(u, v) for u in a for v in b]
    edges += [(u, v) for u in c for v in d]
    edges += [(b[i], c[i]) for i in range(k - 1)]
    edges += [(d[i], e[i]) for i in range(k - 1)]
    edges += [(a[k - 2], v) for v in e]
    edges += [(d[0], v) for v in f]
    edges += [(a[i], f[i]) for i in range(k - 2)]
    return NamedGraph(Graph(nid, edges), names)


def unbounded_cwd_graph(k: int) -> NamedGraph:
    """Even-hole-free family with no clique cutset and clique-width >= k.

    k+1 cliques A_0..A_k of size k+1 arranged cyclically; a_{i,j} is adjacent
    to a_{i+1,l} iff j + l <= k (indices on i modulo k+1). Requires k >= 4
    and even, so every hole has odd length k+1.
    """
    if k < 4 or k % 2:
        raise GraphError("unbounded clique-width family needs even k >= 4")
    names = {}
    for i in range(k + 1):
        for j in range(k + 1):
            names[f"a{i}_{j}"] = i * (k + 1) + j
    edges = []
    for i in range(k + 1):
        base = i * (k + 1)
        edges += [(base + p, base + q) for p in range(k + 1) for q in range(p + 1, k + 1)]
        nxt = ((i + 1) % (k + 1)) * (k + 1)
        for j in range(k + 1):
            for l in range(k + 1):
                if j + l <= k:
                    edges.append((base + j, nxt + l))
    return NamedGraph(Graph((k + 1) ** 2, edges), names)


def long_pyramid(l1: int, l2: int, l3: int) -> NamedGraph:
    """Pyramid on triangle {x1,x2,x3} and apex y with paths of the given lengths.

    All lengths must be >= 2 and share parity (otherwise two of the paths
    close an even hole).
    """
    lengths = (l1, l2, l3)
    if any(l < 2 for l in lengths):
        raise GraphError("long pyramid needs every path length >= 2")
    if len({l % 2 for l in lengths}) != 1:
        raise GraphError("pyramid path lengths must share parity")
    names = {"x1": 0, "x2": 1, "x3": 2, "y": 3}
    edges = [(0, 1), (0, 2), (1, 2)]
    nid = 4
    for p, l in enumerate(lengths, start=1):
        prev = p - 1  # triangle vertex x_p
        for step in range(1, l):
            names[f"p{p}_{step}"] = nid
            edges.append((prev, nid))
            prev = nid
            nid += 1
        edges.append((prev, 3))
    return NamedGraph(Graph(nid, edges), names)


def extended_basic_from_tree(
    tree_edges: list[tuple[int, int]],
    xy_assignment: dict[tuple[int, int], str],
) -> NamedGraph:
    """Line graph of a tree plus an adjacent pair {x, y} wired to the leaf nodes.

    `tree_edges` lists the tree; `xy_assignment` maps each leaf edge (edge
    incident to a degree-1 tree vertex, given as a sorted pair) to "x" or
    "y". The tree must have at least two vertices of degree >= 3 so the line
    graph carries two extended cliques.
    """
    edges_sorted = sorted(tuple(sorted(e)) for e in tree_edges)
    if len(set(edges_sorted)) != len(edges_sorted):
        raise GraphError("duplicate tree edge")
    tverts = sorted({v for e in edges_sorted for v in e})
    deg = {v: 0 for v in tverts}
    for u, v in edges_sorted:
        deg[u] += 1
        deg[v] += 1
    if len(edges_sorted) != len(tverts) - 1:
        raise GraphError("edge list is not a tree")
    branch = [v for v in tverts if deg[v] >= 3]
    if len(branch) < 2:
        raise GraphError("tree needs >= 2 vertices of degree >= 3 for two extended cliques")
    leaf_edges = [e for e in edges_sorted if deg[e[0]] == 1 or deg[e[1]] == 1]
    if set(xy_assignment) != set(leaf_edges):
        raise GraphError("assignment must cover exactly the leaf edges")
    if any(side not in ("x", "y") for side in xy_assignment.values()):
        raise GraphError("assignment values must be 'x' or 'y'")

    n_l = len(edges_sorted)
    names = {f"e{u}_{v}": i for i, (u, v) in enumerate(edges_sorted)}
    x_id, y_id = n_l, n_l + 1
    names["x"] = x_id
    names["y"] = y_id
    g_edges = [(x_id, y_id)]
    for i, e1 in enumerate(edges_sorted):
        for j in range(i + 1, n_l):
            e2 = edges_sorted[j]
            if set(e1) & set(e2):
                g_edges.append((i, j))
    for e, side in xy_assignment.items():
        g_edges.append((names[f"e{e[0]}_{e[1]}"], x_id if side == "x" else y_id))
    return NamedGraph(Graph(n_l + 2, g_edges), names)


@dataclass(frozen=True)
class ComposeRecipe:
    """Two component graphs, each giving up a designated flat path.

    One path must have length 3 and the other length 4: the two sides of a
    2-join in an even-hole-free graph carry opposite path parities (a seam
    hole has length p1 + p2 + 2, which must be odd), and each designated
    path is the marker standing in for the opposite side. Path ends are read
    positionally: the attachments of path1[0] pair with those of path2[0].
    """

    graph1: Graph
    path1: tuple[int, ...]
    graph2: Graph
    path2: tuple[int, ...]


def _attachments(g: Graph, path: tuple[int, ...]):
    pmask = mask_of(path)
    a = g.adj[path[0]] & ~pmask
    b = g.adj[path[-1]] & ~pmask
    return a, b


def compose_two_join(recipe: ComposeRecipe):
    """Glue the two components along their designated flat paths.

    Inverts block construction: each path is deleted and the exposed
    attachment sets are joined completely (a-ends together, b-ends
    together). Returns (graph, split), the split being the seam
    (X1 = component-1 side) expressed in composed ids.
    """
    from .twojoin import TwoJoinSplit, verify_split

    g1, p1, g2, p2 = recipe.graph1, recipe.path1, recipe.graph2, recipe.path2
    for g, p in ((g1, p1), (g2, p2)):
        if not is_flat_path(g, p):
            raise ComposeError(f"designated path {p} is not flat")
        if len(p) - 1 not in (3, 4):
            raise ComposeError("designated paths must have length 3 or 4")
    if (len(p1) - 1) + (len(p2) - 1) != 7:
        raise ComposeError("marker parity rule requires one length-3 and one length-4 path")
    a1m, b1m = _attachments(g1, p1)
    a2m, b2m = _attachments(g2, p2)
    if not (a1m and b1m and a2m and b2m):
        raise ComposeError("a designated path end has no attachment")
    if a1m & b1m or a2m & b2m:
        raise ComposeError("attachment sets of the two ends overlap")

    keep1 = g1.full_mask & ~mask_of(p1)
    keep2 = g2.full_mask & ~mask_of(p2)
    old1 = list(bits(keep1))
    old2 = list(bits(keep2))
    map1 = {v: i for i, v in enumerate(old1)}
    off = len(old1)
    map2 = {v: off + i for i, v in enumerate(old2)}
    edges = []
    for u, v in g1.edges():
        if (keep1 >> u) & 1 and (keep1 >> v) & 1:
            edges.append((map1[u], map1[v]))
    for u, v in g2.edges():
        if (keep2 >> u) & 1 and (keep2 >> v) & 1:
            edges.append((map2[u], map2[v]))
    a1 = frozenset(map1[v] for v in bits(a1m))
    b1 = frozenset(map1[v] for v in bits(b1m))
    a2 = frozenset(map2[v] for v in bits(a2m))
    b2 = frozenset(map2[v] for v in bits(b2m))
    edges += [(u, v) for u in a1 for v in a2]
    edges += [(u, v) for u in b1 for v in b2]
    n = len(old1) + len(old2)
    g = Graph(n, edges)
    split = TwoJoinSplit(
        x1=frozenset(map1.values()),
        x2=frozenset(map2.values()),
        a1=a1,
        b1=b1,
        a2=a2,
        b2=b2,
    )
    if not verify_split(g, split):
        raise ComposeError("composition does not induce a valid 2-join")
    from .twojoin import side_path_parity

    for side, plen in ((1, len(p2) - 1), (2, len(p1) - 1)):
        # Marker replacing side i has length 3 iff that side's paths are odd.
        parity = side_path_parity(g, split, side)
        if (plen == 3) != (parity == 1):
            raise ComposeError("marker length inconsistent with side parity")
    return g, split


def _random_pyramid(rng: random.Random) -> Graph:
    base = rng.choice([2, 3])
    ls = sorted(rng.choice([base, base + 2, base + 4]) for _ in range(3))
    return long_pyramid(*ls).graph


def _random_extended_basic(rng: random.Random) -> Graph | None:
    """Random subdivided tree with >= 2 branch vertices, leaves split over x/y.

    Leaf edges are assigned to x or y by leaf-depth parity, which makes every
    x-to-y leaf distance odd and every same-side distance even (no even hole
    through the special pair). At most one unsubdivided leaf per branch
    vertex keeps x and y clear of clique conflicts. Returns None when the
    parity classes are one-sided; the caller retries.
    """
    n_branch = rng.choice([2, 2, 3, 3, 4])
    nid = 0
    branch = []
    edges = []
    for _ in range(n_branch):
        branch.append(nid)
        nid += 1
    for i in range(1, n_branch):
        prev = branch[rng.randrange(i)]
        cur = branch[i]
        last = prev
        for _ in range(rng.choice([1, 2, 3, 4])):
            edges.append((last, nid))
            last = nid
            nid += 1
        edges.append((last, cur))

    def degrees():
        d = {}
        for u, v in edges:
            d[u] = d.get(u, 0) + 1
            d[v] = d.get(v, 0) + 1
        return d

    deg = degrees()
    for b in branch:
        direct_used = False
        while deg.get(b, 0) < 3:
            subdiv = rng.choice([0, 1, 2])
            if subdiv == 0 and direct_used:
                subdiv = 1
            if subdiv == 0:
                direct_used = True
            last = b
            for _ in range(subdiv):
                edges.append((last, nid))
                last = nid
                nid += 1
            edges.append((last, nid))
            nid += 1
            deg[b] = deg.get(b, 0) + 1

    deg = degrees()
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    depth = {branch[0]: 0}
    queue = [branch[0]]
    while queue:
        u = queue.pop()
        for w in adj[u]:
            if w not in depth:
                depth[w] = depth[u] + 1
                queue.append(w)
    assignment = {}
    sides = set()
    for u, v in edges:
        if deg[u] == 1 or deg[v] == 1:
            leaf = u if deg[u] == 1 else v
            side = "x" if depth[leaf] % 2 == 0 else "y"
            assignment[tuple(sorted((u, v)))] = side
            sides.add(side)
    if sides != {"x", "y"}:
        return None
    return extended_basic_from_tree(edges, assignment).graph


def _in_class(g: Graph) -> tuple[bool, str]:
    from .detect import find_even_hole, find_star_cutset

    if not is_connected(g):
        return False, "disconnected"
    if find_even_hole(g) is not None:
        return False, "even hole"
    if find_star_cutset(g) is not None:
        return False, "star cutset"
    return True, ""


@dataclass
class CorpusInstance:
    graph: Graph
    seed: int
    pieces: int


def random_composed_instance(
    seed: int,
    *,
    min_n: int = 15,
    max_n: int = 60,
    max_pieces: int = 6,
):
    """One seeded composition attempt; returns (CorpusInstance | None, reason).

    Components are random in-class pyramids and extended basics glued along
    random equal-length flat paths. Attempts whose results leave the class
    are reported with the failing reason so corpus builders can quarantine
    them rather than crash.
    """
    rng = random.Random(seed)
    pieces = rng.randint(2, max_pieces)

    def component():
        if rng.random() < 0.5:
            return _random_pyramid(rng)
        for _ in range(5):
            g = _random_extended_basic(rng)
            if g is not None:
                return g
        return _random_pyramid(rng)

    current = component()
    used = 1
    for _ in range(pieces - 1):
        if current.n >= max_n - 6:
            break
        composed = None
        for _ in range(8):  # retry joins; many donor choices are invalid
            nxt = component()
            qlen = rng.choice([3, 4])
            cands1 = flat_subpaths(current, qlen)
            cands2 = flat_subpaths(nxt, 7 - qlen)
            if not cands1 or not cands2:
                continue
            p1 = rng.choice(cands1)
            p2 = rng.choice(cands2)
            if rng.random() < 0.5:
                p2 = tuple(reversed(p2))
            try:
                candidate, _ = compose_two_join(ComposeRecipe(current, p1, nxt, p2))
            except ComposeError:
                continue
            if candidate.n <= max_n:
                composed = candidate
                break
        if composed is None:
            break
        current = composed
        used += 1
    if used < 2 or not (min_n <= current.n <= max_n):
        return None, "size"
    ok, reason = _in_class(current)
    if not ok:
        return None, reason
    return CorpusInstance(current, seed, used), ""


def build_corpus(
    seed: int,
    count: int,
    *,
    min_n: int = 15,
    max_n: int = 60,
    max_attempts_factor: int = 40,
):
    """Seeded corpus of in-class composed instances plus a quarantine list.

    Deterministic: attempt seeds are seed*1000000 + i. Raises if the attempt
    budget runs out before `count` instances pass the class check.
    """
    instances: list[CorpusInstance] = []
    quarantine: list[tuple[int, str]] = []
    attempts = 0
    limit = count * max_attempts_factor
    i = 0
    while len(instances) < count:
        if attempts >= limit:
            raise GraphError(
                f"corpus build exhausted {limit} attempts with {len(instances)} instances"
            )
        attempt_seed = seed * 1_000_000 + i
        i += 1
        attempts += 1
        inst, reason = random_composed_instance(attempt_seed, min_n=min_n, max_n=max_n)
        if inst is None:
            quarantine.append((attempt_seed, reason))
        else:
            instances.append(inst)
    return instances, quarantine


def write_corpus(instances, directory) -> None:
    """Emit edge-list files plus a JSON manifest into a corpus directory."""
    import json
    from pathlib import Path

    from .graphio import serialize_graph

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    manifest = []
    for idx, inst in enumerate(instances):
        fname = f"instance_{idx:04d}.edges"
        (d / fname).write_text(serialize_graph(inst.graph))
        manifest.append(
            {"file": fname, "n": inst.graph.n, "seed": inst.seed, "pieces": inst.pieces}
        )
    (d / "manifest.json").write_text(json.dumps(manifest, indent=1))
