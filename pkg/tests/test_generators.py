from __future__ import annotations

from collections import defaultdict

import pytest

from evenhole.detect import (
    LONG_PYRAMID,
    check_extended_clique_neighbors,
    classify_basic,
    find_clique_cutset,
    find_even_hole,
    find_star_cutset,
    holes,
)
from evenhole.errors import ComposeError
from evenhole.generators import (
    ComposeRecipe,
    build_corpus,
    compose_two_join,
    extended_basic_from_tree,
    long_pyramid,
    random_composed_instance,
    tight_chromatic_graph,
    unbounded_cwd_graph,
)
from evenhole.graph import GraphError, flat_subpaths, is_connected
from evenhole.oracle import OracleBudget, brute_chromatic, brute_star_cutset
from evenhole.coloring import clique_number
from evenhole.twojoin import build_decomposition_tree, find_two_join, verify_split
from tests.instances import EXT_ASSIGN, EXT_TREE, composed_ext_pyramid


def tree_canon(edges):
    """Unrooted AHU canonical form."""
    adj = defaultdict(set)
    nodes = set()
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
        nodes.update((u, v))
    if len(nodes) == 1:
        return ("*",)
    deg = {v: len(adj[v]) for v in nodes}
    layer = [v for v in nodes if deg[v] == 1]
    alive = set(nodes)
    while len(alive) > 2:
        nxt = []
        for v in layer:
            alive.discard(v)
            for w in adj[v]:
                if w in alive:
                    deg[w] -= 1
                    if deg[w] == 1:
                        nxt.append(w)
        layer = nxt

    def canon(root, parent):
        return tuple(sorted(canon(c, root) for c in adj[root] if c != parent))

    return min(
        (canon(c, None if len(alive) == 1 else next(iter(alive - {c}))) for c in alive),
        default=(),
    )


def test_tight_chromatic_sizes_and_values():
    named = tight_chromatic_graph(5)
    assert named.graph.n == 23  # 6k - 7
    assert clique_number(named.graph) == 5
    g3 = tight_chromatic_graph(3)
    assert clique_number(g3.graph) == 3
    assert brute_chromatic(g3.graph) == 4
    with pytest.raises(GraphError):
        tight_chromatic_graph(2)


def test_tight_chromatic_family_in_class():
    for k in range(3, 9):
        g = tight_chromatic_graph(k).graph
        assert is_connected(g)
        assert find_even_hole(g) is None
        assert find_star_cutset(g) is None
    # exponential certificate at the smallest size
    assert brute_star_cutset(tight_chromatic_graph(3).graph, OracleBudget(max_star_cutset=11)) is None


def test_unbounded_cwd_graph_k4():
    named = unbounded_cwd_graph(4)
    g = named.graph
    assert g.n == 25
    lengths = {len(c) for c in holes(g)}
    assert lengths == {5}
    assert find_even_hole(g) is None
    assert find_clique_cutset(g) is None
    w = find_star_cutset(g)
    assert w is not None and w.validate(g)


def test_unbounded_cwd_graph_invalid_k():
    for bad in (3, 5, 2):
        with pytest.raises(GraphError):
            unbounded_cwd_graph(bad)


def test_long_pyramid_basics():
    named = long_pyramid(2, 2, 2)
    assert named.graph.n == 7
    assert classify_basic(named.graph).tag == LONG_PYRAMID
    assert find_even_hole(long_pyramid(3, 3, 3).graph) is None
    with pytest.raises(GraphError):
        long_pyramid(2, 3, 3)
    with pytest.raises(GraphError):
        long_pyramid(1, 3, 3)


def test_extended_basic_roundtrip_tree_isomorphism():
    named = extended_basic_from_tree(EXT_TREE, EXT_ASSIGN)
    kind = classify_basic(named.graph)
    assert kind.tag == "extended_nontrivial_basic"
    assert tree_canon(kind.extended.tree_edges) == tree_canon(EXT_TREE)
    assert check_extended_clique_neighbors(named.graph, kind.extended)


def test_extended_basic_validation_errors():
    with pytest.raises(GraphError):
        # path tree: no branch vertices at all
        extended_basic_from_tree([(0, 1), (1, 2)], {(0, 1): "x", (1, 2): "y"})
    with pytest.raises(GraphError):
        extended_basic_from_tree(EXT_TREE, {})  # assignment must cover leaf edges


def test_compose_parity_rule():
    p1 = long_pyramid(5, 3, 3)
    p2 = long_pyramid(5, 3, 3)
    with pytest.raises(ComposeError):
        compose_two_join(ComposeRecipe(p1.graph, (4, 5, 6, 7), p2.graph, (4, 5, 6, 7)))


def test_compose_rejects_non_flat():
    p1 = long_pyramid(5, 3, 3)
    p2 = long_pyramid(6, 4, 4)
    with pytest.raises(ComposeError):
        compose_two_join(ComposeRecipe(p1.graph, (0, 1, 2, 3), p2.graph, (4, 5, 6, 7, 8)))


def test_compose_roundtrip_seam_found():
    g, seam = composed_ext_pyramid()
    assert verify_split(g, seam)
    assert find_two_join(g) is not None
    tree = build_decomposition_tree(g)
    assert len([nd for nd in tree.walk() if nd.is_leaf]) >= 2


def test_random_composed_instance_deterministic():
    a, ra = random_composed_instance(4242)
    b, rb = random_composed_instance(4242)
    assert ra == rb
    if a is not None:
        assert a.graph == b.graph


def test_build_corpus_small():
    instances, quarantine = build_corpus(7, 5)
    assert len(instances) == 5
    for inst in instances:
        g = inst.graph
        assert 15 <= g.n <= 60
        assert is_connected(g)
        assert find_even_hole(g) is None
        assert find_star_cutset(g) is None
