from __future__ import annotations

import random

import pytest

from evenhole.detect import CLIQUE, HOLE, classify_basic, find_even_hole, find_star_cutset
from evenhole.errors import OutOfClassError
from evenhole.generators import (
    ComposeRecipe,
    compose_two_join,
    complete_graph,
    cycle_graph,
    long_pyramid,
    tight_chromatic_graph,
)
from evenhole.graph import Graph, bits, is_connected, mask_of
from evenhole.oracle import brute_two_join
from evenhole.twojoin import (
    TwoJoinSplit,
    all_two_joins,
    build_blocks,
    build_decomposition_tree,
    find_two_join,
    recompose,
    side_path_parity,
    split_from_partition,
    verify_split,
)
from tests.test_graph_core import random_graph


def composed_pyramids():
    p1 = long_pyramid(5, 3, 3)  # donates interior length-3 subpath of leg 1
    p2 = long_pyramid(6, 4, 4)  # donates interior length-4 subpath of leg 1
    return compose_two_join(
        ComposeRecipe(p1.graph, (4, 5, 6, 7), p2.graph, (4, 5, 6, 7, 8))
    )


def test_verify_split_rejects_clique_bipartitions():
    g = complete_graph(8)
    s = TwoJoinSplit(
        frozenset({0, 1, 2, 3}),
        frozenset({4, 5, 6, 7}),
        frozenset({0}),
        frozenset({1}),
        frozenset({4}),
        frozenset({5}),
    )
    assert not verify_split(g, s)
    assert all_two_joins(g) == []


def test_verify_split_roundtrip_on_composed_seam():
    g, seam = composed_pyramids()
    assert verify_split(g, seam)
    assert not verify_split(g, seam, forbidden=[tuple(sorted(seam.a1)) + tuple(sorted(seam.a2))])


def test_find_two_join_c4_absent():
    assert find_two_join(cycle_graph(4)) is None


def test_find_two_join_recovers_composed_seam():
    g, seam = composed_pyramids()
    splits = all_two_joins(g)
    assert any(s.signature() == seam.signature() for s in splits)
    best = find_two_join(g)
    assert verify_split(g, best)


def test_two_join_agrees_with_bipartition_oracle():
    # Pyramid with paths 3,3,1 (not long) and assorted random graphs.
    pyr = Graph(
        9,
        [(0, 1), (0, 2), (1, 2), (3, 0), (3, 4), (4, 5), (5, 1), (3, 6), (6, 7), (7, 2)],
    )
    rng = random.Random(71)
    cases = [pyr, cycle_graph(7), complete_graph(7)]
    for _ in range(200):
        cases.append(random_graph(rng, rng.randint(6, 9), rng.choice([0.25, 0.4, 0.6])))
    for g in cases:
        mine = all_two_joins(g)
        brute = brute_two_join(g)
        assert (len(mine) > 0) == (brute is not None), g.edges()
        for s in mine:
            assert verify_split(g, s)


def test_two_join_oracle_signature_equality_small():
    # Full split-set agreement between the seeded search and bipartition scan.
    rng = random.Random(97)
    for _ in range(120):
        g = random_graph(rng, 8, rng.choice([0.3, 0.5]))
        mine = {s.signature() for s in all_two_joins(g)}
        brute = set()
        for m in range(1, 1 << (g.n - 1)):
            s = split_from_partition(g, m | (1 << (g.n - 1)))
            if s is not None:
                brute.add(s.signature())
        assert mine == brute, g.edges()


def test_side_path_parity_direct_edge_and_flat_path():
    g, seam = composed_pyramids()
    # Side 1 is the (5,3,3) pyramid remainder: x1-to-y routes have length 4.
    assert side_path_parity(g, seam, 1, verify=True) == 0
    # Side 2 is the (6,4,4) pyramid remainder: routes have length 5.
    assert side_path_parity(g, seam, 2, verify=True) == 1


def test_build_blocks_marker_lengths_follow_parity():
    g, seam = composed_pyramids()
    b1, b2 = build_blocks(g, seam, verify=True)
    # k2 = 3 iff side-2 paths odd; k1 = 4 iff side-1 paths even.
    assert b1.marker_length == 3
    assert b2.marker_length == 4
    for b, (_, am, bm) in ((b1, seam.side(1)), (b2, seam.side(2))):
        ga = b.graph
        a_end, b_end = b.marker[0], b.marker[-1]
        back = {p: i for i, p in enumerate(b.origin) if p is not None}
        assert ga.adj[a_end] == mask_of([back[v] for v in am]) | (1 << b.marker[1])
        assert ga.adj[b_end] == mask_of([back[v] for v in bm]) | (1 << b.marker[-2])
        for v in b.marker_interior:
            assert ga.degree(v) == 2


def test_build_blocks_roundtrip():
    g, seam = composed_pyramids()
    blocks = build_blocks(g, seam)
    assert recompose(blocks, seam) == g


def test_blocks_stay_in_class():
    g, seam = composed_pyramids()
    b1, b2 = build_blocks(g, seam)
    for b in (b1, b2):
        assert is_connected(b.graph)
        assert find_even_hole(b.graph) is None
        assert find_star_cutset(b.graph) is None


def test_decomposition_tree_basic_root():
    g = long_pyramid(3, 3, 3).graph
    tree = build_decomposition_tree(g)
    assert tree.is_leaf and tree.kind.tag == "long_pyramid"
    k5 = build_decomposition_tree(complete_graph(5))
    assert k5.is_leaf and k5.kind.tag == CLIQUE
    c7 = build_decomposition_tree(cycle_graph(7))
    assert c7.is_leaf and c7.kind.tag == HOLE


def test_decomposition_tree_composed_two_leaves():
    g, _ = composed_pyramids()
    tree = build_decomposition_tree(g, check_class=True)
    leaves = [nd for nd in tree.walk() if nd.is_leaf]
    assert all(l.kind.is_basic for l in leaves)
    # Non-root basic leaves are never cliques or holes.
    for l in leaves:
        if l is not tree:
            assert l.kind.tag not in (CLIQUE, HOLE)


def test_decomposition_tree_invariants():
    g, _ = composed_pyramids()
    tree = build_decomposition_tree(g)
    for node in tree.walk():
        masks = [mask_of(p) for p in node.flat_paths]
        for i, m in enumerate(masks):
            for m2 in masks[i + 1 :]:
                assert m & m2 == 0  # marker paths stay vertex-disjoint
        for p in node.flat_paths:
            for v in p[1:-1]:
                assert node.graph.degree(v) == 2
        if not node.is_leaf:
            x1m = mask_of(node.split.x1)
            for p in node.flat_paths:
                pm = mask_of(p)
                assert pm & x1m == 0 or pm & ~x1m == 0  # non-crossing
            assert node.children[node.basic_child_index].kind.is_basic


def test_decomposition_tree_rejects_out_of_class_with_check():
    with pytest.raises(OutOfClassError):
        build_decomposition_tree(cycle_graph(6), check_class=True)


def test_decomposition_tree_stuck_leaf_on_tight_family_core():
    g = tight_chromatic_graph(3).graph
    tree = build_decomposition_tree(g)
    assert tree.is_leaf and tree.stuck
    from evenhole.errors import DecompositionError

    with pytest.raises(DecompositionError):
        build_decomposition_tree(g, allow_stuck=False)


def test_decomposition_json_schema():
    from tests.instances import composed_ext_pyramid

    g, _ = composed_ext_pyramid()
    tree = build_decomposition_tree(g)
    doc = tree.to_json()
    assert doc["vertices"] == g.n
    assert "split" in doc and set(doc["split"]) == {"X1", "X2", "A1", "B1", "A2", "B2"}
    assert len(doc["children"]) == 2
    assert doc["marker_lengths"] in ([3, 4], [4, 3])


def test_three_piece_composition_decomposes():
    from tests.instances import composed_three_pieces

    g, _ = composed_three_pieces()
    tree = build_decomposition_tree(g, check_class=True)
    leaves = [nd for nd in tree.walk() if nd.is_leaf]
    assert len(leaves) >= 3
    assert all(l.kind.is_basic for l in leaves)
