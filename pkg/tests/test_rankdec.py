from __future__ import annotations

import random

import pytest

from evenhole.detect import classify_basic
from evenhole.errors import DecompositionError
from evenhole.generators import (
    complete_graph,
    cycle_graph,
    long_pyramid,
    tight_chromatic_graph,
)
from evenhole.graph import Graph, cut_rank, flat_subpaths, mask_of
from evenhole.oracle import brute_rank_width
from evenhole.rankdec import (
    RankDecomposition,
    combine_rank_decompositions,
    decomposition_width,
    is_separated,
    normalize,
    rank_decomposition,
    rank_decomposition_basic,
)
from evenhole.twojoin import build_blocks, build_decomposition_tree
from tests.instances import (
    composed_ext_pyramid,
    composed_three_pieces,
    composed_two_pyramids,
    extended_component,
)


def test_width_clique_and_hole_and_singleton():
    for n in range(2, 13):
        g = complete_graph(n)
        assert decomposition_width(g, rank_decomposition(g)) <= 1
    for n in range(4, 13):
        g = cycle_graph(n)
        assert decomposition_width(g, rank_decomposition(g)) <= 2
    g1 = Graph(1)
    assert decomposition_width(g1, rank_decomposition(g1)) == 0


def test_is_separated_singletons_and_full():
    g = cycle_graph(5)
    d = rank_decomposition(g)
    for v in g.vertices():
        assert is_separated(d, g, [v])
    assert not is_separated(d, g, list(g.vertices()))
    assert not is_separated(d, g, [])


def test_rankdec_basic_extended_with_paths():
    g = extended_component().graph
    kind = classify_basic(g)
    paths = flat_subpaths(g, 3)
    d = rank_decomposition_basic(g, paths[:1], kind)
    assert decomposition_width(g, d) <= 3
    assert is_separated(d, g, paths[0])


def _random_disjoint_path_sets(g, rng, count):
    candidates = flat_subpaths(g, 3) + flat_subpaths(g, 4)
    sets = []
    for _ in range(count):
        rng.shuffle(candidates)
        chosen = []
        used = 0
        for p in candidates:
            pm = mask_of(p)
            if pm & used == 0:
                chosen.append(p)
                used |= pm
        sets.append(tuple(chosen))
    return sets


def test_property_p3_sampling():
    rng = random.Random(2024)
    samples = [
        long_pyramid(4, 4, 4).graph,
        long_pyramid(5, 3, 3).graph,
        long_pyramid(6, 4, 4).graph,
        extended_component().graph,
    ]
    for g in samples:
        kind = classify_basic(g)
        assert kind.is_basic
        for paths in _random_disjoint_path_sets(g, rng, 20):
            d = rank_decomposition_basic(g, paths, kind)
            assert decomposition_width(g, d) <= 3
            for p in paths:
                assert is_separated(d, g, p)


def test_combine_widths_and_separation():
    g, seam = composed_ext_pyramid()
    blocks = build_blocks(g, seam)
    kinds = [classify_basic(b.graph) for b in blocks]
    ds = [
        rank_decomposition_basic(b.graph, [b.marker], k)
        for b, k in zip(blocks, kinds)
    ]
    audit: list = []
    combined = combine_rank_decompositions(ds[0], ds[1], blocks, seam, g, audit=audit)
    w = decomposition_width(g, combined)
    assert w <= 3
    assert w == max(
        2,
        decomposition_width(blocks[0].graph, ds[0]),
        decomposition_width(blocks[1].graph, ds[1]),
    )
    assert audit[0]["bridge_width"] == 2
    assert audit[0]["preserved"]
    assert cut_rank(g, seam.x1) == 2


def test_combine_requires_marker_separation():
    g, seam = composed_ext_pyramid()
    blocks = build_blocks(g, seam)
    # A decomposition that does not separate the marker: plain caterpillar
    # in id order rarely separates it; craft one and expect the error.
    b0 = blocks[0]
    from evenhole.rankdec import _TreeBuilder

    tb = _TreeBuilder()
    tb.caterpillar([("vertex", v) for v in b0.graph.vertices()])
    bad = tb.freeze()
    good = rank_decomposition_basic(blocks[1].graph, [blocks[1].marker])
    if not is_separated(bad, b0.graph, b0.marker):
        with pytest.raises(DecompositionError):
            combine_rank_decompositions(bad, good, blocks, seam, g)


def test_full_pipeline_on_composed_instances():
    for builder in (composed_two_pyramids, composed_ext_pyramid, composed_three_pieces):
        g, _ = builder()
        audit: list = []
        d = rank_decomposition(g, audit_combines=audit)
        assert decomposition_width(g, d) <= 3
        for rec in audit:
            assert rec["bridge_width"] == 2 and rec["preserved"]


def test_tight_family_width_three():
    for k in (3, 4, 5):
        g = tight_chromatic_graph(k).graph
        d = rank_decomposition(g)
        assert decomposition_width(g, d) <= 3


def test_oracle_agreement_small():
    cases = [
        complete_graph(5),
        cycle_graph(6),
        cycle_graph(9),
        long_pyramid(2, 2, 2).graph,
        long_pyramid(3, 3, 3).graph,
        tight_chromatic_graph(3).graph,
    ]
    for g in cases:
        if g.n > 11:
            continue
        d = rank_decomposition(g)
        w = decomposition_width(g, d)
        exact = brute_rank_width(g)
        assert exact <= w <= 3
        assert exact <= 3


def test_normalize_strict_subcubic():
    g, _ = composed_ext_pyramid()
    d = rank_decomposition(g)
    nd = normalize(d)
    nd.validate(g)
    adj = nd.adjacency()
    for t in range(nd.n_nodes):
        assert len(adj[t]) in (1, 3)
    assert decomposition_width(g, nd) == decomposition_width(g, d)


def test_widths_cache_coherence():
    g, _ = composed_ext_pyramid()
    d = rank_decomposition(g)
    widths = d.per_edge_widths(g)
    parts = d.edge_partitions(g)
    for e, w in widths.items():
        assert w == cut_rank(g, parts[e])


def test_json_and_dot_exports():
    g = cycle_graph(5)
    d = rank_decomposition(g)
    doc = d.to_json()
    assert doc["nodes"] == d.n_nodes
    assert len(doc["leaf_map"]) == 5
    assert "graph rankdec" in d.to_dot()


def test_stuck_leaf_exact_decomposition():
    g = tight_chromatic_graph(3).graph
    tree = build_decomposition_tree(g)
    assert tree.stuck
    d = rank_decomposition(g, tree=tree)
    assert decomposition_width(g, d) <= 3
    assert brute_rank_width(g) <= 3
