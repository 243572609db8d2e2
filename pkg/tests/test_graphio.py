from __future__ import annotations

import random

import pytest

from evenhole.errors import GraphFormatError
from evenhole.generators import complete_graph, cycle_graph, tight_chromatic_graph
from evenhole.graph import Graph
from evenhole.graphio import (
    from_graph6,
    load_graph,
    parse_graph_text,
    save_graph,
    serialize_graph,
    to_graph6,
)
from tests.test_graph_core import random_graph


def test_roundtrip_identity():
    for g in (cycle_graph(5), complete_graph(4), tight_chromatic_graph(4).graph, Graph(3)):
        assert parse_graph_text(serialize_graph(g)) == g


def test_roundtrip_random():
    rng = random.Random(13)
    for _ in range(100):
        g = random_graph(rng, rng.randint(0, 12), 0.4)
        assert parse_graph_text(serialize_graph(g)) == g
        assert from_graph6(to_graph6(g)) == g


def test_parse_comments_and_errors():
    g = parse_graph_text("# name table elsewhere\n3 2\n0 1\n# mid comment\n1 2\n")
    assert g == Graph(3, [(0, 1), (1, 2)])
    for bad in (
        "",
        "3\n",
        "3 1\n",
        "3 1\n0 0\n",
        "3 1\n1 0\n",
        "3 1\n0 5\n",
        "3 2\n0 1\n0 1\n",
        "x y\n",
    ):
        with pytest.raises(GraphFormatError):
            parse_graph_text(bad)


def test_graph6_against_networkx():
    import networkx as nx

    rng = random.Random(99)
    for _ in range(60):
        g = random_graph(rng, rng.randint(1, 20), rng.choice([0.2, 0.5, 0.8]))
        mine = to_graph6(g)
        nxg = nx.from_graph6_bytes(mine.encode())
        assert set(nxg.edges()) == {tuple(e) for e in g.edges()}
        back = nx.to_graph6_bytes(nxg, header=False).decode().strip()
        assert from_graph6(back) == g


def test_graph6_long_form():
    g = cycle_graph(70)
    assert from_graph6(to_graph6(g)) == g


def test_graph6_header_prefix_and_errors():
    g = cycle_graph(5)
    assert from_graph6(">>graph6<<" + to_graph6(g)) == g
    with pytest.raises(GraphFormatError):
        from_graph6("")
    with pytest.raises(GraphFormatError):
        from_graph6("D")  # truncated body


def test_load_save_by_extension(tmp_path):
    g = tight_chromatic_graph(3).graph
    p1 = tmp_path / "g.edges"
    p2 = tmp_path / "g.g6"
    save_graph(p1, g)
    save_graph(p2, g)
    assert load_graph(p1) == g
    assert load_graph(p2) == g
    with pytest.raises(GraphFormatError):
        load_graph(tmp_path / "missing.edges")
