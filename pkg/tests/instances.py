"""Canonical in-class instances shared across test modules."""

from __future__ import annotations

from evenhole.generators import (
    ComposeRecipe,
    compose_two_join,
    extended_basic_from_tree,
    long_pyramid,
)
from evenhole.graph import flat_subpaths

# Two branch vertices joined by a 3-subdivided spine; one direct leaf and one
# subdivided leg each. Leaf sides follow depth parity.
EXT_TREE = [(0, 1), (1, 2), (2, 10), (10, 3), (0, 4), (0, 5), (5, 6), (3, 7), (3, 8), (8, 9)]
EXT_ASSIGN = {(0, 4): "y", (5, 6): "x", (3, 7): "y", (8, 9): "x"}


def extended_component():
    return extended_basic_from_tree(EXT_TREE, EXT_ASSIGN)


def composed_two_pyramids():
    """18-vertex composition of two pyramids; happens to be basic itself."""
    p1 = long_pyramid(5, 3, 3)
    p2 = long_pyramid(6, 4, 4)
    return compose_two_join(
        ComposeRecipe(p1.graph, (4, 5, 6, 7), p2.graph, (4, 5, 6, 7, 8))
    )


def composed_ext_pyramid():
    """18-vertex non-basic composition: extended basic joined to a pyramid."""
    ext = extended_component()
    p = long_pyramid(6, 4, 4)
    q3 = flat_subpaths(ext.graph, 3)[0]
    return compose_two_join(ComposeRecipe(ext.graph, q3, p.graph, (4, 5, 6, 7, 8)))


def composed_three_pieces():
    """Deeper instance: the extended/pyramid composite joined to another pyramid."""
    g, _ = composed_ext_pyramid()
    p = long_pyramid(5, 3, 3)
    donors = [q for q in flat_subpaths(g, 4)]
    return compose_two_join(ComposeRecipe(p.graph, (4, 5, 6, 7), g, donors[0]))
