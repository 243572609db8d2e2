"""Service logic, callable in-process (CLI) or from the FastAPI routes."""

from __future__ import annotations

from ..coloring import audit_nice_order, SpecialLabels, clique_number, greedy_color, nice_order
from ..detect import classify_basic, find_clique_cutset, find_even_hole, find_star_cutset
from ..errors import OutOfClassError, OverBudgetError
from ..generators import (
    build_corpus,
    long_pyramid,
    tight_chromatic_graph,
    unbounded_cwd_graph,
)
from ..graph import Graph, is_connected
from ..oracle import DEFAULT_BUDGET, brute_even_hole, brute_rank_width, brute_star_cutset
from ..rankdec import decomposition_width, rank_decomposition
from ..twojoin import build_decomposition_tree
from .schemas import (
    CheckRequest,
    CheckResponse,
    ColorRequest,
    ColorResponse,
    CutsetPayload,
    GenerateRequest,
    GenerateResponse,
    GraphPayload,
    RankdecRequest,
    RankdecResponse,
)


def _cutset_payload(w) -> CutsetPayload | None:
    if w is None:
        return None
    return CutsetPayload(center=w.center, cutset=sorted(w.cutset))


def handle_check(req: CheckRequest) -> CheckResponse:
    g = req.graph.to_graph()
    connected = is_connected(g)
    hole = find_even_hole(g)
    star = find_star_cutset(g) if connected else None
    clique_cut = find_clique_cutset(g) if connected else None
    kind = classify_basic(g)
    oracle_checked = False
    if req.oracle:
        try:
            assert (brute_even_hole(g) is None) == (hole is None)
            if connected:
                assert (brute_star_cutset(g) is None) == (star is None)
            oracle_checked = True
        except OverBudgetError:
            oracle_checked = False
    if req.verify and hole is not None and not hole.validate(g):
        raise OutOfClassError("even-hole witness failed validation")
    if req.verify and star is not None and not star.validate(g):
        raise OutOfClassError("star-cutset witness failed validation")
    return CheckResponse(
        connected=connected,
        even_hole_free=hole is None,
        even_hole=list(hole.cycle) if hole else None,
        star_cutset=_cutset_payload(star),
        clique_cutset=_cutset_payload(clique_cut),
        basic_kind=kind.tag,
        in_class=connected and hole is None and star is None,
        oracle_checked=oracle_checked,
    )


def _require_in_class(g: Graph) -> None:
    if not is_connected(g):
        raise OutOfClassError("disconnected input")
    hole = find_even_hole(g)
    if hole is not None:
        raise OutOfClassError("even hole present", list(hole.cycle))
    star = find_star_cutset(g)
    if star is not None:
        raise OutOfClassError("star cutset present", sorted(star.cutset))


def handle_color(req: ColorRequest) -> ColorResponse:
    g = req.graph.to_graph()
    _require_in_class(g)
    order = nice_order(g, audit=req.verify)
    if req.verify:
        audit_nice_order(g, SpecialLabels.empty(), order)
    colors = greedy_color(g, order)
    used = max(colors, default=0)
    omega = clique_number(g)
    chi = None
    if req.oracle:
        try:
            from ..oracle import brute_chromatic

            chi = brute_chromatic(g)
        except OverBudgetError:
            chi = None
    return ColorResponse(
        order=order,
        colors=colors,
        colors_used=used,
        clique_number=omega,
        bound=omega + 1,
        within_bound=used <= omega + 1,
        chromatic_number=chi,
    )


def handle_rankdec(req: RankdecRequest) -> RankdecResponse:
    g = req.graph.to_graph()
    _require_in_class(g)
    d = rank_decomposition(g)
    widths = d.per_edge_widths(g)
    width = decomposition_width(g, d) if req.verify else max(widths.values(), default=0)
    exact = None
    if req.oracle:
        try:
            exact = brute_rank_width(g)
        except OverBudgetError:
            exact = None
    doc = d.to_json()
    return RankdecResponse(
        nodes=doc["nodes"],
        edges=[tuple(e) for e in doc["edges"]],
        leaf_map=doc["leaf_map"],
        per_edge_width=[(a, b, w) for (a, b), w in sorted(widths.items())],
        width=width,
        within_bound=width <= 3,
        exact_rank_width=exact,
    )


def handle_generate(req: GenerateRequest) -> GenerateResponse:
    family = req.family
    params = req.params
    if family == "tight_chromatic":
        named = tight_chromatic_graph(int(params["k"]))
        return GenerateResponse(
            graph=GraphPayload.from_graph(named.graph), names=named.names, family=family
        )
    if family == "unbounded_cwd":
        named = unbounded_cwd_graph(int(params["k"]))
        return GenerateResponse(
            graph=GraphPayload.from_graph(named.graph), names=named.names, family=family
        )
    if family == "long_pyramid":
        named = long_pyramid(int(params["l1"]), int(params["l2"]), int(params["l3"]))
        return GenerateResponse(
            graph=GraphPayload.from_graph(named.graph), names=named.names, family=family
        )
    if family == "composed":
        seed = req.seed if req.seed is not None else 0
        instances, _ = build_corpus(
            seed,
            1,
            min_n=int(params.get("min_n", 15)),
            max_n=int(params.get("max_n", 60)),
        )
        return GenerateResponse(
            graph=GraphPayload.from_graph(instances[0].graph), names=None, family=family
        )
    raise ValueError(
        f"unknown family {family!r}; expected tight_chromatic, unbounded_cwd, "
        "long_pyramid or composed"
    )


def handle_decomposition_tree(payload: GraphPayload) -> dict:
    g = payload.to_graph()
    _require_in_class(g)
    return build_decomposition_tree(g).to_json()
