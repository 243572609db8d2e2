"""Pydantic request/response models for the service and the CLI client."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..graph import Graph


class GraphPayload(BaseModel):
    n: int = Field(ge=0)
    edges: list[tuple[int, int]] = Field(default_factory=list)

    @classmethod
    def from_graph(cls, g: Graph) -> "GraphPayload":
        return cls(n=g.n, edges=g.edges())

    def to_graph(self) -> Graph:
        return Graph(self.n, self.edges)


class CutsetPayload(BaseModel):
    center: int
    cutset: list[int]


class CheckRequest(BaseModel):
    graph: GraphPayload
    oracle: bool = False
    verify: bool = False


class CheckResponse(BaseModel):
    connected: bool
    even_hole_free: bool
    even_hole: list[int] | None = None
    star_cutset: CutsetPayload | None = None
    clique_cutset: CutsetPayload | None = None
    basic_kind: str
    in_class: bool
    oracle_checked: bool = False


class ColorRequest(BaseModel):
    graph: GraphPayload
    verify: bool = True
    oracle: bool = False


class ColorResponse(BaseModel):
    order: list[int]
    colors: list[int]
    colors_used: int
    clique_number: int
    bound: int
    within_bound: bool
    chromatic_number: int | None = None  # only when oracle requested and affordable


class RankdecRequest(BaseModel):
    graph: GraphPayload
    verify: bool = True
    oracle: bool = False


class RankdecResponse(BaseModel):
    nodes: int
    edges: list[tuple[int, int]]
    leaf_map: dict[str, int]
    per_edge_width: list[tuple[int, int, int]]
    width: int
    within_bound: bool
    exact_rank_width: int | None = None  # only when oracle requested and affordable


class GenerateRequest(BaseModel):
    family: str
    params: dict = Field(default_factory=dict)
    seed: int | None = None


class GenerateResponse(BaseModel):
    graph: GraphPayload
    names: dict[str, int] | None = None
    family: str


class ErrorDetail(BaseModel):
    error: str
    reason: str | None = None
