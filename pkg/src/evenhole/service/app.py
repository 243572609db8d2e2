"""FastAPI surface over the structural toolkit."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import EvenholeError, OutOfClassError
from ..graph import GraphError
from . import handlers
from .schemas import (
    CheckRequest,
    CheckResponse,
    ColorRequest,
    ColorResponse,
    GenerateRequest,
    GenerateResponse,
    GraphPayload,
    RankdecRequest,
    RankdecResponse,
)

app = FastAPI(
    title="evenhole",
    description=(
        "Structural checks, omega+1 coloring and width-3 rank decompositions "
        "for even-hole-free graphs without star cutsets"
    ),
    version="0.1.0",
)


def _guard(fn, *args):
    try:
        return fn(*args)
    except OutOfClassError as exc:
        raise HTTPException(
            status_code=409, detail={"error": "out_of_class", "reason": str(exc)}
        ) from exc
    except (GraphError, ValueError) as exc:
        raise HTTPException(
            status_code=400, detail={"error": "bad_request", "reason": str(exc)}
        ) from exc
    except EvenholeError as exc:
        raise HTTPException(
            status_code=422, detail={"error": type(exc).__name__, "reason": str(exc)}
        ) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/check", response_model=CheckResponse)
def check(req: CheckRequest) -> CheckResponse:
    return _guard(handlers.handle_check, req)


@app.post("/color", response_model=ColorResponse)
def color(req: ColorRequest) -> ColorResponse:
    return _guard(handlers.handle_color, req)


@app.post("/rankdec", response_model=RankdecResponse)
def rankdec(req: RankdecRequest) -> RankdecResponse:
    return _guard(handlers.handle_rankdec, req)


@app.post("/generate", response_model=GenerateResponse)
def generate(req: GenerateRequest) -> GenerateResponse:
    return _guard(handlers.handle_generate, req)


@app.post("/decomposition")
def decomposition(payload: GraphPayload) -> dict:
    return _guard(handlers.handle_decomposition_tree, payload)
