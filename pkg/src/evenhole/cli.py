"""Thin command-line client over the service handlers.

Verbs mirror the service endpoints; by default the handlers run in-process,
and --server routes the same request/response models through a remote
instance instead. Machine-readable JSON goes to stdout, human summaries to
stderr. Exit codes: 0 in-class / success, 2 out-of-class, 1 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .errors import EvenholeError, OutOfClassError
from .graph import GraphError
from .graphio import load_graph, save_graph
from .service import handlers
from .service.schemas import (
    CheckRequest,
    ColorRequest,
    GenerateRequest,
    GraphPayload,
    RankdecRequest,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_OUT_OF_CLASS = 2


def _emit(doc: dict, summary: str) -> None:
    print(json.dumps(doc, indent=1, sort_keys=True))
    print(summary, file=sys.stderr)


def _remote(server: str, endpoint: str, payload: dict) -> dict:
    import httpx

    resp = httpx.post(f"{server.rstrip('/')}/{endpoint}", json=payload, timeout=600.0)
    if resp.status_code == 409:
        raise OutOfClassError(json.dumps(resp.json().get("detail", {})))
    resp.raise_for_status()
    return resp.json()


def _check_doc(path: str, oracle: bool, verify: bool, server: str | None) -> dict:
    g = load_graph(path)
    req = CheckRequest(graph=GraphPayload.from_graph(g), oracle=oracle, verify=verify)
    if server:
        return _remote(server, "check", req.model_dump())
    return handlers.handle_check(req).model_dump()


def cmd_check(args) -> int:
    doc = _check_doc(args.path, args.oracle, args.verify, args.server)
    code = EXIT_OK if doc["in_class"] else EXIT_OUT_OF_CLASS
    _emit(
        doc,
        f"{args.path}: even_hole_free={doc['even_hole_free']} "
        f"star_cutset={'yes' if doc['star_cutset'] else 'no'} "
        f"basic={doc['basic_kind']} -> {'in class' if doc['in_class'] else 'OUT of class'}",
    )
    return code


def cmd_color(args) -> int:
    g = load_graph(args.path)
    req = ColorRequest(
        graph=GraphPayload.from_graph(g), verify=args.verify, oracle=args.oracle
    )
    if args.server:
        doc = _remote(args.server, "color", req.model_dump())
    else:
        doc = handlers.handle_color(req).model_dump()
    _emit(
        doc,
        f"{args.path}: colors_used={doc['colors_used']} omega={doc['clique_number']} "
        f"bound=omega+1={doc['bound']}",
    )
    return EXIT_OK if doc["within_bound"] else EXIT_ERROR


def cmd_rankdec(args) -> int:
    g = load_graph(args.path)
    req = RankdecRequest(
        graph=GraphPayload.from_graph(g), verify=args.verify, oracle=args.oracle
    )
    if args.server:
        doc = _remote(args.server, "rankdec", req.model_dump())
    else:
        doc = handlers.handle_rankdec(req).model_dump()
    _emit(doc, f"{args.path}: rank-decomposition width={doc['width']} (bound 3)")
    return EXIT_OK if doc["within_bound"] else EXIT_ERROR


def cmd_generate(args) -> int:
    params: dict = {}
    for kv in args.param or []:
        key, _, val = kv.partition("=")
        params[key] = val
    req = GenerateRequest(family=args.family, params=params, seed=args.seed)
    if args.server:
        doc = _remote(args.server, "generate", req.model_dump())
    else:
        doc = handlers.handle_generate(req).model_dump()
    payload = GraphPayload(**doc["graph"])
    g = payload.to_graph()
    if args.out:
        save_graph(args.out, g)
        if doc.get("names"):
            names_path = args.out + ".names.json"
            with open(names_path, "w") as fh:
                json.dump(doc["names"], fh, indent=1, sort_keys=True)
        print(args.out)
        print(f"wrote {args.family} graph n={g.n} to {args.out}", file=sys.stderr)
    else:
        _emit(doc, f"{args.family}: n={g.n} m={g.num_edges()}")
    return EXIT_OK


def cmd_corpus(args) -> int:
    from .generators import build_corpus, write_corpus

    instances, quarantine = build_corpus(args.seed, args.count)
    write_corpus(instances, args.out)
    doc = {
        "count": len(instances),
        "quarantined": len(quarantine),
        "directory": args.out,
        "sizes": sorted(i.graph.n for i in instances),
    }
    _emit(doc, f"corpus: {len(instances)} instances in {args.out}")
    return EXIT_OK


def _batch_one(item) -> tuple[str, dict | None, str | None]:
    path, oracle, verify = item
    try:
        return path, _check_doc(path, oracle, verify, None), None
    except EvenholeError as exc:
        return path, None, str(exc)


def cmd_batch(args) -> int:
    items = [(p, args.oracle, args.verify) for p in args.paths]
    worst = EXIT_OK
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        for path, doc, err in pool.map(_batch_one, items):
            if err is not None:
                print(json.dumps({"path": path, "error": err}))
                worst = max(worst, EXIT_ERROR)
            else:
                print(json.dumps({"path": path, **doc}, sort_keys=True))
                if not doc["in_class"]:
                    worst = max(worst, EXIT_OUT_OF_CLASS)
    return worst


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="evenhole",
        description="Even-hole-free / star-cutset-free graph toolkit",
    )
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(p, with_path=True):
        if with_path:
            p.add_argument("path", help="edge-list file, or graph6 with .g6 extension")
        p.add_argument("--oracle", action="store_true", help="cross-check with exact oracles")
        p.add_argument("--verify", action="store_true", help="run all debug assertions")
        p.add_argument("--server", help="route through a running service instead")

    p = sub.add_parser("check", help="class membership and basic-kind report")
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("color", help="nice elimination order and omega+1 coloring")
    common(p)
    p.set_defaults(fn=cmd_color)

    p = sub.add_parser("rankdec", help="width-3 rank decomposition")
    common(p)
    p.set_defaults(fn=cmd_rankdec)

    p = sub.add_parser("generate", help="emit a named family graph")
    p.add_argument("family", choices=["tight_chromatic", "unbounded_cwd", "long_pyramid", "composed"])
    p.add_argument("--param", action="append", help="key=value, e.g. k=5")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="write edge list (+ .names.json) instead of stdout")
    p.add_argument("--server", help="route through a running service instead")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("corpus", help="seeded composed-instance corpus directory")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_corpus)

    p = sub.add_parser("batch", help="check many files with a worker pool")
    p.add_argument("paths", nargs="+")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(fn=cmd_batch)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8710)
    p.set_defaults(fn=cmd_serve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except OutOfClassError as exc:
        print(json.dumps({"error": "out_of_class", "reason": str(exc)}))
        print(f"out of class: {exc}", file=sys.stderr)
        return EXIT_OUT_OF_CLASS
    except (GraphError, EvenholeError, OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "reason": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
