"""Graph file formats: whitespace edge lists and graph6.

Edge list format: a header line "n m", then m lines "u v" with
0 <= u < v < n; '#' starts a comment line. Serialization canonicalizes
edge order (sorted pairs), and parsing is strict: duplicate edges, loops,
bad counts and out-of-range ids are errors.
"""

from __future__ import annotations

from pathlib import Path

from .errors import GraphFormatError
from .graph import Graph

GRAPH6_EXTENSIONS = (".g6", ".graph6")


def parse_graph_text(text: str) -> Graph:
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise GraphFormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError(f"malformed header {lines[0]!r}; expected 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphFormatError(f"malformed header {lines[0]!r}") from exc
    if n < 0 or m < 0:
        raise GraphFormatError("negative counts in header")
    if len(lines) - 1 != m:
        raise GraphFormatError(f"header promises {m} edges, found {len(lines) - 1}")
    edges = []
    seen = set()
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"malformed edge line {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphFormatError(f"malformed edge line {ln!r}") from exc
        if not (0 <= u < v < n):
            raise GraphFormatError(f"edge ({u},{v}) violates 0 <= u < v < n={n}")
        if (u, v) in seen:
            raise GraphFormatError(f"duplicate edge ({u},{v})")
        seen.add((u, v))
        edges.append((u, v))
    return Graph(n, edges)


def serialize_graph(g: Graph) -> str:
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"]
    lines += [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


def _g6_number(n: int) -> bytes:
    if n < 0:
        raise GraphFormatError("negative vertex count")
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes(
            [126, ((n >> 12) & 63) + 63, ((n >> 6) & 63) + 63, (n & 63) + 63]
        )
    raise GraphFormatError("graph6 vertex count over 258047 not supported")


def to_graph6(g: Graph) -> str:
    """Encode in graph6: upper triangle bits x(0,1), x(0,2), x(1,2), ..."""
    bits_list = []
    for v in range(1, g.n):
        for u in range(v):
            bits_list.append(1 if g.has_edge(u, v) else 0)
    while len(bits_list) % 6:
        bits_list.append(0)
    out = bytearray(_g6_number(g.n))
    for i in range(0, len(bits_list), 6):
        val = 0
        for b in bits_list[i : i + 6]:
            val = (val << 1) | b
        out.append(val + 63)
    return out.decode("ascii")


def from_graph6(text: str) -> Graph:
    data = text.strip()
    if data.startswith(">>graph6<<"):
        data = data[len(">>graph6<<") :]
    if not data:
        raise GraphFormatError("empty graph6 string")
    raw = data.encode("ascii")
    if raw[0] == 126:
        if len(raw) < 4:
            raise GraphFormatError("truncated graph6 long form")
        n = ((raw[1] - 63) << 12) | ((raw[2] - 63) << 6) | (raw[3] - 63)
        body = raw[4:]
    else:
        n = raw[0] - 63
        body = raw[1:]
    if n < 0:
        raise GraphFormatError("bad graph6 size byte")
    need = (n * (n - 1) // 2 + 5) // 6
    if len(body) != need:
        raise GraphFormatError(
            f"graph6 body has {len(body)} bytes, expected {need} for n={n}"
        )
    bit_stream = []
    for byte in body:
        if not (63 <= byte <= 126):
            raise GraphFormatError("graph6 byte out of range")
        val = byte - 63
        bit_stream += [(val >> k) & 1 for k in range(5, -1, -1)]
    edges = []
    idx = 0
    for v in range(1, n):
        for u in range(v):
            if bit_stream[idx]:
                edges.append((u, v))
            idx += 1
    return Graph(n, edges)


def load_graph(path) -> Graph:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise GraphFormatError(f"cannot read {p}: {exc}") from exc
    if p.suffix.lower() in GRAPH6_EXTENSIONS:
        return from_graph6(text)
    return parse_graph_text(text)


def save_graph(path, g: Graph) -> None:
    p = Path(path)
    if p.suffix.lower() in GRAPH6_EXTENSIONS:
        p.write_text(to_graph6(g) + "\n")
    else:
        p.write_text(serialize_graph(g))
