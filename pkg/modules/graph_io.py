# modules/graph_io.py

import json
import logging
from pathlib import Path

import networkx as nx

from modules.errors import Graph6DecodeError, GraphValidationError, LabError
from modules.graph_core import build, from_networkx, to_networkx

logger = logging.getLogger(__name__)

NAMED_GRAPHS_FILE = Path(__file__).resolve().parent.parent / "data" / "named_graphs.json"
GRAPH6_HEADER = b">>graph6<<"


def graph6_encode(g):
    """
    Encode a graph in graph6: size header, then the upper triangle in column-major order,
    six bits per byte offset by 63.

    Parameters:
    - g (Graph): Graph to encode.

    Returns:
    bytes: The graph6 string without header or newline.
    """
    return nx.to_graph6_bytes(to_networkx(g), nodes=range(g.n), header=False).rstrip(b"\n")


def _graph6_size(data):
    # Returns (n, header length).
    if not data:
        raise Graph6DecodeError("empty graph6 string", 0)
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) >= 2 and data[1] == 126:
        if len(data) < 8:
            raise Graph6DecodeError("truncated 8-byte size header", len(data))
        n = 0
        for c in data[2:8]:
            n = (n << 6) | (c - 63)
        return n, 8
    if len(data) < 4:
        raise Graph6DecodeError("truncated 4-byte size header", len(data))
    n = 0
    for c in data[1:4]:
        n = (n << 6) | (c - 63)
    return n, 4


def graph6_decode(s):
    """
    Decode a graph6 string, validating every byte before handing it to networkx.

    Parameters:
    - s (bytes | str): graph6 data, optionally with the >>graph6<< header and a trailing newline.

    Returns:
    Graph: The decoded graph.
    """
    data = s.encode("ascii") if isinstance(s, str) else bytes(s)
    data = data.rstrip(b"\n")
    base = 0
    if data.startswith(GRAPH6_HEADER):
        data = data[len(GRAPH6_HEADER):]
        base = len(GRAPH6_HEADER)
    for i, c in enumerate(data):
        if not 63 <= c <= 126:
            raise Graph6DecodeError(f"byte {c!r} outside 63..126", base + i)

    n, header = _graph6_size(data)
    expected = header + (n * (n - 1) // 2 + 5) // 6
    if len(data) != expected:
        raise Graph6DecodeError(
            f"expected {expected} bytes for n={n}, got {len(data)}", base + min(len(data), expected))
    return from_networkx(nx.from_graph6_bytes(data))


def format_edge_list(g):
    lines = [str(g.n)] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def parse_edge_list(text):
    """Parse "n" followed by one "u v" pair per line; blank lines and # comments are ignored."""
    rows = [line.split("#")[0].strip() for line in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows:
        raise GraphValidationError("empty edge list")
    try:
        n = int(rows[0])
        edges = [tuple(int(x) for x in r.split()) for r in rows[1:]]
    except ValueError as e:
        raise GraphValidationError(f"malformed edge list: {e}") from e
    if any(len(e) != 2 for e in edges):
        raise GraphValidationError("every edge line needs exactly two endpoints")
    return build(n, edges)


def to_dot(g, name="G"):
    lines = [f"graph {name} {{"]
    for v in range(g.n):
        if g.labels is not None:
            lines.append(f'  {v} [label="{g.labels[v]}"];')
        else:
            lines.append(f"  {v};")
    lines.extend(f"  {u} -- {v};" for u, v in g.edges())
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_named_graphs(file_name=NAMED_GRAPHS_FILE):
    """
    Load the shipped named graphs.

    Parameters:
    - file_name (str | Path): JSON file mapping a name to {"n": int, "edges": [[u, v], ...]}.

    Returns:
    dict[str, Graph]: Graphs keyed by name, in file order.
    """
    with open(file_name, "r") as file:
        raw = json.load(file)
    graphs = {}
    for name, entry in raw.items():
        if name.startswith("_"):
            continue
        graphs[name] = build(entry["n"], [tuple(e) for e in entry["edges"]])
    return graphs


def read_graph_file(path):
    path = Path(path)
    text = path.read_text()
    if path.suffix in (".g6", ".graph6"):
        return graph6_decode(text.strip().splitlines()[0])
    return parse_edge_list(text)


def resolve_graph(token):
    """
    Turn a CLI or claim token into a graph: a file path, a family token, or a raw graph6 string.

    Parameters:
    - token (str): e.g. "k5", "dyck:2,1,0", "graphs/h.g6" or "Bw".

    Returns:
    Graph: The graph.
    """
    # Family tokens need the generators, which import this module.
    from modules.family_gen import generate, parse_family_token

    if Path(token).is_file():
        return read_graph_file(token)
    try:
        return generate(parse_family_token(token)).graph
    except LabError as family_error:
        try:
            return graph6_decode(token)
        except Graph6DecodeError:
            raise family_error from None
