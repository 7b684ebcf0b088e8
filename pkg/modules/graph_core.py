# modules/graph_core.py

"""
Immutable graph values and the elementary operations every other module builds on:
deletion, contraction, components, boundaried gluing and small-graph isomorphism.
Vertices are the indices 0..n-1.
"""

import logging
from dataclasses import dataclass, field

import networkx as nx
from networkx.algorithms import isomorphism

from modules.config_loader import get_settings
from modules.errors import GraphValidationError, IsomorphismRefused

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple
    labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise GraphValidationError(f"adjacency has {len(self.adj)} rows for n={self.n}")
        for v, nbrs in enumerate(self.adj):
            if v in nbrs:
                raise GraphValidationError(f"loop at vertex {v}")
            for u in nbrs:
                if not 0 <= u < self.n:
                    raise GraphValidationError(f"endpoint {u} out of range for n={self.n}")
                if v not in self.adj[u]:
                    raise GraphValidationError(f"asymmetric adjacency between {v} and {u}")
        if self.labels is not None:
            if len(self.labels) != self.n:
                raise GraphValidationError(f"{len(self.labels)} labels for n={self.n}")
            if len(set(self.labels)) != self.n:
                raise GraphValidationError("vertex labels are not unique")

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges})"

    @property
    def num_edges(self):
        return sum(len(nbrs) for nbrs in self.adj) // 2

    def edges(self):
        """Edges as (u, v) with u < v, sorted."""
        return [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]

    def degree(self, v):
        return len(self.adj[v])

    def degrees(self):
        return [len(nbrs) for nbrs in self.adj]

    def max_degree(self):
        return max(self.degrees(), default=0)

    def min_degree(self):
        return min(self.degrees(), default=0)

    def neighbors(self, v):
        return sorted(self.adj[v])

    def has_edge(self, u, v):
        return 0 <= u < self.n and v in self.adj[u]

    def label(self, v):
        return self.labels[v] if self.labels is not None else str(v)

    def index_of(self, label):
        if self.labels is None:
            raise KeyError(label)
        return self.labels.index(label)


@dataclass(frozen=True)
class BoundariedGraph:
    graph: Graph
    boundary: tuple = ()

    def __post_init__(self):
        boundary = tuple(self.boundary)
        object.__setattr__(self, 'boundary', boundary)
        if len(set(boundary)) != len(boundary):
            raise GraphValidationError(f"boundary {boundary} repeats a vertex")
        for v in boundary:
            if not 0 <= v < self.graph.n:
                raise GraphValidationError(f"boundary vertex {v} not in graph")


@dataclass(frozen=True)
class Separation:
    a: frozenset
    b: frozenset

    def __post_init__(self):
        object.__setattr__(self, 'a', frozenset(self.a))
        object.__setattr__(self, 'b', frozenset(self.b))

    @property
    def separator(self):
        return self.a & self.b

    @property
    def order(self):
        return len(self.a & self.b)

    def is_trivial(self):
        return not (self.a - self.b) or not (self.b - self.a)

    def check(self, g):
        """
        Validate the separation against a graph.

        Parameters:
        - g (Graph): The graph the separation claims to separate.

        Returns:
        list[str]: Problems found; empty when the separation is valid.
        """
        problems = []
        if self.a | self.b != frozenset(range(g.n)):
            problems.append("A ∪ B does not cover V(G)")
        only_a, only_b = self.a - self.b, self.b - self.a
        for u in only_a:
            crossing = g.adj[u] & only_b
            if crossing:
                problems.append(f"edge {u}-{min(crossing)} joins A∖B to B∖A")
        return problems

    def as_dict(self):
        return {"a": sorted(self.a), "b": sorted(self.b), "order": self.order}


def build(n, edges, labels=None):
    """
    Build a validated simple graph.

    Parameters:
    - n (int): Number of vertices.
    - edges (iterable[tuple[int, int]]): Vertex pairs; duplicates collapse.
    - labels (iterable[str] | None): Optional unique per-vertex tags.

    Returns:
    Graph: The graph.
    """
    if n < 0:
        raise GraphValidationError(f"negative vertex count {n}")
    adj = [set() for _ in range(n)]
    for e in edges:
        u, v = e
        if not (0 <= u < n and 0 <= v < n):
            raise GraphValidationError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise GraphValidationError(f"loop ({u}, {v})")
        adj[u].add(v)
        adj[v].add(u)
    return Graph(n, tuple(frozenset(s) for s in adj), tuple(labels) if labels is not None else None)


def empty_graph(n=0):
    return build(n, [])


def complete_graph(n):
    return build(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def complete_bipartite(m, n):
    return build(m + n, [(u, m + v) for u in range(m) for v in range(n)])


def cycle_graph(n):
    return build(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return build(n, [(i, i + 1) for i in range(n - 1)])


def from_adjacency(adj, labels=None):
    """Build a graph from a mapping or list of neighbour collections keyed 0..n-1."""
    n = len(adj)
    return build(n, [(u, v) for u in range(n) for v in adj[u] if u < v], labels)


def contract(g, e):
    """
    Contract edge e. The merged vertex keeps the smaller index; higher indices shift down by one.
    Labels are dropped.
    """
    u, v = e
    if not g.has_edge(u, v):
        raise GraphValidationError(f"({u}, {v}) is not an edge")
    keep, drop = min(u, v), max(u, v)

    def shift(w):
        return w if w < drop else w - 1

    edges = []
    for a, b in g.edges():
        a2 = keep if a == drop else a
        b2 = keep if b == drop else b
        if a2 != b2:
            edges.append((shift(a2), shift(b2)))
    return build(g.n - 1, edges)


def delete_vertices(g, vs):
    """Delete vertices; survivors keep their relative order and their labels."""
    gone = set(vs)
    kept = [v for v in range(g.n) if v not in gone]
    return induced(g, kept)[0]


def induced(g, vs):
    """
    Induced subgraph on vs.

    Returns:
    tuple[Graph, list[int]]: The subgraph and the map from new index to old index.
    """
    kept = sorted(set(vs))
    index = {v: i for i, v in enumerate(kept)}
    edges = [(index[u], index[w]) for u in kept for w in g.adj[u] if w in index and u < w]
    labels = [g.labels[v] for v in kept] if g.labels is not None else None
    return build(len(kept), edges, labels), kept


def delete_edges(g, es):
    gone = {frozenset(e) for e in es}
    return build(g.n, [e for e in g.edges() if frozenset(e) not in gone], g.labels)


def add_edges(g, es):
    return build(g.n, g.edges() + list(es), g.labels)


def components(g, within=None):
    """
    Connected components sorted by least vertex.

    Parameters:
    - g (Graph): The graph.
    - within (iterable[int] | None): Restrict to the subgraph induced on these vertices.

    Returns:
    list[frozenset[int]]: The components.
    """
    nxg = to_networkx(g)
    if within is not None:
        nxg = nxg.subgraph(within)
    return sorted((frozenset(c) for c in nx.connected_components(nxg)), key=min)


def is_connected(g, within=None):
    return len(components(g, within)) <= 1


def disjoint_union(*gs):
    edges = []
    labels = []
    offset = 0
    keep_labels = all(g.labels is not None for g in gs)
    for i, g in enumerate(gs):
        edges.extend((u + offset, v + offset) for u, v in g.edges())
        if keep_labels:
            labels.extend(f"{lab}#{i}" for lab in g.labels)
        offset += g.n
    return build(offset, edges, labels if keep_labels and gs else None)


def glue(g1, g2):
    """
    Glue two boundaried graphs along their boundaries.
    Vertices of g1 keep their indices; the non-boundary vertices of g2 follow in ascending order,
    and the i-th boundary vertex of g2 is identified with the i-th boundary vertex of g1.

    Parameters:
    - g1 (BoundariedGraph): First operand.
    - g2 (BoundariedGraph): Second operand, with a boundary of the same length.

    Returns:
    Graph: The glued graph.
    """
    if len(g1.boundary) != len(g2.boundary):
        raise GraphValidationError(
            f"incompatible boundaries of length {len(g1.boundary)} and {len(g2.boundary)}")
    index = dict(zip(g2.boundary, g1.boundary))
    nxt = g1.graph.n
    for v in range(g2.graph.n):
        if v not in index:
            index[v] = nxt
            nxt += 1
    edges = g1.graph.edges() + [(index[u], index[v]) for u, v in g2.graph.edges()]
    return build(nxt, edges)


def delta_wye(g, triangle):
    """Replace a triangle by a new vertex adjacent to its three corners."""
    a, b, c = triangle
    if not (g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c)):
        raise GraphValidationError(f"{triangle} is not a triangle")
    h = delete_edges(g, [(a, b), (b, c), (a, c)])
    return build(g.n + 1, h.edges() + [(g.n, a), (g.n, b), (g.n, c)])


def to_networkx(g):
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(g.edges())
    return nxg


def from_networkx(nxg):
    """Relabel nodes in sorted order and build a Graph."""
    nodes = sorted(nxg.nodes())
    index = {v: i for i, v in enumerate(nodes)}
    return build(len(nodes), [(index[u], index[v]) for u, v in nxg.edges() if u != v])


def _invariants(g):
    degs = g.degrees()
    nbr_degs = sorted(tuple(sorted(degs[u] for u in g.adj[v])) for v in range(g.n))
    return g.n, g.num_edges, sorted(degs), nbr_degs


def isomorphic(g1, g2, limit=None):
    """
    Decide whether two graphs are isomorphic.

    Cheap invariants settle most negative cases for graphs of any size; otherwise the
    backtracking check only runs up to `limit` vertices and refuses beyond it.

    Parameters:
    - g1 (Graph), g2 (Graph): The graphs.
    - limit (int | None): Vertex bound; the configured iso_limit when None.

    Returns:
    bool: True iff an edge-preserving bijection exists.
    """
    if _invariants(g1) != _invariants(g2):
        return False
    limit = get_settings().iso_limit if limit is None else limit
    if g1.n > limit:
        raise IsomorphismRefused(f"isomorphism check on {g1.n} vertices exceeds limit {limit}",
                                 {"nodes": 0, "refusals": 1})
    return isomorphism.GraphMatcher(to_networkx(g1), to_networkx(g2)).is_isomorphic()


def same_graph(g1, g2):
    """Equality as labelled graphs (same vertex indices, same edges)."""
    return g1.n == g2.n and g1.adj == g2.adj


def _one_edge_more(nxg, connected):
    n = nxg.number_of_nodes()
    grown = [(u, v) for u in range(n) for v in range(u + 1, n) if not nxg.has_edge(u, v)]
    grown += [(u, n) for u in range(n)]
    if not connected:
        grown.append((n, n + 1))
    for u, v in grown:
        child = nxg.copy()
        child.add_edge(u, v)
        yield child


def small_graphs(max_edges, connected=True):
    """
    Every graph with 1..max_edges edges and no isolated vertex, one per isomorphism class,
    in order of edge count.

    Each class with m edges arises from a class with m-1 edges by adding one edge between old
    vertices, from an old vertex to a new one, or (when connected is False) between two new
    ones. Children are deduplicated by Weisfeiler-Lehman hash, then by exact isomorphism.

    Parameters:
    - max_edges (int): Largest edge count.
    - connected (bool): Only connected graphs.

    Returns:
    Iterator[Graph]: The graphs.
    """
    level = [nx.Graph([(0, 1)])] if max_edges >= 1 else []
    for m in range(1, max_edges + 1):
        for nxg in level:
            yield from_networkx(nxg)
        if m == max_edges:
            break
        buckets, grown = {}, []
        for nxg in level:
            for child in _one_edge_more(nxg, connected):
                bucket = buckets.setdefault(nx.weisfeiler_lehman_graph_hash(child), [])
                if not any(nx.is_isomorphic(child, other) for other in bucket):
                    bucket.append(child)
                    grown.append(child)
        logger.debug("%d classes with %d edges", len(grown), m + 1)
        level = grown
