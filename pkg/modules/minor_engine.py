# modules/minor_engine.py

"""
Minor containment with extractable models.

is_minor runs, in order: hint verification, trivial size filters, host reductions (components,
blocks, leaf stripping, degree-2 smoothing, planarity and 2-sum piece filters), the dense-clique
shortcut, a seeded chain-placement heuristic, a Kuratowski-subdivision shortcut for K5 and K3,3,
and finally an exact restricted-growth branch and bound under the node budget.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import networkx as nx
import numpy as np
from networkx.algorithms import isomorphism

from modules.config_loader import get_settings
from modules.embedder import is_planar
from modules.errors import InvariantViolation, PreconditionError
from modules.graph_core import build, components, induced, to_networkx
from modules.search_budget import ensure_budget

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinorModel:
    """branch[u] is the host vertex set modelling pattern vertex u."""

    branch: dict

    def __post_init__(self):
        object.__setattr__(self, 'branch', {u: frozenset(x) for u, x in self.branch.items()})

    def vertices(self):
        return frozenset().union(*self.branch.values()) if self.branch else frozenset()

    def as_dict(self):
        return {str(u): sorted(x) for u, x in sorted(self.branch.items())}


@dataclass(frozen=True)
class Expansion:
    vertices: frozenset
    edges: frozenset
    t: frozenset
    model: MinorModel

    def degree(self, v):
        return sum(1 for e in self.edges if v in e)

    def as_dict(self):
        return {"vertices": sorted(self.vertices), "edges": sorted(map(list, self.edges)),
                "t": sorted(self.t), "model": self.model.as_dict()}


class CliqueShortcut(NamedTuple):
    model: MinorModel | None
    edges: int
    threshold: int


def compose_models(first, second):
    """Model of A in C from a model of A in B and a model of B in C (branch maps or MinorModels)."""
    first = first.branch if isinstance(first, MinorModel) else first
    second = second.branch if isinstance(second, MinorModel) else second
    return {a: frozenset().union(*(second[b] for b in branch)) for a, branch in first.items()}


def _connected_in(g, vertices):
    vertices = set(vertices)
    if not vertices:
        return False
    start = next(iter(vertices))
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in g.adj[x]:
            if y in vertices and y not in seen:
                seen.add(y)
                queue.append(y)
    return seen == vertices


def _valid_model(h, g, branch):
    if set(branch) != set(range(h.n)):
        return False
    used = set()
    for u in range(h.n):
        x = branch[u]
        if not x or not all(0 <= v < g.n for v in x) or used & x or not _connected_in(g, x):
            return False
        used |= x
    for u, w in h.edges():
        if not any(g.adj[v] & branch[w] for v in branch[u]):
            return False
    return True


# ---------------------------------------------------------------- host reductions

def _is_complete(h):
    return h.num_edges == h.n * (h.n - 1) // 2


def _is_biconnected(h):
    return h.n >= 3 and nx.is_biconnected(to_networkx(h))


def _is_triconnected(h):
    return h.n >= 4 and nx.node_connectivity(to_networkx(h)) >= 3


def _strip_and_smooth(g, vmap, strip, smooth):
    """
    Delete vertices of degree <= 1 (strip) and suppress degree-2 vertices (smooth).

    Returns:
    tuple[Graph, list[int], list[tuple]]: Reduced graph, new-to-original map, and the smoothing
    chain (v, a, b) in original indices, in the order the vertices were suppressed.
    """
    adj = {vmap[v]: {vmap[u] for u in g.adj[v]} for v in range(g.n)}
    chain = []
    changed = True
    while changed:
        changed = False
        for v in sorted(adj):
            if v not in adj:
                continue
            if strip and len(adj[v]) <= 1:
                for u in adj.pop(v):
                    adj[u].discard(v)
                changed = True
            elif smooth and len(adj[v]) == 2:
                a, b = sorted(adj.pop(v))
                adj[a].discard(v)
                adj[b].discard(v)
                adj[a].add(b)
                adj[b].add(a)
                chain.append((v, a, b))
                changed = True
    kept = sorted(adj)
    index = {v: i for i, v in enumerate(kept)}
    reduced = build(len(kept), [(index[a], index[b]) for a in kept for b in adj[a] if a < b])
    return reduced, kept, chain


def _lift(branch, vmap, chain):
    lifted = {u: set(vmap[v] for v in x) for u, x in branch.items()}
    owner = {v: u for u, x in lifted.items() for v in x}
    for v, a, b in reversed(chain):
        target = owner.get(a, owner.get(b))
        if target is not None:
            lifted[target].add(v)
            owner[v] = target
    return {u: frozenset(x) for u, x in lifted.items()}


def _two_sum_pieces(g):
    """Pieces of a 2-connected graph split recursively along 2-cuts, each cut marked by a virtual edge."""
    pieces = []
    stack = [g]
    while stack:
        piece = stack.pop()
        cut = None
        if piece.n >= 4:
            for x, y in itertools.combinations(range(piece.n), 2):
                rest = set(range(piece.n)) - {x, y}
                if len(components(piece, rest)) > 1:
                    cut = (x, y)
                    break
        if cut is None:
            pieces.append(piece)
            continue
        x, y = cut
        for comp in components(piece, set(range(piece.n)) - {x, y}):
            sub, vmap = induced(piece, comp | {x, y})
            ix, iy = vmap.index(x), vmap.index(y)
            if not sub.has_edge(ix, iy):
                sub = build(sub.n, sub.edges() + [(ix, iy)])
            stack.append(sub)
    return pieces


def _piece_can_hold(h, piece, h_planar):
    if piece.n < h.n or piece.num_edges < h.num_edges:
        return False
    if not h_planar and is_planar(piece).planar:
        return False
    return True


def _candidate_hosts(h, g):
    """
    Reduced hosts that together contain every h-minor of g.

    Returns:
    list[tuple[Graph, list[int], list[tuple]]]: (host, map to g's indices, smoothing chain).
    """
    h_planar = is_planar(h).planar
    connected_pattern = h.n >= 1 and len(components(h)) == 1
    if _is_biconnected(h):
        nxg = to_networkx(g)
        regions = [set(b) for b in nx.biconnected_components(nxg)]
    elif connected_pattern:
        regions = [set(c) for c in components(g)]
    else:
        regions = [set(range(g.n))]
    min_deg = h.min_degree()
    out = []
    for region in sorted(regions, key=lambda r: (-len(r), min(r))):
        sub, vmap = induced(g, region)
        if min_deg >= 2:
            sub, vmap, chain = _strip_and_smooth(sub, vmap, True, min_deg >= 3)
        else:
            chain = []
        if sub.n < h.n or sub.num_edges < h.num_edges:
            continue
        if sub.max_degree() <= 2 and h.max_degree() > 2:
            continue
        if not h_planar and is_planar(sub).planar:
            continue
        if _is_triconnected(h) and _is_biconnected(sub):
            if not any(_piece_can_hold(h, p, h_planar) for p in _two_sum_pieces(sub)):
                continue
        out.append((sub, vmap, chain))
    return out


# ---------------------------------------------------------------- dense clique shortcut

def _minimal_dense(adj, branch, c):
    """Delete edges and contract while |E| > c|V| stays true."""
    def edge_count():
        return sum(len(s) for s in adj.values()) // 2

    changed = True
    while changed:
        changed = False
        e, n = edge_count(), len(adj)
        for u in sorted(adj):
            for v in sorted(adj[u]):
                if u < v and e - 1 > c * n:
                    adj[u].discard(v)
                    adj[v].discard(u)
                    e -= 1
                    changed = True
        for u in sorted(adj):
            if u not in adj:
                continue
            for v in sorted(adj[u]):
                common = len(adj[u] & adj[v])
                if e - 1 - common > c * (len(adj) - 1):
                    for w in adj.pop(v):
                        adj[w].discard(v)
                        if w != u:
                            adj[w].add(u)
                            adj[u].add(w)
                    branch[u] = branch[u] | branch.pop(v)
                    e = edge_count()
                    changed = True
                    break
            if changed:
                break


def _greedy_clique(adj, branch, k):
    if k <= 0:
        return []
    if k == 1:
        return [branch[min(adj)]] if adj else None
    if k == 2:
        for u in sorted(adj):
            if adj[u]:
                return [branch[u], branch[min(adj[u])]]
        return None
    adj = {u: set(s) for u, s in adj.items()}
    branch = dict(branch)
    _minimal_dense(adj, branch, 2 ** (k - 3))
    for v in sorted(adj, key=lambda x: (len(adj[x]), x)):
        nbrs = adj[v]
        sub = {u: adj[u] & nbrs for u in nbrs}
        found = _greedy_clique(sub, {u: branch[u] for u in nbrs}, k - 1)
        if found is not None:
            return [branch[v]] + found
    return None


def dense_clique_minor(g, k):
    """
    Density shortcut for clique minors: if |E| > 2^k |V|, greedily extract a K_k model from a
    minimal dense minor; otherwise return the density verdict.

    Parameters:
    - g (Graph): Host.
    - k (int): Clique order, at least 3.

    Returns:
    CliqueShortcut: model is None when the threshold is not met.
    """
    if k < 3:
        raise PreconditionError("clique order", f"k must be >= 3, got {k}")
    threshold = 2 ** k * g.n
    if g.num_edges <= threshold:
        return CliqueShortcut(None, g.num_edges, threshold)
    adj = {v: set(g.adj[v]) for v in range(g.n)}
    sets = _greedy_clique(adj, {v: frozenset([v]) for v in range(g.n)}, k)
    model = MinorModel(dict(enumerate(sets))) if sets else None
    if model is not None and not _valid_model(build(k, itertools.combinations(range(k), 2)), g, model.branch):
        logger.warning("greedy clique extraction produced an invalid model; discarding it")
        model = None
    return CliqueShortcut(model, g.num_edges, threshold)


# ---------------------------------------------------------------- heuristic

def heuristic_model(h, g, seed=None, rounds=8, restarts=3):
    """
    Chain placement: every pattern vertex gets a connected host chain routed to its placed
    neighbours by node-weighted Dijkstra, where vertices already used by other chains cost more
    each round. Deterministic for a fixed seed.

    Returns:
    MinorModel | None: A verified model, or None when the heuristic gives up (never a proof).
    """
    if h.n == 0:
        return MinorModel({})
    if h.n > g.n or g.n == 0:
        return None
    seed = get_settings().seed if seed is None else seed
    host = to_networkx(g)
    for restart in range(restarts):
        rng = np.random.default_rng([seed, restart])
        order = sorted(range(h.n), key=lambda u: (-h.degree(u), rng.random()))
        chains = {}
        for rnd in range(rounds):
            penalty = float(g.n) * (rnd + 1)
            noise = rng.random(g.n) * 1e-3
            for u in order:
                chains.pop(u, None)
                usage = np.zeros(g.n)
                for x in chains.values():
                    for v in x:
                        usage[v] += 1
                cost = 1.0 + penalty * usage + noise
                placed = [y for y in h.neighbors(u) if y in chains]
                if not placed:
                    chains[u] = {int(np.argmin(cost + rng.random(g.n) * 1e-6))}
                    continue
                routes = [nx.multi_source_dijkstra(host, chains[y], weight=lambda a, b, d: cost[b])
                          for y in placed]
                total = np.full(g.n, np.inf)
                for v in range(g.n):
                    if all(v in dist for dist, _ in routes):
                        total[v] = sum(dist[v] for dist, _ in routes) + cost[v]
                if not np.isfinite(total).any():
                    return None
                root = int(np.argmin(total))
                chain = {root}
                for (_, paths), y in zip(routes, placed):
                    chain |= {v for v in paths[root] if v not in chains[y]}
                chains[u] = chain
            if len(chains) == h.n and _valid_model(h, g, chains):
                logger.debug("heuristic found a model of %r in %r after %d rounds", h, g, rnd + 1)
                return MinorModel(chains)
    return None


# ---------------------------------------------------------------- Kuratowski shortcut

def _subdivision_model(h, sub_edges):
    """Model of h from a subdivision whose topological core is isomorphic to h, else None."""
    adj = {}
    for a, b in sub_edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    branch_vertices = {v for v, s in adj.items() if len(s) >= 3}
    if len(branch_vertices) != h.n or any(len(s) < 2 for s in adj.values()):
        return None
    owner = {v: v for v in branch_vertices}
    core = nx.Graph()
    core.add_nodes_from(branch_vertices)
    for a in sorted(branch_vertices):
        for first in sorted(adj[a]):
            prev, cur, path = a, first, []
            while cur not in branch_vertices:
                path.append(cur)
                prev, cur = cur, next(x for x in adj[cur] if x != prev)
            core.add_edge(a, cur)
            # Interior vertices join the end they were first reached from.
            for v in path:
                owner.setdefault(v, a)
    matcher = isomorphism.GraphMatcher(core, to_networkx(h))
    if not matcher.is_isomorphic():
        return None
    branch = {u: set() for u in range(h.n)}
    for v, b in owner.items():
        branch[matcher.mapping[b]].add(v)
    return branch


def _kuratowski_model(h, g):
    if not ((h.n == 5 and h.num_edges == 10) or (h.n == 6 and h.num_edges == 9 and h.degrees() == [3] * 6)):
        return None
    result = is_planar(g)
    if result.planar:
        return None
    branch = _subdivision_model(h, result.kuratowski_edges)
    if branch is not None and _valid_model(h, g, branch):
        return MinorModel(branch)
    return None


# ---------------------------------------------------------------- exact search

def _bfs_order(g):
    order, seen = [], set()
    for s in range(g.n):
        if s in seen:
            continue
        seen.add(s)
        queue = deque([s])
        while queue:
            x = queue.popleft()
            order.append(x)
            for y in sorted(g.adj[x]):
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    return order


class _PartitionSearch:
    """
    Restricted-growth labelling of host vertices with "unused" (-1) or a part index. A part may
    only be opened as the next index, so each vertex partition is visited once. Parts must stay
    connectable through undecided vertices; at a leaf the quotient graph must contain the
    pattern as a spanning subgraph.
    """

    UNDECIDED = -2

    def __init__(self, h, g, budget):
        self.h = h
        self.g = g
        self.budget = budget
        self.pattern = to_networkx(h)
        self.pattern_degrees = sorted(h.degrees(), reverse=True)
        self.order = _bfs_order(g)
        self.label = [self.UNDECIDED] * g.n
        self.parts = []

    def run(self):
        return self._branch(0)

    def _connectable(self, p):
        members = self.parts[p]
        if len(members) <= 1:
            return True
        start = members[0]
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in self.g.adj[x]:
                if y not in seen and self.label[y] in (p, self.UNDECIDED):
                    seen.add(y)
                    queue.append(y)
        return all(v in seen for v in members)

    def _feasible(self, pos):
        if len(self.parts) + (self.g.n - pos) < self.h.n:
            return False
        return all(self._connectable(p) for p in range(len(self.parts)))

    def _leaf(self):
        if len(self.parts) != self.h.n:
            return None
        quotient = nx.Graph()
        quotient.add_nodes_from(range(self.h.n))
        for p, members in enumerate(self.parts):
            for v in members:
                for y in self.g.adj[v]:
                    q = self.label[y]
                    if q >= 0 and q != p:
                        quotient.add_edge(p, q)
        if quotient.number_of_edges() < self.h.num_edges:
            return None
        degrees = sorted((d for _, d in quotient.degree()), reverse=True)
        if any(a < b for a, b in zip(degrees, self.pattern_degrees)):
            return None
        matcher = isomorphism.GraphMatcher(quotient, self.pattern)
        for mapping in matcher.subgraph_monomorphisms_iter():
            return {mapping[p]: frozenset(members) for p, members in enumerate(self.parts)}
        return None

    def _choices(self, v):
        near = [p for p in range(len(self.parts)) if any(self.label[y] == p for y in self.g.adj[v])]
        far = [p for p in range(len(self.parts)) if p not in near]
        out = near
        if len(self.parts) < self.h.n:
            out = out + [len(self.parts)]
        return out + far + [-1]

    def _branch(self, pos):
        self.budget.tick()
        if pos == self.g.n:
            return self._leaf()
        v = self.order[pos]
        for choice in self._choices(v):
            opened = choice == len(self.parts)
            if opened:
                self.parts.append([])
            if choice >= 0:
                self.parts[choice].append(v)
            self.label[v] = choice
            if self._feasible(pos + 1):
                found = self._branch(pos + 1)
                if found is not None:
                    return found
            self.label[v] = self.UNDECIDED
            if choice >= 0:
                self.parts[choice].pop()
            if opened:
                self.parts.pop()
        return None


def _exact_search(h, g, budget):
    return _PartitionSearch(h, g, budget).run()


# ---------------------------------------------------------------- public entry points

def is_minor(h, g, budget=None, hint=None, seed=None):
    """
    Exact minor test with a model on success.

    Parameters:
    - h (Graph): Pattern.
    - g (Graph): Host.
    - budget (SearchBudget | None): Node budget; exhausting it raises BudgetExhausted.
    - hint (dict | MinorModel | None): Candidate model; used only if it verifies.
    - seed (int | None): Heuristic seed; the configured seed when None.

    Returns:
    MinorModel | None: A valid model, or None when the search proves there is none.
    """
    budget = ensure_budget(budget)
    if hint is not None:
        branch = hint.branch if isinstance(hint, MinorModel) else hint
        branch = {u: frozenset(x) for u, x in branch.items()}
        if _valid_model(h, g, branch):
            logger.debug("hint verified for %r in %r", h, g)
            return MinorModel(branch)
        logger.info("hint for %r in %r failed verification; searching", h, g)
    if h.n == 0:
        return MinorModel({})
    if h.n > g.n or h.num_edges > g.num_edges:
        return None
    if _is_complete(h) and h.n >= 3:
        shortcut = dense_clique_minor(g, h.n)
        if shortcut.model is not None:
            return shortcut.model
    for host, vmap, chain in _candidate_hosts(h, g):
        budget.tick()
        found = heuristic_model(h, host, seed=seed)
        if found is None:
            found = _kuratowski_model(h, host)
        branch = found.branch if found is not None else _exact_search(h, host, budget)
        if branch is not None:
            lifted = _lift(branch, vmap, chain)
            if not _valid_model(h, g, lifted):
                raise InvariantViolation(f"lifted model of {h!r} in {g!r} failed verification")
            return MinorModel(lifted)
    return None


def _set_partitions(items, k):
    if k == 0:
        if not items:
            yield []
        return
    if len(items) < k:
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest, k - 1):
        yield [[first]] + partition
    for partition in _set_partitions(rest, k):
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]


def naive_is_minor(h, g):
    """Oracle: try every partition of every vertex subset into |V(h)| connected parts and every labelling."""
    if h.n == 0:
        return True
    if h.n > g.n:
        return False
    nxg = to_networkx(g)
    pattern_edges = h.edges()
    for size in range(h.n, g.n + 1):
        for used in itertools.combinations(range(g.n), size):
            for partition in _set_partitions(list(used), h.n):
                if not all(nx.is_connected(nxg.subgraph(part)) for part in partition):
                    continue
                touching = {(i, j) for i, a in enumerate(partition) for j, b in enumerate(partition)
                            if i != j and any(nxg.has_edge(x, y) for x in a for y in b)}
                for perm in itertools.permutations(range(h.n)):
                    if all((perm[u], perm[w]) in touching for u, w in pattern_edges):
                        return True
    return False


def _steiner_tree(g, members, terminals):
    """BFS tree of g[members] rooted at a terminal, with non-terminal leaves pruned repeatedly."""
    root = min(terminals) if terminals else min(members)
    parent = {root: None}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in sorted(g.adj[x]):
            if y in members and y not in parent:
                parent[y] = x
                queue.append(y)
    edges = {(min(v, p), max(v, p)) for v, p in parent.items() if p is not None}
    keep = set(parent)
    while True:
        deg = {v: 0 for v in keep}
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        spur = next((v for v in sorted(keep) if deg[v] <= 1 and v not in terminals), None)
        if spur is None or len(keep) == 1:
            return keep, edges
        keep.discard(spur)
        edges = {e for e in edges if spur not in e}


def minimize_host(g, model, h=None):
    """
    Prune a model to a minimal expansion: one host edge per pattern edge plus a pruned tree in
    every branch set. T holds the vertices whose degree is not two, and one representative for
    a branch set that would otherwise have none.

    Parameters:
    - g (Graph): Host.
    - model (MinorModel): A valid model.
    - h (Graph | None): Pattern; when None the pattern is read off the model's adjacencies.

    Returns:
    Expansion: Every vertex outside T has degree two in the expansion.
    """
    branch = model.branch if isinstance(model, MinorModel) else {u: frozenset(x) for u, x in model.items()}
    if h is None:
        pattern_edges = [(u, w) for u, w in itertools.combinations(sorted(branch), 2)
                         if any(g.adj[v] & branch[w] for v in branch[u])]
        h = build(len(branch), pattern_edges)
    if not _valid_model(h, g, branch):
        raise PreconditionError("model", "model is not a valid minor model in the host")
    cross = set()
    terminals = {u: set() for u in branch}
    for u, w in h.edges():
        a, b = min((a, b) for a in branch[u] for b in g.adj[a] & branch[w])
        cross.add((min(a, b), max(a, b)))
        terminals[u].add(a)
        terminals[w].add(b)
    vertices, edges, pruned = set(), set(cross), {}
    for u, members in branch.items():
        keep, tree = _steiner_tree(g, members, terminals[u])
        pruned[u] = frozenset(keep)
        vertices |= keep
        edges |= tree
    deg = {v: 0 for v in vertices}
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    t = {v for v in vertices if deg[v] != 2}
    for u, keep in pruned.items():
        if not keep & t:
            t.add(min(keep))
    if h.n > 1 and len(t) > h.n ** 2:
        raise InvariantViolation(f"|T| = {len(t)} exceeds |V(H)|^2 = {h.n ** 2}")
    return Expansion(frozenset(vertices), frozenset(edges), frozenset(t), MinorModel(pruned))
