# modules/embedder.py

"""
Surface embeddings as signed rotation systems.

Darts: edge i of g.edges() = (u, v) gives dart 2i (u -> v) and dart 2i+1 (v -> u), so the
reverse of a dart is d ^ 1. A face-tracing state is (dart, eps) with eps = ±1, packed as
2*dart + (eps < 0). Every face is traced as two orbits of states, one per direction.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import networkx as nx

from modules.config_loader import get_settings
from modules.errors import EmbeddingRefused, GraphValidationError, SearchRefused
from modules.graph_core import build, components, induced, to_networkx
from modules.graph_io import graph6_decode, graph6_encode
from modules.search_budget import SearchBudget
from modules.surface_alg import EMPTY, surface_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Embedding:
    """
    rotation[v] is the cyclic order of v's neighbours; `negative` holds the edges (u < v)
    with sign -1, every other edge has sign +1.
    """

    rotation: tuple
    negative: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, 'rotation', tuple(tuple(r) for r in self.rotation))
        object.__setattr__(self, 'negative', frozenset((min(e), max(e)) for e in self.negative))

    def sign(self, u, v):
        return -1 if (min(u, v), max(u, v)) in self.negative else 1

    @property
    def signs(self):
        return {(u, v): self.sign(u, v) for u, r in enumerate(self.rotation) for v in r if u < v}

    def as_dict(self):
        return {"rotation": [list(r) for r in self.rotation], "negative_edges": sorted(map(list, self.negative))}


class PlanarityResult(NamedTuple):
    planar: bool
    embedding: Embedding | None
    kuratowski_edges: list | None


@dataclass(frozen=True)
class GenusResult:
    eg: int
    orientable_genus: int
    nonorientable_genus: int
    witness: Embedding

    def as_dict(self):
        return {"eg": self.eg, "orientable_genus": self.orientable_genus,
                "nonorientable_genus": self.nonorientable_genus, "witness": self.witness.as_dict()}


# ---------------------------------------------------------------- face tracing

def _dart_tables(g, emb):
    edges = g.edges()
    dart_of = {}
    for i, (u, v) in enumerate(edges):
        dart_of[(u, v)] = 2 * i
        dart_of[(v, u)] = 2 * i + 1
    succ = [0] * (2 * len(edges))
    pred = [0] * (2 * len(edges))
    for x, rot in enumerate(emb.rotation):
        for j, y in enumerate(rot):
            d = dart_of[(x, y)]
            d2 = dart_of[(x, rot[(j + 1) % len(rot)])]
            succ[d] = d2
            pred[d2] = d
    lam = [-1 if e in emb.negative else 1 for e in edges]
    return edges, succ, pred, lam


def _orbits(m, succ, pred, lam):
    # Returns one state list per face; the opposite orbit of each face is skipped.
    orbit_of = [-1] * (4 * m)
    orbits = []
    for s0 in range(4 * m):
        if orbit_of[s0] >= 0:
            continue
        states = []
        s = s0
        while orbit_of[s] < 0:
            orbit_of[s] = len(orbits)
            states.append(s)
            d, eps = s >> 1, (-1 if s & 1 else 1)
            eps2 = eps * lam[d >> 1]
            r = d ^ 1
            d2 = succ[r] if eps2 == 1 else pred[r]
            s = 2 * d2 + (eps2 < 0)
        orbits.append(states)

    def reverse(s):
        d, eps = s >> 1, (-1 if s & 1 else 1)
        return 2 * (d ^ 1) + ((-eps * lam[d >> 1]) < 0)

    faces = []
    for i, states in enumerate(orbits):
        j = orbit_of[reverse(states[0])]
        if j == i:
            raise GraphValidationError("face orbit is its own reverse; rotation system is inconsistent")
        if i < j:
            faces.append(states)
    return faces


def _check_rotation(g, emb):
    if len(emb.rotation) != g.n:
        raise GraphValidationError(f"rotation has {len(emb.rotation)} entries for {g.n} vertices")
    for v, rot in enumerate(emb.rotation):
        if len(rot) != len(set(rot)) or set(rot) != g.adj[v]:
            raise GraphValidationError(f"malformed rotation at vertex {v}")
    for u, v in emb.negative:
        if not g.has_edge(u, v):
            raise GraphValidationError(f"signed pair ({u}, {v}) is not an edge")


def trace_faces(g, emb):
    """
    Facial walks of a signed rotation system.

    Returns:
    list[list[tuple[int, int]]]: One walk per face, as the traversed (tail, head) pairs.
    """
    _check_rotation(g, emb)
    edges, succ, pred, lam = _dart_tables(g, emb)

    def dart_pair(d):
        u, v = edges[d >> 1]
        return (u, v) if d % 2 == 0 else (v, u)

    return [[dart_pair(s >> 1) for s in states] for states in _orbits(len(edges), succ, pred, lam)]


def _balanced(n, edges, sign_of):
    # True iff signs are switching-equivalent to all +1 (parity walk per component).
    side = [0] * n
    adj = [[] for _ in range(n)]
    for i, (u, v) in enumerate(edges):
        adj[u].append((v, sign_of(i)))
        adj[v].append((u, sign_of(i)))
    for s in range(n):
        if side[s]:
            continue
        side[s] = 1
        stack = [s]
        while stack:
            x = stack.pop()
            for y, lam in adj[x]:
                want = side[x] * lam
                if not side[y]:
                    side[y] = want
                    stack.append(y)
                elif side[y] != want:
                    return False
    return True


def _euler_genus_of(g, faces, edges):
    # Sum of 2 - V + E - F over components; edgeless components contribute 0.
    comp_of = {}
    for i, comp in enumerate(components(g)):
        for v in comp:
            comp_of[v] = i
    stats = {}
    for comp in set(comp_of.values()):
        stats[comp] = [0, 0, 0]
    for v in range(g.n):
        stats[comp_of[v]][0] += 1
    for u, _ in edges:
        stats[comp_of[u]][1] += 1
    for states in faces:
        u, _ = edges[(states[0] >> 1) >> 1]
        stats[comp_of[u]][2] += 1
    return sum(2 - nv + ne - nf for nv, ne, nf in stats.values() if ne)


def verify_embedding(g, emb):
    """
    Trace the faces of a signed rotation system and name the surface it lives in.

    Parameters:
    - g (Graph): The graph.
    - emb (Embedding): A rotation system and signs for g.

    Returns:
    Surface: The surface of Euler genus sum(2 - V + E - F) over components.
    """
    if g.n == 0:
        return EMPTY
    _check_rotation(g, emb)
    edges, succ, pred, lam = _dart_tables(g, emb)
    faces = _orbits(len(edges), succ, pred, lam)
    eg = _euler_genus_of(g, faces, edges)
    orientable = _balanced(g.n, edges, lambda i: lam[i])
    return surface_of(eg, orientable)


# ---------------------------------------------------------------- planarity

def is_planar(g):
    """
    Planarity test with evidence.

    Returns:
    PlanarityResult: (True, planar Embedding, None) or (False, None, edges of a
    K5 or K3,3 subdivision).
    """
    nxg = to_networkx(g)
    planar, cert = nx.check_planarity(nxg, counterexample=True)
    if planar:
        rotation = [list(cert.neighbors_cw_order(v)) for v in range(g.n)]
        return PlanarityResult(True, Embedding(rotation), None)
    kuratowski = sorted((min(u, v), max(u, v)) for u, v in cert.edges())
    return PlanarityResult(False, None, kuratowski)


def apex_graph(g, x):
    return build(g.n + 1, g.edges() + [(g.n, v) for v in sorted(set(x))])


def disk_embeddable(g, x):
    """Embeddable in a disk with x on the boundary, decided as planarity of g plus an apex on x."""
    x = set(x)
    if not x <= set(range(g.n)):
        raise GraphValidationError(f"{sorted(x - set(range(g.n)))} are not vertices")
    return is_planar(apex_graph(g, x)).planar


# ---------------------------------------------------------------- exact search

def _girth(g):
    return nx.girth(to_networkx(g))


class _RotationSearch:
    """
    Branch and bound over signed rotation systems of one connected graph, building one face at a time.

    Rotation links succ/pred are created lazily when a face walk leaves a vertex, and a link may
    close a cycle only once it covers all darts of the vertex. Signs of spanning-tree edges are
    fixed at +1; the others are branched on first traversal (+1 first). Faces have length at least
    `min_face`, which bounds the number of faces still reachable.

    Parameters:
    - g (Graph): Connected graph with at least one edge.
    - mode (str): "orientable", "nonorientable" or "any".
    - target (int): Euler genus to reach.
    - budget (SearchBudget): Node counter.
    """

    def __init__(self, g, mode, target, budget):
        self.g = g
        self.mode = mode
        self.target = target
        self.budget = budget
        edges = g.edges()
        degs = g.degrees()
        order = sorted(range(len(edges)), key=lambda i: (-(degs[edges[i][0]] + degs[edges[i][1]]), edges[i]))
        self.edges = [edges[i] for i in order]
        m = self.m = len(self.edges)
        self.n = g.n
        self.tail = [0] * (2 * m)
        self.out = [[] for _ in range(g.n)]
        for i, (u, v) in enumerate(self.edges):
            self.tail[2 * i], self.tail[2 * i + 1] = u, v
            self.out[u].append(2 * i)
            self.out[v].append(2 * i + 1)
        self.deg = degs
        self.min_face = _girth(g) if g.min_degree() >= 2 else 1
        self.face_target = m - g.n + 2 - target
        self.succ = [-1] * (2 * m)
        self.pred = [-1] * (2 * m)
        self.used = bytearray(4 * m)
        self.sign = [0] * m
        if mode == "orientable":
            self.sign = [1] * m
        else:
            for i in self._tree_edges():
                self.sign[i] = 1
        self.face = []
        self.witness = None

    def _tree_edges(self):
        seen = {0}
        tree = []
        frontier = [0]
        while frontier:
            x = frontier.pop(0)
            for d in self.out[x]:
                y = self.tail[d ^ 1]
                if y not in seen:
                    seen.add(y)
                    tree.append(d >> 1)
                    frontier.append(y)
        return tree

    def run(self):
        two_m = 2 * self.m
        if two_m // self.min_face < self.face_target:
            return None
        self.used[0] = 1
        self.face = [0]
        if self._walk(0, 1, 0, 0, 0, 0):
            return self.witness
        return None

    def _linkable(self, a, b):
        # succ[a] = b at a common tail vertex.
        cur, length = b, 1
        while cur != a and self.succ[cur] >= 0:
            cur = self.succ[cur]
            length += 1
        if cur == a:
            return length == self.deg[self.tail[a]]
        return True

    def _reverse(self, s):
        d, eps = s >> 1, (-1 if s & 1 else 1)
        return 2 * (d ^ 1) + ((-eps * self.sign[d >> 1]) < 0)

    def _walk(self, d, eps, start, faces, length, consumed):
        self.budget.tick()
        e = d >> 1
        fresh = self.sign[e] == 0
        for s in ((1, -1) if fresh else (self.sign[e],)):
            if fresh:
                self.sign[e] = s
            eps2 = eps * s
            r = d ^ 1
            y = self.tail[r]
            if eps2 == 1:
                nxt = self.succ[r]
                cands = [(nxt, False)] if nxt >= 0 else [
                    (d2, True) for d2 in self.out[y] if self.pred[d2] < 0 and self._linkable(r, d2)]
            else:
                nxt = self.pred[r]
                cands = [(nxt, False)] if nxt >= 0 else [
                    (d2, True) for d2 in self.out[y] if self.succ[d2] < 0 and self._linkable(d2, r)]
            for d2, link in cands:
                if link:
                    if eps2 == 1:
                        self.succ[r], self.pred[d2] = d2, r
                    else:
                        self.succ[d2], self.pred[r] = r, d2
                if self._advance(d2, eps2, start, faces, length + 1, consumed):
                    return True
                if link:
                    if eps2 == 1:
                        self.succ[r], self.pred[d2] = -1, -1
                    else:
                        self.succ[d2], self.pred[r] = -1, -1
            if fresh:
                self.sign[e] = 0
        return False

    def _advance(self, d2, eps2, start, faces, length, consumed):
        st = 2 * d2 + (eps2 < 0)
        two_m = 2 * self.m
        if st == start:
            rev = [self._reverse(s) for s in self.face]
            if len(set(rev)) != len(rev) or any(self.used[s] for s in rev):
                return False
            for s in rev:
                self.used[s] = 1
            faces2, consumed2 = faces + 1, consumed + length
            ok = False
            if consumed2 == two_m:
                ok = self._accept(faces2)
            elif faces2 + (two_m - consumed2) // self.min_face >= self.face_target:
                nxt = self.used.index(0)
                saved = self.face
                self.face = [nxt]
                self.used[nxt] = 1
                ok = self._walk(nxt >> 1, -1 if nxt & 1 else 1, nxt, faces2, 0, consumed2)
                if not ok:
                    self.used[nxt] = 0
                    self.face = saved
            if not ok:
                for s in rev:
                    self.used[s] = 0
            return ok
        if self.used[st]:
            return False
        rest = two_m - consumed - max(self.min_face, length + 1)
        if rest < 0 or faces + 1 + rest // self.min_face < self.face_target:
            return False
        self.used[st] = 1
        self.face.append(st)
        if self._walk(d2, eps2, start, faces, length, consumed):
            return True
        self.used[st] = 0
        self.face.pop()
        return False

    def _accept(self, faces):
        eg = 2 - self.n + self.m - faces
        if self.mode == "orientable":
            ok = eg <= self.target
        else:
            orientable = _balanced(self.n, self.edges, lambda i: self.sign[i])
            if self.mode == "nonorientable":
                ok = eg <= self.target - (1 if orientable else 0)
            else:
                ok = eg <= self.target
        if ok:
            self.witness = self._extract()
        return ok

    def _extract(self):
        rotation = []
        for x in range(self.n):
            if not self.out[x]:
                rotation.append(())
                continue
            first = self.out[x][0]
            cyc, d = [], first
            while True:
                cyc.append(self.tail[d ^ 1])
                d = self.succ[d]
                if d == first:
                    break
            rotation.append(tuple(cyc))
        negative = {self.edges[i] for i in range(self.m) if self.sign[i] == -1}
        return Embedding(rotation, negative)


def _search(g, mode, target, budget):
    search = _RotationSearch(g, mode, target, budget)
    witness = search.run()
    logger.debug("%s search for eg %d on %r: %s after %d nodes",
                 mode, target, g, "found" if witness else "none", budget.nodes)
    return witness


def _euler_lower_bound(g):
    girth = _girth(g)
    if girth == math.inf:
        return 0
    return max(0, g.num_edges - g.n + 2 - (2 * g.num_edges) // girth)


@lru_cache(maxsize=4096)
def _connected_genera(g6, cap, max_edges, budget_limit):
    # (eg_o or None, eg_n or None, orientable witness, non-orientable witness); None means "> cap".
    g = graph6_decode(g6)
    budget = SearchBudget(budget_limit, f"genus of {g6.decode()}")
    return _connected_genera_uncached(g, cap, max_edges, budget)


def _connected_genera_uncached(g, cap, max_edges, budget):
    if g.num_edges == 0:
        return 0, 1, Embedding([()] * g.n), None
    planar = is_planar(g)
    if planar.planar:
        return 0, 1, planar.embedding, None
    if g.num_edges > max_edges:
        raise EmbeddingRefused(g.num_edges, max_edges, budget.stats())

    low = max(_euler_lower_bound(g), 1)
    eg_o, w_o = None, None
    for target in range(max(2, low + (low % 2)), cap + 1, 2):
        w = _search(g, "orientable", target, budget)
        if w is not None:
            eg_o, w_o = target, w
            break
    eg_n, w_n = None, None
    top = cap if eg_o is None else min(eg_o, cap)
    for target in range(low, top + 1):
        w = _search(g, "nonorientable", target, budget)
        if w is not None:
            eg_n, w_n = target, w
            break
    if eg_n is None and eg_o is not None and eg_o + 1 <= cap:
        eg_n = eg_o + 1
    return eg_o, eg_n, w_o, w_n


def _pieces(g, use_blocks):
    # Blocks (or components) as (vertex map, graph); isolated vertices are skipped.
    nxg = to_networkx(g)
    if use_blocks:
        parts = [sorted(b) for b in nx.biconnected_components(nxg)]
    else:
        parts = [sorted(c) for c in components(g) if len(c) > 1]
    out = []
    for p in sorted(parts):
        piece, vmap = induced(g, p)
        out.append((vmap, piece))
    return out


def _profile(g, cap, budget, use_blocks=True):
    settings = get_settings()
    out = []
    for vmap, piece in _pieces(g, use_blocks):
        if budget is None:
            result = _connected_genera(graph6_encode(piece), cap, settings.max_block_edges, settings.budget)
        else:
            result = _connected_genera_uncached(piece, cap, settings.max_block_edges, budget)
        out.append((vmap, piece, result))
    return out


def _combine(profile):
    # Returns (eg_o, eg, nonorientable_reached) with None meaning "above the cap".
    eg_o, eg, reached = 0, 0, False
    for _, _, (bo, bn, _, _) in profile:
        eg_o = None if eg_o is None or bo is None else eg_o + bo
        options = [x for x in (bo, bn) if x is not None]
        be = min(options) if options else None
        eg = None if eg is None or be is None else eg + be
        if be is not None and bn == be:
            reached = True
    return eg_o, eg, reached


def _merge(g, parts):
    # Concatenate piece rotations at shared (cut) vertices.
    rotation = [[] for _ in range(g.n)]
    negative = set()
    for vmap, emb in parts:
        for i, rot in enumerate(emb.rotation):
            rotation[vmap[i]].extend(vmap[j] for j in rot)
        negative |= {(min(vmap[a], vmap[b]), max(vmap[a], vmap[b])) for a, b in emb.negative}
    return Embedding(rotation, negative)


def minimum_surfaces(g, eg_max=6, budget=None, use_blocks=True):
    """
    Least Euler genus of an orientable and of a non-orientable surface g embeds in.

    The non-orientable value of a planar graph is 1. Over blocks, the orientable values add; the
    non-orientable value is the summed Euler genus when some block reaches its Euler genus
    non-orientably, and one more otherwise.

    Parameters:
    - g (Graph): Graph with at least one vertex.
    - eg_max (int): Largest Euler genus searched; anything above it is refused.
    - budget (SearchBudget | None): Node counter; None uses a cached per-block search.
    - use_blocks (bool): Decompose into blocks (True) or search whole components.

    Returns:
    tuple[int, int]: (orientable Euler genus, non-orientable Euler genus).
    """
    eg_o, eg, reached = _combine(_profile(g, eg_max, budget, use_blocks))
    if eg_o is None or eg is None:
        raise SearchRefused(f"Euler genus of {g!r} exceeds the search limit {eg_max}",
                            {"nodes": budget.nodes if budget else 0, "refusals": 1})
    eg_n = eg if reached else eg + 1
    if eg_n > eg_max and not reached:
        logger.debug("non-orientable value %d of %r derived by adding a crosscap", eg_n, g)
    return eg_o, eg_n


def embedding_for(g, s, budget=None):
    """
    Decide whether g embeds in surface s.

    Returns:
    Embedding | None: A witness whose traced surface is ⪯ s, or None when no embedding exists.
    """
    if s.empty:
        return Embedding(()) if g.n == 0 else None
    if g.n == 0:
        return Embedding(())
    profile = _profile(g, s.eg, budget)
    eg_o, eg, reached = _combine(profile)
    if s.orientable:
        if eg_o is None or eg_o > s.eg:
            return None
        return _merge(g, [(vmap, res[2]) for vmap, _, res in profile])
    if eg is None or eg + (0 if reached else 1) > s.eg:
        return None
    parts = []
    for vmap, _, (bo, bn, wo, wn) in profile:
        be = min(x for x in (bo, bn) if x is not None)
        parts.append((vmap, wn if reached and bn == be and wn is not None else wo))
    return _merge(g, parts)


def embeds(g, s, budget=None):
    """
    Exact decision of "g embeds in s", with a witness on success.

    Returns:
    tuple[bool, Embedding | None]
    """
    witness = embedding_for(g, s, budget)
    return witness is not None, witness


def euler_genus(g, eg_max=6, budget=None, use_blocks=True):
    """
    Euler genus with both orientable and non-orientable values and a witness embedding.

    Returns:
    GenusResult: eg = min(orientable Euler genus, non-orientable Euler genus).
    """
    if g.n == 0:
        return GenusResult(0, 0, 1, Embedding(()))
    eg_o, eg_n = minimum_surfaces(g, eg_max, budget, use_blocks)
    eg = min(eg_o, eg_n)
    witness = embedding_for(g, surface_of(eg, eg == eg_o), budget)
    return GenusResult(eg, eg_o // 2, eg_n, witness)


# ---------------------------------------------------------------- oracles

def _cyclic_orders(nbrs):
    if len(nbrs) <= 2:
        yield tuple(nbrs)
        return
    first, rest = nbrs[0], nbrs[1:]
    for perm in itertools.permutations(rest):
        yield (first,) + perm


def _forest_edges(g):
    parent_edges = set()
    seen = set()
    for s in range(g.n):
        if s in seen:
            continue
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in sorted(g.adj[x]):
                if y not in seen:
                    seen.add(y)
                    parent_edges.add((min(x, y), max(x, y)))
                    stack.append(y)
    return parent_edges


def all_embeddings(g):
    """Every rotation system combined with every signature whose spanning-forest edges are +1."""
    tree = _forest_edges(g)
    free = [e for e in g.edges() if e not in tree]
    rotations = [list(_cyclic_orders(sorted(g.adj[v]))) for v in range(g.n)]
    for rotation in itertools.product(*rotations):
        for bits in itertools.product((False, True), repeat=len(free)):
            yield Embedding(rotation, [e for e, neg in zip(free, bits) if neg])


def exhaustive_genera(g):
    """
    Brute-force (orientable Euler genus, non-orientable Euler genus) by tracing every embedding.
    The non-orientable value counts "orientable plus one crosscap" too.
    """
    best_o, best_n = math.inf, math.inf
    for emb in all_embeddings(g):
        s = verify_embedding(g, emb)
        if s.orientable:
            best_o = min(best_o, s.eg)
        else:
            best_n = min(best_n, s.eg)
    return best_o, min(best_n, best_o + 1)


def planar_face_sets(g):
    """
    Brute force, per component with an edge: the vertex sets of every face of every planar
    rotation system of that component. A non-planar component gets no faces.

    Returns:
    list[tuple[frozenset[int], set[frozenset[int]]]]: (component, face vertex sets) pairs.
    """
    out = []
    for comp in components(g):
        sub, vmap = induced(g, comp)
        if sub.num_edges == 0:
            continue
        faces = set()
        for rotation in itertools.product(*[list(_cyclic_orders(sorted(sub.adj[v]))) for v in range(sub.n)]):
            emb = Embedding(rotation)
            if verify_embedding(sub, emb).eg != 0:
                continue
            faces.update(frozenset(vmap[u] for u, _ in walk) for walk in trace_faces(sub, emb))
        out.append((comp, faces))
    return out


def exhaustive_disk_embeddable(g, x, face_sets=None):
    """
    Brute force: every component has a planar rotation with all of its x-vertices on one face.

    Parameters:
    - g (Graph): The graph.
    - x (iterable[int]): Boundary vertices.
    - face_sets (list | None): planar_face_sets(g), when the caller sweeps many x.
    """
    x = set(x)
    for comp, faces in face_sets if face_sets is not None else planar_face_sets(g):
        if not faces:
            return False
        local = x & comp
        if local and not any(local <= f for f in faces):
            return False
    return True
