# modules/certificates.py

"""
Independent checkers for minor models, expansions, packings and covers.
Each returns a list of problems; an empty list means the certificate is valid.
Nothing here calls into the search code.
"""

import itertools
import logging

import networkx as nx
from networkx.algorithms import isomorphism

logger = logging.getLogger(__name__)

ORACLE_LIMIT = 9


def _nx(g):
    out = nx.Graph()
    out.add_nodes_from(range(g.n))
    out.add_edges_from(g.edges())
    return out


def _branch_of(model):
    branch = getattr(model, "branch", model)
    return {u: set(x) for u, x in branch.items()}


def check_minor_model(h, g, model):
    """
    Parameters:
    - h (Graph): Pattern.
    - g (Graph): Host.
    - model (MinorModel | dict): Branch sets keyed by pattern vertex.

    Returns:
    list[str]: Problems found.
    """
    branch = _branch_of(model)
    host = _nx(g)
    problems = []
    if set(branch) != set(range(h.n)):
        problems.append(f"branch sets keyed {sorted(branch)} instead of 0..{h.n - 1}")
    owner = {}
    for u, x in sorted(branch.items()):
        if not x:
            problems.append(f"branch set of {u} is empty")
            continue
        bad = [v for v in x if not 0 <= v < g.n]
        if bad:
            problems.append(f"branch set of {u} has vertices {sorted(bad)} outside the host")
            continue
        for v in x:
            if v in owner:
                problems.append(f"vertex {v} is in the branch sets of {owner[v]} and {u}")
            owner[v] = u
        if not nx.is_connected(host.subgraph(x)):
            problems.append(f"branch set of {u} is not connected")
    for u, w in h.edges():
        if u in branch and w in branch and not any(host.has_edge(a, b) for a in branch[u] for b in branch[w]):
            problems.append(f"pattern edge {u}-{w} has no host edge between its branch sets")
    return problems


def check_expansion(h, g, expansion):
    """Every vertex outside T has degree two, |T| <= |V(H)|^2, and the pruned model lives inside."""
    problems = []
    sub = nx.Graph()
    sub.add_nodes_from(expansion.vertices)
    for a, b in expansion.edges:
        if not g.has_edge(a, b):
            problems.append(f"{a}-{b} is not a host edge")
        if a not in expansion.vertices or b not in expansion.vertices:
            problems.append(f"edge {a}-{b} leaves the expansion's vertex set")
        sub.add_edge(a, b)
    for v in expansion.vertices:
        if v not in expansion.t and sub.degree(v) != 2:
            problems.append(f"vertex {v} outside T has degree {sub.degree(v)}")
    if not expansion.t <= expansion.vertices:
        problems.append("T is not a subset of the expansion's vertices")
    if h.n > 1 and len(expansion.t) > h.n ** 2:
        problems.append(f"|T| = {len(expansion.t)} exceeds |V(H)|^2 = {h.n ** 2}")
    branch = _branch_of(expansion.model)
    for u, x in branch.items():
        if x and not nx.is_connected(sub.subgraph(x)):
            problems.append(f"branch set of {u} is not connected inside the expansion")
    for u, w in h.edges():
        if u in branch and w in branch and not any(sub.has_edge(a, b) for a in branch[u] for b in branch[w]):
            problems.append(f"pattern edge {u}-{w} is not realised inside the expansion")
    return problems + [p for p in check_minor_model(h, g, expansion.model) if p not in problems]


def _same_pattern(a, b):
    return a.n == b.n and sorted(a.edges()) == sorted(b.edges())


def check_packing(cert, g, z=None):
    """
    Parameters:
    - cert (PackingCert): The certificate.
    - g (Graph): Host.
    - z (list[Graph] | None): When given, every pattern must be one of these.

    Returns:
    list[str]: Problems found.
    """
    problems = []
    if cert.multiplicity not in (1, 2):
        problems.append(f"multiplicity {cert.multiplicity} is not 1 or 2")
    usage = {}
    vertex_sets = []
    for i, (h, model) in enumerate(cert.hosts):
        problems.extend(f"model {i}: {p}" for p in check_minor_model(h, g, model))
        if z is not None and not any(_same_pattern(h, q) for q in z):
            problems.append(f"model {i}: pattern is not in the antichain")
        vs = frozenset(itertools.chain.from_iterable(_branch_of(model).values()))
        vertex_sets.append(vs)
        for v in vs:
            usage[v] = usage.get(v, 0) + 1
    limit = 1 if cert.kind == "mixed" else cert.multiplicity
    over = sorted(v for v, c in usage.items() if c > limit)
    if over:
        problems.append(f"vertices {over} are used more than {limit} time(s)")
    if cert.kind == "single" and cert.hosts:
        first = cert.hosts[0][0]
        if not all(_same_pattern(first, h) for h, _ in cert.hosts):
            problems.append("single-pattern certificate mixes patterns")
    elif cert.kind not in ("single", "mixed"):
        problems.append(f"unknown kind {cert.kind!r}")
    if len(set(vertex_sets)) != len(vertex_sets):
        problems.append("two models use the same vertex set")
    return problems


def _partitions(items, k):
    if not items:
        if k == 0:
            yield []
        return
    head, tail = items[0], items[1:]
    for rest in _partitions(tail, k):
        for i in range(len(rest)):
            yield rest[:i] + [rest[i] | {head}] + rest[i + 1:]
    if k > 0:
        for rest in _partitions(tail, k - 1):
            yield rest + [{head}]


def _contains_minor(host, pattern):
    # Quotients of connected partitions of vertex subsets, matched with networkx monomorphism.
    k = pattern.number_of_nodes()
    if k == 0:
        return True
    nodes = sorted(host.nodes())
    for size in range(k, len(nodes) + 1):
        for subset in itertools.combinations(nodes, size):
            for blocks in _partitions(list(subset), k):
                if not all(nx.is_connected(host.subgraph(b)) for b in blocks):
                    continue
                quotient = nx.quotient_graph(host.subgraph(subset), [frozenset(b) for b in blocks])
                if quotient.number_of_edges() < pattern.number_of_edges():
                    continue
                if isomorphism.GraphMatcher(quotient, pattern).subgraph_is_monomorphic():
                    return True
    return False


def check_cover(cover_cert, g, z, strict=False):
    """
    Re-prove that G - S has no minor from z: by planarity when a pattern is non-planar and the
    remainder planar, otherwise by exhaustive search on remainders of at most nine vertices.

    Parameters:
    - cover_cert (CoverCert): The certificate.
    - g (Graph): Host.
    - z (list[Graph]): The antichain.
    - strict (bool): Report remainders too large to re-prove as problems.

    Returns:
    list[str]: Problems found.
    """
    s = set(cover_cert.s)
    problems = []
    bad = sorted(v for v in s if not 0 <= v < g.n)
    if bad:
        return [f"cover vertices {bad} are outside the host"]
    rest = _nx(g).subgraph([v for v in range(g.n) if v not in s]).copy()
    rest_planar = nx.check_planarity(rest)[0]
    for i, h in enumerate(z):
        pattern = _nx(h)
        if rest_planar and not nx.check_planarity(pattern)[0]:
            continue
        if rest.number_of_nodes() <= ORACLE_LIMIT:
            if _contains_minor(rest, pattern):
                problems.append(f"pattern {i} is still a minor of G - S")
            continue
        message = f"pattern {i}: remainder with {rest.number_of_nodes()} vertices is not re-proved"
        if strict:
            problems.append(message)
        else:
            logger.info("%s; attestation %r accepted", message, cover_cert.attestation.get(str(i)))
    return problems
