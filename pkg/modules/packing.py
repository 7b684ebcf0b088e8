# modules/packing.py

"""
Packings, covers and the EP parameter on top of the minor engine.

Every answer is one of: a certificate, a proof of absence (an upper bound below the target),
or a refusal raised as SearchRefused.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

from modules.embedder import euler_genus, minimum_surfaces, verify_embedding
from modules.errors import PreconditionError, SearchRefused
from modules.graph_core import disjoint_union, induced, same_graph
from modules.minor_engine import MinorModel, is_minor, minimize_host
from modules.search_budget import SearchBudget, ensure_budget

logger = logging.getLogger(__name__)

KINDS = ("single", "mixed")


@dataclass
class PackingCert:
    """
    Models of patterns in a host. multiplicity 1: pairwise vertex-disjoint models;
    multiplicity 2: distinct models with no host vertex in more than two of them.
    """

    hosts: list
    multiplicity: int = 1
    kind: str = "single"

    def __post_init__(self):
        self.hosts = [(h, m if isinstance(m, MinorModel) else MinorModel(m)) for h, m in self.hosts]

    @property
    def size(self):
        return len(self.hosts)

    def as_dict(self):
        return {
            "size": self.size,
            "multiplicity": self.multiplicity,
            "kind": self.kind,
            "models": [{"pattern_n": h.n, "pattern_edges": [list(e) for e in h.edges()], "branch": m.as_dict()}
                       for h, m in self.hosts],
        }


@dataclass
class CoverCert:
    s: frozenset
    checked_against: list
    attestation: dict = field(default_factory=dict)
    optimal: bool = True
    lower_bound: int = 0

    @property
    def size(self):
        return len(self.s)

    def as_dict(self):
        return {"s": sorted(self.s), "size": self.size, "optimal": self.optimal,
                "lower_bound": self.lower_bound, "attestation": self.attestation}


@dataclass
class PackResult:
    status: str  # "found", "absent" or "refused"
    k_target: int
    cert: PackingCert | None
    lower: int
    upper: int | None
    stats: dict = field(default_factory=dict)
    note: str = ""

    @property
    def exact(self):
        return self.upper is not None and self.lower == self.upper

    def as_dict(self):
        return {"status": self.status, "k_target": self.k_target, "lower": self.lower, "upper": self.upper,
                "exact": self.exact, "note": self.note,
                "certificate": self.cert.as_dict() if self.cert is not None else None}


class EPResult(NamedTuple):
    value: int
    degenerate: bool
    trace: list


# ---------------------------------------------------------------- upper bounds

def _counting_bound(h, g, multiplicity):
    if h.n == 0:
        return None
    bound = multiplicity * g.n // h.n
    if h.num_edges and multiplicity == 1:
        bound = min(bound, g.num_edges // h.num_edges)
    return bound


def host_surface(g, host_embedding=None, budget=None):
    """A surface the host provably embeds in, or None when none could be established."""
    if host_embedding is not None:
        return verify_embedding(g, host_embedding)
    try:
        result = euler_genus(g, budget=budget)
    except SearchRefused as e:
        logger.debug("no host surface for %r: %s", g, e)
        return None
    return verify_embedding(g, result.witness)


def copies_embed(h, j, surface):
    """Does j disjoint copies of h embed in surface? Uses additivity of Euler genus over components."""
    eg_o, eg_n = minimum_surfaces(h)
    eg = min(eg_o, eg_n)
    union_o = j * eg_o
    union_n = j * eg if eg_n == eg else j * eg + 1
    union_n = min(union_n, union_o + 1)
    if surface.orientable:
        return union_o <= surface.eg
    return union_n <= surface.eg


def _surface_bound(h, surface, cap):
    if surface is None or cap is None:
        return None
    if minimum_surfaces(h)[0] == 0:
        return None
    j = 0
    while j < cap and copies_embed(h, j + 1, surface):
        j += 1
    return j


def _mixed_surface_bound(z, surface):
    # j models of any patterns need Euler genus at least j times the least one over z.
    if surface is None:
        return None
    profiles = [minimum_surfaces(h) for h in z]
    least = min(eg_o if surface.orientable else min(eg_o, eg_n) for eg_o, eg_n in profiles)
    if least == 0:
        return None
    return surface.eg // least


# ---------------------------------------------------------------- search helpers

def _remainder(g, used):
    keep = [v for v in range(g.n) if v not in used]
    return induced(g, keep)


def _lift(model, vmap):
    return MinorModel({u: frozenset(vmap[v] for v in x) for u, x in model.branch.items()})


def _greedy_disjoint(patterns, g, limit, budget):
    """Disjoint models found one at a time in what is left of the host; stops early on refusal."""
    found, used = [], set()
    try:
        while len(found) < limit:
            rest, vmap = _remainder(g, used)
            step = None
            for h in patterns:
                model = is_minor(h, rest, budget)
                if model is not None:
                    step = (h, _lift(model, vmap))
                    break
            if step is None:
                break
            found.append(step)
            used |= step[1].vertices()
    except SearchRefused as e:
        logger.debug("greedy packing stopped after %d models: %s", len(found), e)
    return found


def _split_union(patterns, model):
    hosts, offset = [], 0
    for h in patterns:
        hosts.append((h, MinorModel({u: model.branch[offset + u] for u in range(h.n)})))
        offset += h.n
    return hosts


def _half_integral_extend(h, g, hosts, limit, budget):
    hosts = list(hosts)
    try:
        while len(hosts) < limit:
            usage = {}
            for _, m in hosts:
                for v in m.vertices():
                    usage[v] = usage.get(v, 0) + 1
            full = {v for v, c in usage.items() if c >= 2}
            seen = {m.vertices() for _, m in hosts}
            candidates = [frozenset()] + [frozenset([v]) for v in sorted(usage) if usage[v] == 1]
            added = False
            for extra in candidates:
                rest, vmap = _remainder(g, full | extra)
                model = is_minor(h, rest, budget)
                if model is None:
                    continue
                model = _lift(model, vmap)
                if model.vertices() not in seen:
                    hosts.append((h, model))
                    added = True
                    break
            if not added:
                break
    except SearchRefused as e:
        logger.debug("half-integral extension stopped at %d models: %s", len(hosts), e)
    return hosts


# ---------------------------------------------------------------- pack

def pack(z, g, k_target, multiplicity=1, kind="single", budget=None, host_embedding=None):
    """
    Search for k_target models of patterns from z in g.

    Parameters:
    - z (list[Graph]): The antichain.
    - g (Graph): Host.
    - k_target (int): Number of models wanted.
    - multiplicity (int): 1 for disjoint models, 2 for half-integral.
    - kind (str): "single" (all models of one H in z) or "mixed".
    - budget (SearchBudget | None): Node budget.
    - host_embedding (Embedding | None): Known embedding of g, used for the surface bound.

    Returns:
    PackResult: status "found" with a certificate, "absent" with an upper bound below k_target,
    or "refused" when neither could be established.
    """
    if multiplicity not in (1, 2):
        raise PreconditionError("multiplicity", f"must be 1 or 2, got {multiplicity}")
    if kind not in KINDS:
        raise PreconditionError("kind", f"must be one of {KINDS}, got {kind!r}")
    if not z:
        raise PreconditionError("antichain", "z is empty")
    budget = ensure_budget(budget)
    if k_target <= 0:
        return PackResult("found", k_target, PackingCert([], multiplicity, kind), 0, None, budget.stats())
    surface = host_surface(g, host_embedding, budget) if multiplicity == 1 else None
    if kind == "mixed":
        return _pack_mixed(z, g, k_target, multiplicity, budget, surface)
    best = None
    for h in z:
        result = _pack_single(h, g, k_target, multiplicity, budget, surface)
        if result.status == "found":
            return result
        if best is None or (result.status, result.lower) > (best.status, best.lower):
            best = result
    return best


def _pack_single(h, g, k_target, multiplicity, budget, surface):
    upper = _counting_bound(h, g, multiplicity)
    if multiplicity == 1:
        bound = _surface_bound(h, surface, upper)
        if bound is not None and (upper is None or bound < upper):
            upper = bound
    reach = k_target if upper is None else min(k_target, upper)
    greedy = _greedy_disjoint([h], g, reach, budget)
    if multiplicity == 2:
        greedy = _half_integral_extend(h, g, greedy, k_target, budget)
    lower = len(greedy)
    if lower >= k_target:
        cert = PackingCert(greedy[:k_target], multiplicity, "single")
        return PackResult("found", k_target, cert, lower, upper, budget.stats())
    if upper is not None and upper < k_target:
        return PackResult("absent", k_target, PackingCert(greedy, multiplicity, "single"), lower, upper,
                          budget.stats(), "upper bound below target")
    if multiplicity == 2:
        return PackResult("refused", k_target, PackingCert(greedy, 2, "single"), lower, upper, budget.stats(),
                          "half-integral search is best-effort")
    patterns = [h] * k_target
    try:
        model = is_minor(disjoint_union(*patterns), g, budget)
    except SearchRefused as e:
        return PackResult("refused", k_target, PackingCert(greedy, 1, "single"), lower, upper, e.stats, str(e))
    if model is None:
        return PackResult("absent", k_target, PackingCert(greedy, 1, "single"), lower, k_target - 1,
                          budget.stats(), "exhaustive search")
    cert = PackingCert(_split_union(patterns, model), 1, "single")
    return PackResult("found", k_target, cert, k_target, upper, budget.stats())


def _pack_mixed(z, g, k_target, multiplicity, budget, surface):
    if multiplicity != 1:
        raise PreconditionError("multiplicity", "mixed packings are vertex-disjoint")
    smallest = min(h.n for h in z)
    upper = g.n // smallest if smallest else None
    bound = _mixed_surface_bound(z, surface)
    if upper is not None and bound is not None:
        upper = min(upper, bound)
    greedy = _greedy_disjoint(z, g, k_target, budget)
    if len(greedy) >= k_target:
        return PackResult("found", k_target, PackingCert(greedy[:k_target], 1, "mixed"), len(greedy), upper,
                          budget.stats())
    if upper is not None and upper < k_target:
        return PackResult("absent", k_target, PackingCert(greedy, 1, "mixed"), len(greedy), upper,
                          budget.stats(), "upper bound below target")
    try:
        for combo in itertools.combinations_with_replacement(range(len(z)), k_target):
            patterns = [z[i] for i in combo]
            model = is_minor(disjoint_union(*patterns), g, budget)
            if model is not None:
                cert = PackingCert(_split_union(patterns, model), 1, "mixed")
                return PackResult("found", k_target, cert, k_target, upper, budget.stats())
    except SearchRefused as e:
        return PackResult("refused", k_target, PackingCert(greedy, 1, "mixed"), len(greedy), upper, e.stats, str(e))
    return PackResult("absent", k_target, PackingCert(greedy, 1, "mixed"), len(greedy), k_target - 1,
                      budget.stats(), "exhaustive search")


def packing_number(z, g, multiplicity=1, kind="single", budget=None, host_embedding=None, k_max=None):
    """
    Raise the target one at a time until a pack call proves absence.

    Returns:
    PackResult: The last result; `exact` is True when lower == upper.
    """
    budget = ensure_budget(budget)
    k, last = 1, None
    while k_max is None or k <= k_max:
        result = pack(z, g, k, multiplicity, kind, budget, host_embedding)
        if result.status != "found":
            if result.status == "absent":
                result.upper = min(result.upper, k - 1) if result.upper is not None else k - 1
                result.lower = k - 1
                if last is not None:
                    result.cert = last.cert
            return result
        last = result
        k += 1
    return last


def extract_single_pattern(cert, k, z=None):
    """
    Pigeonhole: a mixed certificate with at least k·|z| models holds k models of one pattern.

    Returns:
    PackingCert: A single-pattern certificate of size k.
    """
    if z is not None and cert.size < k * len(z):
        raise PreconditionError("certificate size", f"{cert.size} models < k·|Z| = {k * len(z)}")
    groups = []
    for h, model in cert.hosts:
        for group in groups:
            if same_graph(group[0][0], h):
                group.append((h, model))
                break
        else:
            groups.append([(h, model)])
    for group in groups:
        if len(group) >= k:
            return PackingCert(group[:k], cert.multiplicity, "single")
    raise PreconditionError("certificate size", f"no pattern has {k} models")


# ---------------------------------------------------------------- cover

class _CoverSearch:
    """Hitting-set branching over the vertices of a minimal expansion, deepening on |S|."""

    def __init__(self, z, g, budget):
        self.z = z
        self.g = g
        self.budget = budget
        self.failed = {}

    def model_in(self, removed):
        rest, vmap = _remainder(self.g, removed)
        for h in self.z:
            model = is_minor(h, rest, self.budget)
            if model is not None:
                expansion = minimize_host(rest, model, h)
                return frozenset(vmap[v] for v in expansion.vertices)
        return None

    def hit(self, removed, size):
        if self.failed.get(removed, -1) >= size:
            return None
        self.budget.tick()
        target = self.model_in(removed)
        if target is None:
            return removed
        if size > 0:
            for v in sorted(target):
                found = self.hit(removed | {v}, size - 1)
                if found is not None:
                    return found
        self.failed[removed] = max(self.failed.get(removed, -1), size)
        return None


def _attest(z, g, s):
    from modules.embedder import is_planar

    rest, _ = _remainder(g, s)
    rest_planar = is_planar(rest).planar
    out = {}
    for i, h in enumerate(z):
        out[str(i)] = "planar remainder" if rest_planar and not is_planar(h).planar else "exhaustive search"
    return out


def cover(z, g, size_cap, budget=None, level_budget=None):
    """
    Smallest vertex set S with |S| <= size_cap meeting every model of every pattern in z.

    Parameters:
    - z (list[Graph]): The antichain.
    - g (Graph): Host.
    - size_cap (int): Largest |S| tried.
    - budget (SearchBudget | None): Shared node budget; exhausting it raises.
    - level_budget (int | None): When set, each size level gets its own budget of this many nodes;
      a refused level is skipped and the cover found later is marked non-optimal.

    Returns:
    CoverCert: The cover with its optimality flag and proven lower bound.
    """
    if not z:
        raise PreconditionError("antichain", "z is empty")
    budget = ensure_budget(budget)
    refused_at = None
    for size in range(size_cap + 1):
        level = budget if level_budget is None else SearchBudget(level_budget, f"cover level {size}")
        search = _CoverSearch(z, g, level)
        try:
            s = search.hit(frozenset(), size)
        except SearchRefused as e:
            if level_budget is None:
                raise
            logger.warning("cover level %d refused: %s", size, e)
            refused_at = size if refused_at is None else refused_at
            continue
        if s is not None:
            lower = size if refused_at is None else refused_at
            return CoverCert(frozenset(s), list(z), _attest(z, g, s), refused_at is None, lower)
        logger.debug("no cover of size %d", size)
    raise SearchRefused(f"no cover of size <= {size_cap} found", {**budget.stats(), "refusals": 1})


# ---------------------------------------------------------------- EP parameter

def ep_parameter(z, g, k_max, budget=None, host_spec=None):
    """
    Largest k <= k_max such that some Dyck grid D_k of an obstruction surface of S_Z is a minor of g.

    Parameters:
    - z (list[Graph]): The antichain.
    - g (Graph): Host.
    - k_max (int): Largest order tried.
    - budget (SearchBudget | None): Node budget.
    - host_spec (FamilySpec | None): Family of g, used to supply explicit models as hints.

    Returns:
    EPResult: value, the degenerate flag (value < 3) and one trace entry per order tried.
    """
    from modules.family_gen import family_minor_model, generate
    from modules.surface_alg import dyck_family_for

    budget = ensure_budget(budget)
    templates = dyck_family_for(z, budget=budget)
    value, trace = 0, []
    for k in range(1, k_max + 1):
        ordered = []
        for surface, template in templates:
            spec = template.at(k)
            hint = family_minor_model(spec, host_spec) if host_spec is not None else None
            ordered.append((hint is None, str(surface), spec, hint))
        ordered.sort(key=lambda item: (item[0], item[1]))
        hit = None
        for _, surface, spec, hint in ordered:
            model = is_minor(generate(spec).graph, g, budget, hint=hint)
            if model is not None:
                hit = surface
                break
        trace.append({"k": k, "found": hit})
        if hit is None:
            break
        value = k
    return EPResult(value, value < 3, trace)


# ---------------------------------------------------------------- closed-form helpers

def genus_bound(h, surface, budget=None):
    """1 + eg(Σ) - eg(H): the packing bound for H in Dyck grids of Σ."""
    return 1 + surface.eg - euler_genus(h, budget=budget).eg


def cover_growth_bound(k, c):
    return k // (2 * c)
