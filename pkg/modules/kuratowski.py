# modules/kuratowski.py

"""
Small separations, Kuratowski-connectivity and core components.

A separation (A, B) of order <= 3 is *minimal* when some component C of G - (A∩B) lies in A∖B,
some component D lies in B∖A, and every separator vertex has a neighbour in both. A side is
"disk embeddable" when G[side] embeds in a disk with A∩B on the boundary.
"""

import itertools
import logging
from dataclasses import dataclass, field

from modules.embedder import disk_embeddable, is_planar
from modules.errors import PreconditionError
from modules.graph_core import Separation, components, induced, is_connected

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinimalSeparationReport:
    separation: Separation
    witnesses: tuple
    disk_side: str | None  # None, "A", "B" or "both"

    def as_dict(self):
        return {
            **self.separation.as_dict(),
            "witnesses": [sorted(c) for c in self.witnesses],
            "disk_side": self.disk_side,
        }


@dataclass
class CoreResult:
    status: str  # "found" or "none"
    phi: frozenset | None
    sigma_trace: list = field(default_factory=list)
    note: str = ""

    @property
    def found(self):
        return self.status == "found"

    def as_dict(self):
        return {
            "status": self.status,
            "phi": sorted(self.phi) if self.phi is not None else None,
            "sigma_trace": [
                {**rep.as_dict(), "sigma": sorted(side) if side is not None else None}
                for rep, side in self.sigma_trace
            ],
            "note": self.note,
        }


def _canonical(a, b):
    a, b = frozenset(a), frozenset(b)
    return (a, b) if tuple(sorted(a)) <= tuple(sorted(b)) else (b, a)


def _splits(g, separator):
    """Yield (A, B, comps_a, comps_b) for every split of the components of g - separator into two non-empty groups."""
    rest = set(range(g.n)) - set(separator)
    comps = components(g, rest)
    if len(comps) < 2:
        return
    # The first component stays on side A to halve the enumeration.
    for bits in itertools.product((0, 1), repeat=len(comps) - 1):
        if not any(bits):
            continue
        side_a = [comps[0]] + [c for c, bit in zip(comps[1:], bits) if not bit]
        side_b = [c for c, bit in zip(comps[1:], bits) if bit]
        a = frozenset(separator).union(*side_a)
        b = frozenset(separator).union(*side_b)
        yield a, b, side_a, side_b


def _disk_ok(g, side, separator):
    sub, vmap = induced(g, side)
    local = [i for i, v in enumerate(vmap) if v in separator]
    return disk_embeddable(sub, local)


def _disk_side(g, a, b, separator):
    ok_a, ok_b = _disk_ok(g, a, separator), _disk_ok(g, b, separator)
    if ok_a and ok_b:
        return "both"
    if ok_a:
        return "A"
    if ok_b:
        return "B"
    return None


def minimal_separations(g, max_order=3, within=None):
    """
    Every minimal separation of order <= max_order.

    Parameters:
    - g (Graph): The graph; callers split disconnected inputs into components themselves.
    - max_order (int): Largest separator size enumerated.
    - within (iterable[int] | None): Only separators contained in this vertex set.

    Returns:
    list[MinimalSeparationReport]: Canonicalized (least sorted side first), sorted by order then sides.
    """
    pool = sorted(set(range(g.n)) if within is None else set(within))
    seen = {}
    for order in range(0, max_order + 1):
        for separator in itertools.combinations(pool, order):
            sep = set(separator)
            for a, b, side_a, side_b in _splits(g, separator):
                full_a = [c for c in side_a if all(g.adj[s] & c for s in sep)]
                full_b = [c for c in side_b if all(g.adj[s] & c for s in sep)]
                if not full_a or not full_b:
                    continue
                a2, b2 = _canonical(a, b)
                if (a2, b2) in seen:
                    continue
                wa, wb = (min(full_a, key=min), min(full_b, key=min))
                if a2 != a:
                    wa, wb = wb, wa
                seen[(a2, b2)] = MinimalSeparationReport(
                    Separation(a2, b2), (wa, wb), _disk_side(g, a2, b2, sep))
    reports = list(seen.values())
    reports.sort(key=lambda r: (r.separation.order, tuple(sorted(r.separation.a)), tuple(sorted(r.separation.b))))
    logger.debug("%d minimal separations of order <= %d in %r", len(reports), max_order, g)
    return reports


def is_kuratowski_connected(g):
    """
    True iff every minimal separation of order <= 3 has a disk-embeddable side.

    Returns:
    tuple[bool, MinimalSeparationReport | None]: The verdict and, on False, a violating separation.
    """
    for report in minimal_separations(g, 3):
        if report.disk_side is None:
            return False, report
    return True, None


def separations_up_to(g, max_order=3):
    """All non-trivial separations of order <= max_order, canonicalized and deduplicated."""
    out = set()
    for order in range(0, max_order + 1):
        for separator in itertools.combinations(range(g.n), order):
            for a, b, _, _ in _splits(g, separator):
                out.add(_canonical(a, b))
    return [Separation(a, b) for a, b in sorted(out, key=lambda p: (len(p[0] & p[1]), tuple(sorted(p[0])),
                                                                    tuple(sorted(p[1]))))]


def _check_core_preconditions(h, sep):
    if not is_connected(h):
        raise PreconditionError("connected", "H must be connected")
    if is_planar(h).planar:
        raise PreconditionError("non-planar", "H must be non-planar")
    problems = sep.check(h)
    if problems:
        raise PreconditionError("separation", "; ".join(problems))
    if sep.order > 3:
        raise PreconditionError("order", f"separation of order {sep.order} > 3")
    if sep.is_trivial():
        raise PreconditionError("non-trivial", "A∖B or B∖A is empty")
    kc, violation = is_kuratowski_connected(h)
    if not kc:
        raise PreconditionError("kuratowski-connected",
                                f"minimal separation {violation.separation.as_dict()} has no disk-embeddable side")


def core_component(h, sep, checked=False):
    """
    Compute the core component of a non-trivial separation of order <= 3 from the non-embeddable
    sides of every minimal separation whose separator lies inside A∩B.

    Parameters:
    - h (Graph): Connected, non-planar, Kuratowski-connected graph.
    - sep (Separation): Non-trivial separation of h of order <= 3.
    - checked (bool): Skip the precondition checks (callers that already ran them).

    Returns:
    CoreResult: Found with Φ when Φ is exactly one component of H - (A∩B), else NoneFound with the trace.
    """
    if not checked:
        _check_core_preconditions(h, sep)
    separator = sep.separator
    trace = []
    sides = []
    for report in minimal_separations(h, 3, within=separator):
        s = report.separation
        if report.disk_side == "A":
            sigma = s.b
        elif report.disk_side == "B":
            sigma = s.a
        else:
            sigma = None
        trace.append((report, sigma))
        if sigma is not None:
            sides.append(sigma)
    everything = frozenset(range(h.n))
    phi = frozenset(everything.intersection(*sides)) - separator if sides else everything - separator
    comps = components(h, everything - separator)
    if phi and phi in comps:
        return CoreResult("found", phi, trace)
    note = "Φ is empty" if not phi else "Φ is not a single component of H - (A∩B)"
    logger.info("no core component for separation %s: %s", sep.as_dict(), note)
    return CoreResult("none", phi, trace, note)


def npl(h):
    """The subgraph induced on the union of the non-planar components of h."""
    keep = set()
    for comp in components(h):
        sub, _ = induced(h, comp)
        if not is_planar(sub).planar:
            keep |= comp
    return induced(h, keep)[0]


def disk_side_dichotomy_violations(h):
    """Minimal separations of order <= 3 where not exactly one side is disk embeddable."""
    return [r for r in minimal_separations(h, 3) if r.disk_side in (None, "both")]


def core_nesting_violations(h):
    """
    Check "C ⊆ D" for every pair of oriented non-trivial separations (X, Y), (Z, W) of order <= 3
    with X ⊆ W, where C is the core of (X, Y) lying in X∖Y and D the core of (Z, W).
    Pairs where either core is not found are skipped.

    Returns:
    list[dict]: One entry per violating pair.
    """
    seps = separations_up_to(h, 3)
    if not seps:
        return []
    _check_core_preconditions(h, seps[0])
    cores = {}
    for s in seps:
        cores[(s.a, s.b)] = core_component(h, s, checked=True)
    oriented = []
    for s in seps:
        core = cores[(s.a, s.b)]
        oriented.append((s.a, s.b, core))
        oriented.append((s.b, s.a, core))
    violations = []
    for x, y, c in oriented:
        if not c.found or not c.phi <= x - y:
            continue
        for z, w, d in oriented:
            if not x <= w or not d.found:
                continue
            if not c.phi <= d.phi:
                violations.append({"x": sorted(x), "y": sorted(y), "z": sorted(z), "w": sorted(w),
                                   "c": sorted(c.phi), "d": sorted(d.phi)})
    return violations
