# modules/surface_alg.py

"""
Surfaces up to Dyck normalization, the "obtainable by adding handles or crosscaps" order,
closed surface sets kept as their obstruction antichains, and the Dyck family of an antichain.
"""

import logging
import re
from collections import deque
from dataclasses import dataclass
from functools import total_ordering

from modules.errors import AntichainError, ConfigError

logger = logging.getLogger(__name__)


@total_ordering
@dataclass(frozen=True)
class Surface:
    h: int = 0
    c: int = 0
    empty: bool = False

    def __post_init__(self):
        if self.empty:
            if self.h or self.c:
                raise ValueError("the empty surface has no handles or crosscaps")
            return
        if self.h < 0 or not 0 <= self.c <= 2:
            raise ValueError(f"S({self.h},{self.c}) is not Dyck-normalized; use normalize()")

    @property
    def eg(self):
        if self.empty:
            raise ValueError("Euler genus of the empty surface is undefined")
        return 2 * self.h + self.c

    @property
    def orientable(self):
        return not self.empty and self.c == 0

    def _key(self):
        return (-1, 0, 0) if self.empty else (self.eg, self.c, self.h)

    def __lt__(self, other):
        return self._key() < other._key()

    def __str__(self):
        return "empty" if self.empty else f"S({self.h},{self.c})"

    def as_dict(self):
        return {"empty": True} if self.empty else {"h": self.h, "c": self.c}


EMPTY = Surface(empty=True)
SPHERE = Surface(0, 0)
TORUS = Surface(1, 0)
PROJECTIVE_PLANE = Surface(0, 1)
KLEIN_BOTTLE = Surface(0, 2)


def normalize(h, c):
    """Apply "three crosscaps are a handle and a crosscap" until at most two crosscaps remain."""
    if h < 0 or c < 0:
        raise ValueError(f"negative handle or crosscap count ({h}, {c})")
    while c >= 3:
        h, c = h + 1, c - 2
    return Surface(h, c)


def surface_of(eg, orientable):
    """The normalized surface of Euler genus `eg` with the given orientability."""
    if eg < 0:
        raise ValueError(f"negative Euler genus {eg}")
    if orientable:
        if eg % 2:
            raise ValueError(f"orientable surfaces have even Euler genus, got {eg}")
        return Surface(eg // 2, 0)
    if eg == 0:
        raise ValueError("there is no non-orientable surface of Euler genus 0")
    c = 1 if eg % 2 else 2
    return Surface((eg - c) // 2, c)


def leq(s1, s2):
    """True iff s2 is obtained from s1 by adding handles or crosscaps."""
    if s1.empty:
        return True
    if s2.empty:
        return False
    if s1.orientable and s2.orientable:
        return s1.h <= s2.h
    if s1.orientable:
        return s2.eg >= s1.eg + 1
    if s2.orientable:
        return False
    return s1.eg <= s2.eg


def add_handle(s):
    return Surface(0, 0) if s.empty else normalize(s.h + 1, s.c)


def add_crosscap(s):
    return Surface(0, 0) if s.empty else normalize(s.h, s.c + 1)


def reachable_by_moves(s1, s2, max_eg):
    """
    Breadth-first search over add-handle and add-crosscap moves.

    Parameters:
    - s1 (Surface), s2 (Surface): Start and goal.
    - max_eg (int): Surfaces above this Euler genus are not expanded.

    Returns:
    bool: True iff s2 is reachable from s1 (reflexive).
    """
    seen = {s1}
    queue = deque([s1])
    while queue:
        s = queue.popleft()
        if s == s2:
            return True
        for t in (add_handle(s), add_crosscap(s)):
            if t not in seen and t.eg <= max_eg:
                seen.add(t)
                queue.append(t)
    return False


def surfaces_up_to(max_eg, include_empty=True):
    out = [EMPTY] if include_empty else []
    for eg in range(max_eg + 1):
        if eg % 2 == 0:
            out.append(Surface(eg // 2, 0))
        if eg >= 1:
            out.append(surface_of(eg, False))
    return out


def minimal_elements(surfaces):
    surfaces = set(surfaces)
    return frozenset(s for s in surfaces if not any(t != s and leq(t, s) for t in surfaces))


@dataclass(frozen=True)
class ClosedSurfaceSet:
    """A downward-closed, proper set of surfaces represented by its ⪯-minimal non-members."""

    obstructions: frozenset

    def __post_init__(self):
        obs = frozenset(self.obstructions)
        object.__setattr__(self, 'obstructions', obs)
        if not 1 <= len(obs) <= 2:
            raise ValueError(f"a proper closed surface set has one or two obstructions, got {len(obs)}")
        if minimal_elements(obs) != obs:
            raise ValueError(f"obstructions {sorted(map(str, obs))} are not an antichain")

    def contains(self, s):
        return not any(leq(o, s) for o in self.obstructions)

    __contains__ = contains

    def members_up_to(self, max_eg):
        return [s for s in surfaces_up_to(max_eg) if self.contains(s)]


def sobs(s):
    return s.obstructions


def closed_set_from_members(members):
    """
    Build a ClosedSurfaceSet from an explicit finite list of members.

    Parameters:
    - members (iterable[Surface]): Every member; must be downward closed.

    Returns:
    ClosedSurfaceSet: The set, with sobs computed as the minimal non-members.
    """
    members = set(members)
    top = max((m.eg for m in members if not m.empty), default=0)
    universe = surfaces_up_to(top + 2)
    for m in members:
        for s in universe:
            if leq(s, m) and s not in members:
                raise ConfigError(f"{{{', '.join(sorted(map(str, members)))}}} is not downward closed: "
                                  f"{s} ⪯ {m} is missing")
    outside = [s for s in universe if s not in members]
    return ClosedSurfaceSet(minimal_elements(outside))


def parse_surface(token):
    token = token.strip()
    if token.lower() in ("empty", "∅", "s(empty)"):
        return EMPTY
    match = re.fullmatch(r"(?:S\()?\s*(\d+)\s*,\s*(\d+)\s*\)?", token)
    if not match:
        raise ConfigError(f"cannot parse surface {token!r}; expected 'h,c' or 'S(h,c)'")
    return normalize(int(match.group(1)), int(match.group(2)))


def format_surface(s):
    return str(s)


def format_surfaces(surfaces):
    return [format_surface(s) for s in sorted(surfaces)]


def surfaces_excluding(z, eg_max=6, budget=None):
    """
    The closed set of surfaces in which no graph of z embeds.

    Every member H of z contributes the least orientable and the least non-orientable surface
    it embeds in; sobs is the set of ⪯-minimal ones. A vertexless member embeds everywhere,
    which makes the set empty and sobs {Σ^∅}.

    Parameters:
    - z (list[Graph]): The antichain.
    - eg_max (int): Largest Euler genus the embedder is asked to try.
    - budget (SearchBudget | None): Node budget shared by all searches.

    Returns:
    ClosedSurfaceSet: S_Z by its obstructions.
    """
    # The embedder imports this module for Surface.
    from modules.embedder import minimum_surfaces

    if not z:
        raise AntichainError("the antichain is empty")
    candidates = set()
    for h in z:
        if h.n == 0:
            return ClosedSurfaceSet(frozenset([EMPTY]))
        eg_o, eg_n = minimum_surfaces(h, eg_max=eg_max, budget=budget)
        logger.info("minimum surfaces of %r: orientable eg %d, non-orientable eg %d", h, eg_o, eg_n)
        candidates.add(surface_of(eg_o, True))
        candidates.add(surface_of(eg_n, False))
    return ClosedSurfaceSet(minimal_elements(candidates))


def dyck_family_for(z, eg_max=6, budget=None):
    """
    One Dyck-grid template per obstruction surface of S_Z.

    Returns:
    list[tuple[Surface, FamilySpec]]: Templates with k unset; call `.at(k)` to pick an order.
    """
    from modules.family_gen import FamilySpec

    excluded = surfaces_excluding(z, eg_max=eg_max, budget=budget)
    for s in sorted(excluded.obstructions):
        if s.empty or s == SPHERE:
            offender = next((h for h in z if h.n == 0), None)
            if offender is None:
                from modules.embedder import is_planar
                offender = next((h for h in z if is_planar(h)[0]), None)
            raise AntichainError(f"antichain not in H⁻: sobs contains {s}", offender)
    return [(s, FamilySpec(family="dyck", h=s.h, c=s.c)) for s in sorted(excluded.obstructions)]
