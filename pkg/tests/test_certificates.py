from dataclasses import replace

import pytest

from modules.certificates import check_cover, check_expansion, check_minor_model, check_packing
from modules.graph_core import build, complete_graph, cycle_graph, disjoint_union
from modules.minor_engine import minimize_host
from modules.packing import CoverCert, PackingCert

K4_IN_K5 = {0: {0}, 1: {1}, 2: {2}, 3: {3}}


def test_valid_model_has_no_problems(k5):
    assert check_minor_model(complete_graph(4), k5, K4_IN_K5) == []


@pytest.mark.parametrize("branch, fragment", [
    ({0: set(), 1: {1}, 2: {2}, 3: {3}}, "is empty"),
    ({0: {0, 1}, 1: {1}, 2: {2}, 3: {3}}, "branch sets of"),
    ({0: {0}, 1: {1}, 2: {2}, 3: {9}}, "outside the host"),
    ({0: {0}, 1: {1}, 2: {2}}, "instead of"),
])
def test_mutated_models_are_rejected(k5, branch, fragment):
    problems = check_minor_model(complete_graph(4), k5, branch)
    assert any(fragment in p for p in problems)


def test_disconnected_branch_set():
    problems = check_minor_model(build(2, [(0, 1)]), cycle_graph(5), {0: {0, 2}, 1: {1}})
    assert any("not connected" in p for p in problems)


def test_missing_pattern_edge():
    problems = check_minor_model(complete_graph(4), cycle_graph(4), K4_IN_K5)
    assert any("has no host edge" in p for p in problems)


def test_packing_checks(k5):
    k3 = complete_graph(3)
    g = disjoint_union(k5, k5)
    good = PackingCert([(k5, {i: {i} for i in range(5)}), (k5, {i: {i + 5} for i in range(5)})])
    assert check_packing(good, g, [k5]) == []

    overlap = PackingCert([(k3, {0: {0}, 1: {1}, 2: {2}}), (k3, {0: {2}, 1: {3}, 2: {4}})])
    assert any("more than 1" in p for p in check_packing(overlap, g))

    twice = PackingCert([(k3, {0: {0}, 1: {1}, 2: {2}}), (k3, {0: {1}, 1: {2}, 2: {0}})], multiplicity=2)
    assert any("same vertex set" in p for p in check_packing(twice, g))

    foreign = PackingCert([(k3, {0: {0}, 1: {1}, 2: {2}})])
    assert any("not in the antichain" in p for p in check_packing(foreign, g, [k5]))

    mixed = PackingCert([(k3, {0: {0}, 1: {1}, 2: {2}}), (complete_graph(4), {i: {i + 5} for i in range(4)})])
    assert any("mixes patterns" in p for p in check_packing(mixed, g))

    bad_multiplicity = PackingCert([], multiplicity=3)
    assert check_packing(bad_multiplicity, g) == ["multiplicity 3 is not 1 or 2"]


def test_cover_checks(k5):
    g = disjoint_union(k5, k5)
    assert check_cover(CoverCert(frozenset({0, 5}), [k5]), g, [k5]) == []
    problems = check_cover(CoverCert(frozenset({0}), [k5]), g, [k5])
    assert problems == ["pattern 0 is still a minor of G - S"]
    assert check_cover(CoverCert(frozenset({42}), [k5]), g, [k5]) == ["cover vertices [42] are outside the host"]


def test_expansion_with_stray_vertex_is_rejected():
    k3 = complete_graph(3)
    g = cycle_graph(6)
    expansion = minimize_host(g, {0: {0, 1}, 1: {2, 3}, 2: {4, 5}}, k3)
    assert check_expansion(k3, g, expansion) == []
    stray = replace(expansion, vertices=expansion.vertices | {99})
    assert any("outside T has degree 0" in p for p in check_expansion(k3, g, stray))
