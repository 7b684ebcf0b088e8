import networkx as nx
import pytest

from modules.errors import PreconditionError
from modules.family_gen import is_facial, random_graph, ring_blowup
from modules.graph_core import (Separation, build, complete_bipartite, complete_graph, cycle_graph, disjoint_union,
                               is_connected, isomorphic, path_graph, small_graphs, to_networkx)
from modules.graph_io import load_named_graphs, resolve_graph
from modules.kuratowski import (core_component, core_nesting_violations, disk_side_dichotomy_violations,
                                is_kuratowski_connected, minimal_separations, npl, separations_up_to)


def k5_with_triangle_cap():
    """K5 plus a degree-3 vertex on {0, 1, 2}: one minimal separation, core {3, 4}."""
    return build(6, complete_graph(5).edges() + [(5, 0), (5, 1), (5, 2)])


def test_minimal_separations_of_cycle():
    reports = minimal_separations(cycle_graph(5))
    assert len(reports) == 5
    assert all(r.separation.order == 2 for r in reports)
    assert all(r.disk_side == "both" for r in reports)


def test_minimal_separations_within_restricts_separators():
    reports = minimal_separations(cycle_graph(6), within=[0, 3])
    assert [sorted(r.separation.separator) for r in reports] == [[0, 3]]


@pytest.mark.parametrize("token", ["k5", "k3,3", "k6", "petersen", "ring:k4:0,1,2"])
def test_kuratowski_connected(token):
    verdict, violation = is_kuratowski_connected(resolve_graph(token))
    assert verdict
    assert violation is None


def test_two_block_graph_is_not_kuratowski_connected():
    verdict, violation = is_kuratowski_connected(resolve_graph("j"))
    assert not verdict
    assert violation.separation.order == 2
    assert violation.disk_side is None


def test_dichotomy_holds_on_kuratowski_connected_graphs():
    assert disk_side_dichotomy_violations(resolve_graph("petersen")) == []
    assert disk_side_dichotomy_violations(k5_with_triangle_cap()) == []


def test_core_found():
    h = k5_with_triangle_cap()
    result = core_component(h, Separation({0, 1, 2, 5}, {0, 1, 2, 3, 4}))
    assert result.found
    assert result.phi == frozenset({3, 4})
    assert result.as_dict()["sigma_trace"][0]["sigma"] == [0, 1, 2, 3, 4]


def test_core_at_colour_class_separator_is_none(k33):
    result = core_component(k33, Separation({0, 1, 2, 3}, {0, 1, 2, 4, 5}))
    assert result.status == "none"
    assert result.as_dict()["phi"] == []
    assert result.note


@pytest.mark.parametrize("graph, a, b, precondition", [
    (cycle_graph(6), {0, 1, 2, 3}, {0, 3, 4, 5}, "non-planar"),
    (disjoint_union(complete_graph(5), complete_graph(5)), set(range(5)), set(range(5, 10)), "connected"),
    (complete_graph(5), {0, 1, 2, 3}, {0, 1, 2, 4}, "separation"),
    (k5_with_triangle_cap(), {0, 1, 2, 3, 4, 5}, {0, 1, 2, 5}, "non-trivial"),
])
def test_core_preconditions(graph, a, b, precondition):
    with pytest.raises(PreconditionError) as info:
        core_component(graph, Separation(a, b))
    assert info.value.precondition == precondition


def test_core_requires_kuratowski_connected():
    j = resolve_graph("j")
    with pytest.raises(PreconditionError) as info:
        core_component(j, Separation({0, 1, 2, 3, 4}, {0, 1, 5, 6, 7, 8}))
    assert info.value.precondition == "kuratowski-connected"


def test_core_nesting():
    assert core_nesting_violations(k5_with_triangle_cap()) == []


def test_npl_keeps_non_planar_components():
    g = disjoint_union(complete_graph(5), cycle_graph(4))
    assert isomorphic(npl(g), complete_graph(5))


def test_separations_up_to_cycle():
    seps = separations_up_to(cycle_graph(4))
    assert [sorted(s.separator) for s in seps] == [[0, 2], [1, 3]]
    assert separations_up_to(complete_graph(5)) == []


def npl_corpus():
    named = list(load_named_graphs().values())
    planar_parts = [cycle_graph(4), path_graph(3), build(1, [])]
    yield from named
    yield k5_with_triangle_cap()
    for g in named[:3] + [complete_graph(5), complete_bipartite(3, 3)]:
        for p in planar_parts:
            yield disjoint_union(g, p)
    for seed in range(12):
        yield random_graph(7, 0.6, [seed, 11])


def test_npl_of_kuratowski_connected_graph_is_kuratowski_connected():
    checked = 0
    for g in npl_corpus():
        if not is_kuratowski_connected(g)[0]:
            continue
        core = npl(g)
        if core.n == 0:
            continue
        assert is_connected(core), g
        assert is_kuratowski_connected(core)[0], g
        checked += 1
    assert checked >= 5


def facial_pairs(max_edges):
    for g in small_graphs(max_edges):
        for cyc in nx.simple_cycles(to_networkx(g)):
            if len(cyc) >= 3 and is_facial(g, cyc):
                yield g, cyc


def assert_ring_blowups_kuratowski_connected(max_edges):
    seen = 0
    for g, cyc in facial_pairs(max_edges):
        blown = ring_blowup(g, cyc)
        ok, report = is_kuratowski_connected(blown)
        assert ok, (g.edges(), cyc, report)
        seen += 1
    assert seen > 0


def test_small_ring_blowups_are_kuratowski_connected():
    assert_ring_blowups_kuratowski_connected(5)


@pytest.mark.slow
def test_ring_blowups_up_to_twelve_vertices_are_kuratowski_connected():
    assert_ring_blowups_kuratowski_connected(6)
