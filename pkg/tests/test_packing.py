import pytest

from modules.certificates import check_cover, check_packing
from modules.errors import PreconditionError, SearchRefused
from modules.graph_core import complete_graph, cycle_graph, disjoint_union
from modules.graph_io import resolve_graph
from modules.minor_engine import MinorModel
from modules.packing import (PackingCert, copies_embed, cover, cover_growth_bound, ep_parameter,
                             extract_single_pattern, genus_bound, pack, packing_number)
from modules.surface_alg import Surface


@pytest.fixture
def two_k5():
    return disjoint_union(complete_graph(5), complete_graph(5))


def test_single_model_in_j(k5, budget):
    j = resolve_graph("j")
    result = pack([k5], j, 1, budget=budget)
    assert result.status == "found"
    assert check_packing(result.cert, j, [k5]) == []


def test_counting_bound_proves_absence(k5, budget):
    result = pack([k5], resolve_graph("j"), 2, budget=budget)
    assert result.status == "absent"
    assert result.upper == 1


def test_two_disjoint_k5(k5, two_k5, budget):
    result = pack([k5], two_k5, 2, budget=budget)
    assert result.status == "found"
    assert result.cert.size == 2
    assert check_packing(result.cert, two_k5, [k5]) == []


def test_packing_number_is_exact(k5, two_k5, budget):
    result = packing_number([k5], two_k5, budget=budget)
    assert result.status == "absent"
    assert result.exact
    assert result.lower == result.upper == 2
    assert result.cert.size == 2


def test_surface_bound_on_torus_grid(k33, torus_grid, budget):
    result = pack([k33], torus_grid.graph, 2, budget=budget, host_embedding=torus_grid.canonical_embedding)
    assert result.status == "absent"
    assert result.upper == 1
    assert result.lower == 1


def test_zero_target_is_trivially_found(k5):
    result = pack([k5], cycle_graph(3), 0)
    assert result.status == "found"
    assert result.cert.size == 0


@pytest.mark.parametrize("kwargs, precondition", [
    ({"multiplicity": 3}, "multiplicity"),
    ({"kind": "both"}, "kind"),
])
def test_pack_rejects_bad_arguments(k5, kwargs, precondition):
    with pytest.raises(PreconditionError) as info:
        pack([k5], k5, 1, **kwargs)
    assert info.value.precondition == precondition


def test_pack_rejects_empty_antichain(k5):
    with pytest.raises(PreconditionError):
        pack([], k5, 1)


def test_mixed_packings_are_vertex_disjoint(k5, k33):
    with pytest.raises(PreconditionError):
        pack([k5, k33], k5, 1, multiplicity=2, kind="mixed")


def test_mixed_packing(k5, k33, budget):
    g = disjoint_union(complete_graph(5), complete_graph(6))
    result = pack([k5, k33], g, 2, kind="mixed", budget=budget)
    assert result.status == "found"
    assert check_packing(result.cert, g, [k5, k33]) == []


def test_half_integral_models_use_distinct_vertex_sets(budget):
    k3, k4 = complete_graph(3), complete_graph(4)
    result = pack([k3], k4, 2, multiplicity=2, budget=budget)
    assert result.status == "found"
    assert check_packing(result.cert, k4, [k3]) == []
    sets = [m.vertices() for _, m in result.cert.hosts]
    assert len(set(sets)) == 2


def test_extract_single_pattern():
    k3, k4 = complete_graph(3), complete_graph(4)
    cert = PackingCert([(k3, {0: {0}, 1: {1}, 2: {2}}),
                        (k4, {0: {3}, 1: {4}, 2: {5}, 3: {6}}),
                        (k3, {0: {7}, 1: {8}, 2: {9}})], 1, "mixed")
    single = extract_single_pattern(cert, 2)
    assert single.kind == "single"
    assert single.size == 2
    with pytest.raises(PreconditionError):
        extract_single_pattern(cert, 3)
    with pytest.raises(PreconditionError):
        extract_single_pattern(cert, 2, z=[k3, k4])


def test_cover_of_j(k5, budget):
    j = resolve_graph("j")
    cert = cover([k5], j, 2, budget)
    assert cert.size == 1
    assert cert.optimal
    assert cert.lower_bound == 1
    assert check_cover(cert, j, [k5]) == []


def test_cover_of_two_k5(k5, two_k5, budget):
    cert = cover([k5], two_k5, 3, budget)
    assert cert.size == 2
    assert cert.attestation == {"0": "planar remainder"}


def test_cover_cap_too_small_is_refused(k5, two_k5, budget):
    with pytest.raises(SearchRefused):
        cover([k5], two_k5, 1, budget)


def test_cover_levels_refused_under_tiny_level_budget(k5):
    with pytest.raises(SearchRefused):
        cover([k5], k5, 2, level_budget=1)


def test_cover_checker_rejects_bad_vertices(k5):
    cert = cover([k5], k5, 1)
    cert.s = frozenset({17})
    assert check_cover(cert, k5, [k5])


def test_ep_on_cycle_is_degenerate(k5, c10, budget):
    result = ep_parameter([k5], c10, 2, budget)
    assert result.value == 0
    assert result.degenerate
    assert result.trace == [{"k": 1, "found": None}]


def test_copies_embed():
    torus, klein = Surface(1, 0), Surface(0, 2)
    k5 = complete_graph(5)
    assert copies_embed(k5, 1, torus)
    assert not copies_embed(k5, 2, torus)
    assert copies_embed(k5, 2, klein)


@pytest.mark.parametrize("pattern, surface, expected", [
    ("k5", Surface(1, 0), 2),
    ("k3,3", Surface(0, 1), 1),
    ("k4,4", Surface(2, 0), 3),
])
def test_genus_bound(pattern, surface, expected):
    assert genus_bound(resolve_graph(pattern), surface) == expected


@pytest.mark.parametrize("k, c, expected", [(5, 1, 2), (8, 2, 2), (3, 2, 0)])
def test_cover_growth_bound(k, c, expected):
    assert cover_growth_bound(k, c) == expected


def test_model_vertices():
    assert MinorModel({0: {1, 2}, 1: {4}}).vertices() == frozenset({1, 2, 4})
