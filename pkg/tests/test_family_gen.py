import pytest

from modules.certificates import check_minor_model, check_packing
from modules.embedder import is_planar, verify_embedding
from modules.errors import ConfigError, NonFacialCycleError, PreconditionError
from modules.family_gen import (FamilySpec, annulus_half_packing, canonical_embedding, exceptional_face_report,
                                expected_counts, family_minor_model, generate, graph_j, is_facial,
                                mobius_ladder, parse_family_token, petersen_family, random_graph, ring_blowup)
from modules.graph_core import complete_bipartite, complete_graph, induced, is_connected, isomorphic, same_graph
from modules.surface_alg import SPHERE, Surface


@pytest.mark.parametrize("token", [
    "dyck:1,0,0", "dyck:2,1,0", "dyck:2,0,1", "dyck:3,1,1", "dyck:2,0,2",
    "svg:1", "svg:3", "annulus:2", "handle:2", "crosscap:3", "cyl:3,5", "grid:3,4", "mobius:8",
])
def test_counts_match_closed_forms(token):
    spec = parse_family_token(token)
    g = generate(spec).graph
    assert (g.n, g.num_edges) == expected_counts(spec)


def test_dyck_counts_by_hand():
    g = generate(parse_family_token("dyck:2,1,0")).graph
    assert (g.n, g.num_edges) == (32, 52)


def test_small_identities():
    assert isomorphic(generate(parse_family_token("svg:1")).graph, complete_graph(4))
    assert isomorphic(mobius_ladder(6), complete_bipartite(3, 3))
    assert isomorphic(ring_blowup(complete_graph(4), (0, 1, 2)), complete_graph(7))


def test_ring_blowup_rejects_non_facial_cycle():
    assert not is_facial(complete_graph(4), (0, 1, 2, 3))
    with pytest.raises(NonFacialCycleError) as info:
        ring_blowup(complete_graph(4), (0, 1, 2, 3))
    assert info.value.counterexample_edges


def test_ring_blowup_rejects_non_cycle():
    with pytest.raises(PreconditionError):
        ring_blowup(complete_bipartite(3, 3), (0, 1, 2))


def test_graph_j_is_k5_and_k33_on_an_edge():
    j = graph_j()
    assert (j.n, j.num_edges) == (9, 18)
    assert not is_planar(j).planar


def test_petersen_family_members():
    family = petersen_family()
    assert len(family) == 7
    assert isomorphic(family[0], complete_graph(6))
    assert all(g.num_edges == 15 for g in family)


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("h, c", [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])
def test_canonical_embedding_lives_on_its_surface(k, h, c):
    spec = FamilySpec(family="dyck", k=k, h=h, c=c)
    gen = generate(spec)
    assert verify_embedding(gen.graph, gen.canonical_embedding) == Surface(h, c)


@pytest.mark.parametrize("token", ["annulus:3", "grid:3,4", "wall:4", "cyl:2,5"])
def test_planar_families_embed_in_the_sphere(token):
    gen = generate(parse_family_token(token))
    assert verify_embedding(gen.graph, gen.canonical_embedding) == SPHERE


def test_wall_has_degree_at_most_three():
    g = generate(parse_family_token("wall:4")).graph
    assert 2 <= g.min_degree() and g.max_degree() <= 3


def test_canonical_embedding_missing_for_complete_graphs():
    with pytest.raises(PreconditionError):
        canonical_embedding(parse_family_token("k5"))


def test_exceptional_face_report_is_consistent():
    gen = generate(FamilySpec(family="dyck", k=2, h=1, c=0))
    report = exceptional_face_report(gen)
    assert report["simple_expected"] == 16
    assert report["exceptional_expected"] == 16
    assert sum(report["face_lengths"]) == 2 * gen.graph.num_edges
    assert isinstance(report["matches"], bool)


def test_exceptional_face_report_needs_dyck_family():
    with pytest.raises(PreconditionError):
        exceptional_face_report(generate(parse_family_token("annulus:2")))


def test_tags():
    gen = generate(FamilySpec(family="dyck", k=2, h=0, c=1))
    assert len(gen.tags["cycles"]) == 2
    assert len(gen.tags["simple_cycle"]) == 16
    assert len(gen.tags["transaction_edges"]) == 4
    assert gen.degenerate
    assert not generate(FamilySpec(family="dyck", k=3, h=0, c=1)).degenerate


@pytest.mark.parametrize("small, large", [
    ("annulus:1", "annulus:3"),
    ("svg:1", "svg:2"),
    ("cyl:2,4", "cyl:3,7"),
    ("grid:2,2", "grid:3,4"),
    ("dyck:1,1,0", "dyck:2,1,0"),
    ("dyck:1,0,1", "dyck:3,0,1"),
])
def test_family_minor_models_are_valid(small, large):
    s, l = parse_family_token(small), parse_family_token(large)
    model = family_minor_model(s, l)
    assert model is not None
    assert check_minor_model(generate(s).graph, generate(l).graph, model) == []


def test_family_minor_model_declines_mismatches():
    assert family_minor_model(parse_family_token("dyck:1,1,0"), parse_family_token("dyck:2,0,1")) is None
    assert family_minor_model(parse_family_token("annulus:3"), parse_family_token("annulus:2")) is None


def test_annulus_half_packing_certificate():
    cert = annulus_half_packing(1, 3)
    host = generate(FamilySpec(family="annulus", k=3)).graph
    assert cert.size == 3 and cert.multiplicity == 2
    assert check_packing(cert, host) == []


@pytest.mark.parametrize("token", ["dyck:1,0,3", "wall:2", "mobius:7", "zzz", "petersen:9"])
def test_bad_tokens(token):
    with pytest.raises(ConfigError):
        parse_family_token(token)


@pytest.mark.parametrize("token", ["dyck:2,1,0", "svg:3", "k3,3", "k7", "mobius:8", "grid:3,4", "j"])
def test_token_round_trip(token):
    spec = parse_family_token(token)
    assert parse_family_token(spec.token()) == spec


def test_dyck_template_needs_order():
    with pytest.raises(PreconditionError):
        generate(FamilySpec(family="dyck", h=1, c=0))


def test_random_graph_is_seeded():
    assert same_graph(random_graph(8, 0.5, 3), random_graph(8, 0.5, 3))


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_wall_perimeter_is_one_cycle(k):
    gen = generate(FamilySpec(family="wall", k=k))
    rim, _ = induced(gen.graph, gen.tags["perimeter"])
    assert rim.n == len(gen.tags["perimeter"])
    assert set(rim.degrees()) == {2}
    assert is_connected(rim)
