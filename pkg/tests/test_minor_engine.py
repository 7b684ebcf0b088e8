import itertools

import numpy as np
import pytest

from modules import minor_engine
from modules.certificates import check_expansion, check_minor_model
from modules.errors import BudgetExhausted, InvariantViolation, PreconditionError
from modules.family_gen import random_graph
from modules.graph_core import (build, complete_bipartite, complete_graph, contract, cycle_graph, delete_edges,
                               delete_vertices, path_graph)
from modules.graph_io import resolve_graph
from modules.minor_engine import (MinorModel, compose_models, dense_clique_minor, heuristic_model, is_minor,
                                  minimize_host, naive_is_minor)
from modules.search_budget import SearchBudget


def subdivided(g):
    """Every edge of g replaced by a path of length two."""
    edges = []
    for i, (u, v) in enumerate(g.edges()):
        mid = g.n + i
        edges += [(u, mid), (mid, v)]
    return build(g.n + g.num_edges, edges)


def star(leaves):
    return build(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


@pytest.mark.parametrize("pattern, host", [
    ("k5", "k6"),
    ("k5", "petersen"),
    ("k3,3", "petersen"),
    ("k4", "grid:3,3"),
    ("k5", "j"),
    ("k3,3", "mobius:8"),
])
def test_positive_minors_come_with_valid_models(pattern, host, budget):
    h, g = resolve_graph(pattern), resolve_graph(host)
    model = is_minor(h, g, budget)
    assert model is not None
    assert check_minor_model(h, g, model) == []


@pytest.mark.parametrize("pattern, host", [
    ("k5", "grid:4,4"),
    ("k3,3", "cyl:2,5"),
    ("k3,3", "grid:4,4"),
])
def test_negative_minors(pattern, host, budget):
    assert is_minor(resolve_graph(pattern), resolve_graph(host), budget) is None


def test_k4_is_not_a_minor_of_a_cycle(c10, budget):
    assert is_minor(complete_graph(4), c10, budget) is None


def test_size_filter():
    assert is_minor(complete_graph(6), complete_graph(5)) is None


def test_empty_pattern():
    assert is_minor(build(0, []), cycle_graph(3)) == MinorModel({})


def test_valid_hint_is_returned_verbatim(k5):
    hint = {0: {0}, 1: {1}, 2: {2}, 3: {3}}
    model = is_minor(complete_graph(4), k5, hint=hint)
    assert model.branch == {u: frozenset(x) for u, x in hint.items()}


def test_invalid_hint_falls_back_to_search(k5):
    model = is_minor(complete_graph(4), k5, hint={0: {0, 1}, 1: {1}, 2: {2}, 3: {7}})
    assert model is not None
    assert check_minor_model(complete_graph(4), k5, model) == []


def test_search_respects_budget():
    with pytest.raises(BudgetExhausted):
        is_minor(complete_graph(6), resolve_graph("petersen"), SearchBudget(1, "tiny"))


SMALL_PAIRS = [
    (cycle_graph(3), cycle_graph(4)),
    (path_graph(3), cycle_graph(4)),
    (complete_graph(4), cycle_graph(5)),
    (star(3), cycle_graph(5)),
    (star(3), path_graph(5)),
    (complete_graph(4), build(5, [(0, 1), (1, 2), (2, 3), (3, 0)] + [(4, i) for i in range(4)])),
    (complete_bipartite(2, 3), complete_graph(4)),
    (cycle_graph(4), complete_bipartite(2, 3)),
]


@pytest.mark.parametrize("h, g", SMALL_PAIRS)
def test_agrees_with_naive_oracle(h, g):
    assert (is_minor(h, g) is not None) == naive_is_minor(h, g)


def test_dense_clique_minor_threshold(k5):
    shortcut = dense_clique_minor(k5, 5)
    assert shortcut.model is None
    assert shortcut.edges == 10
    assert shortcut.threshold == 2 ** 5 * 5


def test_dense_clique_minor_rejects_small_orders(k5):
    with pytest.raises(PreconditionError):
        dense_clique_minor(k5, 2)


def test_compose_models():
    first = {0: {0, 1}, 1: {2}}
    second = {0: {5}, 1: {6, 7}, 2: {8}}
    assert compose_models(first, second) == {0: frozenset({5, 6, 7}), 1: frozenset({8})}


def test_minimize_host_on_subdivided_k4():
    k4 = complete_graph(4)
    g = subdivided(k4)
    model = is_minor(k4, g)
    expansion = minimize_host(g, model, k4)
    assert check_expansion(k4, g, expansion) == []
    assert len(expansion.t) <= 16
    assert all(expansion.degree(v) == 2 for v in expansion.vertices - expansion.t)


def test_minimize_host_reads_pattern_off_model(k5):
    model = MinorModel({0: {0, 1}, 1: {2}, 2: {3}})
    expansion = minimize_host(k5, model)
    assert check_expansion(complete_graph(3), k5, expansion) == []


def test_minimize_host_rejects_invalid_model():
    with pytest.raises(PreconditionError):
        minimize_host(cycle_graph(4), {0: {0, 2}, 1: {1}}, build(2, [(0, 1)]))


def test_minimize_host_raises_when_terminals_overflow(monkeypatch):
    def sprawling_tree(g, members, terminals):
        if 0 in members:
            return set(range(7)), {(0, i) for i in range(1, 7)}
        return set(members), set()

    monkeypatch.setattr(minor_engine, "_steiner_tree", sprawling_tree)
    with pytest.raises(InvariantViolation):
        minimize_host(star(6), {0: {0}, 1: {1}}, build(2, [(0, 1)]))


def test_branch_sets_are_disjoint_in_every_model(k33, budget):
    model = is_minor(k33, resolve_graph("petersen"), budget)
    for a, b in itertools.combinations(model.branch.values(), 2):
        assert not a & b


def test_heuristic_is_deterministic_for_a_seed(k5):
    k4 = complete_graph(4)
    first = heuristic_model(k4, k5, seed=7)
    assert first is not None
    assert check_minor_model(k4, k5, first) == []
    assert heuristic_model(k4, k5, seed=7) == first


def test_heuristic_gives_up_without_a_model():
    assert heuristic_model(complete_graph(5), resolve_graph("grid:3,3"), seed=1) is None


def random_minor(g, steps, rng):
    """Apply `steps` random vertex deletions, edge deletions or contractions."""
    for _ in range(steps):
        edges = g.edges()
        move = int(rng.integers(0, 3))
        if move == 0 or not edges:
            g = delete_vertices(g, [int(rng.integers(0, g.n))])
        elif move == 1:
            g = delete_edges(g, [edges[int(rng.integers(0, len(edges)))]])
        else:
            g = contract(g, edges[int(rng.integers(0, len(edges)))])
    return g


@pytest.mark.parametrize("seed", range(10))
def test_minor_relation_is_transitive(seed, budget):
    rng = np.random.default_rng(seed)
    top = random_graph(7, 0.55, [seed, 3])
    middle = random_minor(top, 2, rng)
    bottom = random_minor(middle, 2, rng)
    lower = is_minor(bottom, middle, budget)
    upper = is_minor(middle, top, budget)
    assert lower is not None and upper is not None
    direct = is_minor(bottom, top, budget)
    assert direct is not None
    assert check_minor_model(bottom, top, compose_models(lower, upper)) == []
