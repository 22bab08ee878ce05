import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fatgraph.errors import CapExceeded, ParseError
from fatgraph.geometry import GeomObject, ObjectSet, geometric_alpha_certificate
from fatgraph.graphcore import Graph, independence_number_of
from fatgraph.modulator import (
    ModulatorDecomposition,
    amod_exact,
    decomposition_from_geometry,
    join_graph,
    loads_decomposition,
    random_verified_modulator,
    two_level_bags,
    verify_modulator,
)

import oracles


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def test_whole_vertex_set_is_a_modulator():
    g = cycle(7)
    assert verify_modulator(g, range(7), 7)


def test_c6_without_modulator_fails():
    assert not verify_modulator(cycle(6), [], 2)
    assert verify_modulator(cycle(6), [], 3)


def test_verify_modulator_matches_definition():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(1, 12)
        g = oracles.random_graph(rng, n, rng.uniform(0.1, 0.7))
        s = rng.sample(range(n), rng.randint(0, n))
        k = rng.randint(0, 5)
        assert verify_modulator(g, s, k) == oracles.is_modulator(g, s, k)


def test_verify_modulator_cap():
    g = Graph.from_edges(10, [(i, i + 1) for i in range(9)])
    with pytest.raises(CapExceeded):
        verify_modulator(g, [], 4, cap=8)


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_amod_of_complete_and_edgeless(n):
    assert amod_exact(Graph.from_edges(n, itertools.combinations(range(n), 2)))[0] == 1
    assert amod_exact(Graph.from_edges(n, []))[0] == 1


def test_amod_empty_graph_and_cap():
    assert amod_exact(Graph.from_edges(0, [])) == (0, ())
    with pytest.raises(CapExceeded):
        amod_exact(Graph.from_edges(19, []))


def test_amod_upper_bounds_and_minimality():
    rng = random.Random(2)
    for _ in range(120):
        n = rng.randint(1, 7)
        g = oracles.random_graph(rng, n, rng.uniform(0.1, 0.8))
        k, s = amod_exact(g)
        assert oracles.is_modulator(g, s, k)
        assert k <= oracles.alpha(g)
        assert k <= max(oracles.min_vertex_cover(g), 1)
        if k > 0:
            assert not any(
                oracles.is_modulator(g, t, k - 1) for size in range(k) for t in itertools.combinations(range(n), size)
            )


def test_amod_witness_is_first_in_order():
    # on the path 0-1-2, S = {} leaves alpha 2 and S = {0} is the first size-1 set
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert amod_exact(g) == (1, (0,))


def test_join_small_cases():
    assert join_graph(Graph.from_edges(1, [])).edges() == [(0, 1)]
    c4 = join_graph(Graph.from_edges(2, []))
    assert sorted(c4.edges()) == [(0, 2), (0, 3), (1, 2), (1, 3)]


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_join_preserves_alpha_and_doubles_omega(seed):
    rng = random.Random(seed)
    g = oracles.random_graph(rng, rng.randint(1, 7), rng.uniform(0, 1))
    j = join_graph(g)
    assert oracles.alpha(j) == oracles.alpha(g)
    assert oracles.clique_number(j) == 2 * oracles.clique_number(g)


def test_two_level_bags_have_alpha_at_most_twice_width():
    rng = random.Random(3)
    for _ in range(60):
        n = rng.randint(1, 12)
        g = oracles.random_graph(rng, n, rng.uniform(0.1, 0.6))
        dec = random_verified_modulator(g, rng, 5)
        for bag in two_level_bags(dec):
            assert oracles.alpha(g, bag) <= 2 * dec.k


def test_decomposition_checks_components():
    g = cycle(5)
    with pytest.raises(ValueError):
        ModulatorDecomposition(g, (0,), ((1, 2),), (1,), 1)
    dec = ModulatorDecomposition.create(g, [0])
    assert dec.components == ((1, 2, 3, 4),) and dec.alpha_bounds == (2,) and dec.k == 2


def test_decomposition_json_round_trip_and_errors():
    g = cycle(6)
    dec = ModulatorDecomposition.create(g, [0, 3])
    back = loads_decomposition(g, dec.dumps())
    assert back.to_json() == dec.to_json()
    with pytest.raises(ParseError):
        loads_decomposition(g, '{"modulator": [0], "components": [[1]], "alpha_bounds": [1]}')
    with pytest.raises(ParseError):
        loads_decomposition(g, '{"modulator": [0, 3], "components": [[1, 2], [4, 5]], "alpha_bounds": [1, 1], "k": 9}')
    with pytest.raises(ParseError):
        loads_decomposition(g, "[")


def test_single_ball_decomposition():
    dec = decomposition_from_geometry(ObjectSet(2, 1.0, (GeomObject.ball((0, 0), 0.5),)))
    assert dec.modulator == () and dec.components == ((0,),) and dec.k == 1


def test_disk_grid_decomposition_width():
    objs = [GeomObject.ball((0.9 * i + 0.3, 0.9 * j + 0.3), 0.5) for i in range(4) for j in range(4)]
    dec = decomposition_from_geometry(ObjectSet(2, 1.0, tuple(objs)))
    assert dec.k <= max(12, geometric_alpha_certificate(16, 2, 1.0))
    for comp, b in zip(dec.components, dec.alpha_bounds):
        assert independence_number_of(dec.graph, comp) <= b


def test_geometric_decompositions_are_valid_modulators():
    rng = random.Random(4)
    for _ in range(50):
        n = rng.randint(5, 60)
        objs = tuple(GeomObject.ball((rng.uniform(0, 7), rng.uniform(0, 7)), 0.5) for _ in range(n))
        dec = decomposition_from_geometry(ObjectSet(2, 1.0, objs))
        assert verify_modulator(dec.graph, dec.modulator, dec.k)
        for comp, b in zip(dec.components, dec.alpha_bounds):
            assert oracles.alpha(dec.graph, comp) <= b
