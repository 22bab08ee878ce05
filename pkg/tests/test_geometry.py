import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.geometry import MultiPoint

from fatgraph.errors import DegenerateGeometry, InvalidObjectSet, ParseError
from fatgraph.geometry import (
    GeomObject,
    ObjectSet,
    build_intersection_graph,
    center_extent,
    dumps_object_set,
    gjk_distance,
    intersection_graph_all_pairs,
    loads_object_set,
    object_gap,
    polytope_inradius,
    separator_size_bound,
    slab_count,
    slab_separator,
    smallest_enclosing_ball,
)
from fatgraph.graphcore import connected_components

import oracles


def random_balls(rng, n, d, side):
    return ObjectSet(d, 1.0, tuple(GeomObject.ball([rng.uniform(0, side) for _ in range(d)], 0.5) for _ in range(n)))


def test_ball_gap_is_center_distance_minus_radii():
    a = GeomObject.ball((0, 0), 0.5)
    b = GeomObject.ball((3, 4), 0.5)
    assert object_gap(a, b) == pytest.approx(4.0)


@settings(max_examples=80)
@given(st.integers(0, 10**6))
def test_polygon_distance_matches_shapely(seed):
    rng = random.Random(seed)
    pa = [(rng.uniform(0, 3), rng.uniform(0, 3)) for _ in range(rng.randint(3, 7))]
    pb = [(rng.uniform(1, 5), rng.uniform(1, 5)) for _ in range(rng.randint(3, 7))]
    ha, hb = MultiPoint(pa).convex_hull, MultiPoint(pb).convex_hull
    assert gjk_distance(np.asarray(pa), np.asarray(pb)) == pytest.approx(ha.distance(hb), abs=1e-9)


def test_polytope_ball_gap():
    square = GeomObject.polytope([(0, 0), (1, 0), (1, 1), (0, 1)])
    ball = GeomObject.ball((3, 0.5), 0.5)
    assert object_gap(square, ball) == pytest.approx(1.5)
    assert square.declared_inradius == pytest.approx(0.5)
    assert square.declared_outdiameter == pytest.approx(math.sqrt(2))


def test_inradius_of_triangle():
    # 3-4-5 right triangle: inradius (3 + 4 - 5) / 2
    assert polytope_inradius([(0, 0), (3, 0), (0, 4)]) == pytest.approx(1.0)


def test_degenerate_polytopes():
    with pytest.raises(DegenerateGeometry):
        GeomObject.polytope([(1, 1), (1, 1), (1, 1)])
    with pytest.raises(DegenerateGeometry):
        polytope_inradius([(0, 0), (1, 1), (2, 2)])


@settings(max_examples=60)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=8))
def test_enclosing_ball_is_minimal(points):
    c, r = smallest_enclosing_ball(points)
    pts = np.asarray(points)
    assert np.all(np.linalg.norm(pts - c, axis=1) <= r + 1e-7)
    best = math.inf
    for p, q in itertools.combinations_with_replacement(range(len(points)), 2):
        center = (pts[p] + pts[q]) / 2
        rad = float(np.linalg.norm(pts - center, axis=1).max())
        best = min(best, rad)
    for p, q, s in itertools.combinations(range(len(points)), 3):
        a, b, cc = pts[p], pts[q], pts[s]
        m = np.asarray([b - a, cc - a])
        if abs(np.linalg.det(m)) < 1e-9:
            continue
        rhs = 0.5 * np.asarray([np.dot(b, b) - np.dot(a, a), np.dot(cc, cc) - np.dot(a, a)])
        center = np.linalg.solve(m, rhs)
        best = min(best, float(np.linalg.norm(pts - center, axis=1).max()))
    assert r <= best + 1e-7


def test_object_set_size_validation():
    with pytest.raises(InvalidObjectSet):
        ObjectSet(2, 1.0, (GeomObject.ball((0, 0), 0.25),))
    with pytest.raises(InvalidObjectSet):
        ObjectSet(2, 1.0, (GeomObject.ball((0, 0), 0.5), GeomObject.ball((0, 0, 0), 0.5)))
    with pytest.raises(InvalidObjectSet):
        ObjectSet(2, 0.5, ())


@pytest.mark.parametrize("d", [2, 3])
def test_kdtree_graph_matches_all_pairs(d):
    rng = random.Random(d)
    f = random_balls(rng, 150, d, 6.0)
    assert build_intersection_graph(f) == intersection_graph_all_pairs(f)


def test_mixed_objects_graph_matches_all_pairs():
    rng = random.Random(3)
    objs = []
    for _ in range(40):
        x, y = rng.uniform(0, 8), rng.uniform(0, 8)
        if rng.random() < 0.5:
            objs.append(GeomObject.ball((x, y), 0.5))
        else:
            objs.append(GeomObject.polytope([(x - 0.5, y - 0.5), (x + 0.5, y - 0.5), (x + 0.5, y + 0.5), (x - 0.5, y + 0.5)]))
    f = ObjectSet.normalized(2, objs)
    assert build_intersection_graph(f) == intersection_graph_all_pairs(f)


def test_graph_is_invariant_under_object_permutation():
    rng = random.Random(11)
    f = random_balls(rng, 80, 2, 6.0)
    g = build_intersection_graph(f)
    perm = list(range(80))
    rng.shuffle(perm)
    h = build_intersection_graph(ObjectSet(2, 1.0, tuple(f.objects[i] for i in perm)))
    assert {tuple(sorted((perm[u], perm[v]))) for u, v in h.edges()} == set(g.edges())


def test_tangent_balls_are_adjacent():
    f = ObjectSet(2, 1.0, (GeomObject.ball((0, 0), 0.5), GeomObject.ball((1, 0), 0.5), GeomObject.ball((2.1, 0), 0.5)))
    assert build_intersection_graph(f).edges() == [(0, 1)]


def test_slab_count():
    assert slab_count(16, 2) == 3
    assert slab_count(1, 2) == 2
    assert all(slab_count(n, d) ** (d + 1) >= n for n in range(1, 300) for d in (2, 3))


def test_far_apart_pair_separator():
    f = ObjectSet(2, 1.0, (GeomObject.ball((0.5, 0.5), 0.5), GeomObject.ball((40.5, 40.5), 0.5)))
    dec = slab_separator(f)
    assert len(dec.modulator) <= separator_size_bound(2, 2)


def test_disk_grid_separator():
    objs = [GeomObject.ball((0.9 * i + 0.3, 0.9 * j + 0.3), 0.5) for i in range(4) for j in range(4)]
    f = ObjectSet(2, 1.0, tuple(objs))
    dec = slab_separator(f)
    assert dec.info["p"] == 3
    assert len(dec.modulator) <= 12


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.sampled_from([2, 3]), st.integers(10, 300))
def test_separator_guarantees(seed, d, n):
    rng = random.Random(seed)
    f = random_balls(rng, n, d, (n * 2.0) ** (1 / d))
    dec = slab_separator(f)
    assert len(dec.modulator) <= separator_size_bound(n, d)
    p = dec.info["p"]
    for comp in dec.components:
        assert center_extent(f, comp) <= f.beta * f.scale * p
    g = build_intersection_graph(f)
    assert [set(c) for c in dec.components] == [set(c) for c in connected_components(g, dec.modulator)]
    removed = set(dec.modulator)
    comp_of = {v: i for i, c in enumerate(dec.components) for v in c}
    assert all(comp_of[u] == comp_of[v] for u, v in g.edges() if u not in removed and v not in removed)


def test_object_set_json_round_trip():
    objs = (GeomObject.ball((0.0, 1.0), 0.5, "a"), GeomObject.polytope([(0, 0), (1, 0), (1, 1), (0, 1)], label="sq"))
    f = ObjectSet.normalized(2, objs, tolerance=1e-10)
    g = loads_object_set(dumps_object_set(f))
    assert dumps_object_set(g) == dumps_object_set(f)
    assert g.tolerance == 1e-10 and [o.label for o in g.objects] == ["a", "sq"]


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        '{"dim": 2}',
        '{"dim": 2, "beta": 1, "objects": [{"id": 1, "kind": "ball", "center": [0, 0], "radius": 0.5}]}',
        '{"dim": 2, "beta": 1, "objects": [{"id": 0, "kind": "cone"}]}',
    ],
)
def test_object_set_parse_errors(text):
    with pytest.raises(ParseError):
        loads_object_set(text)


def test_independent_alpha_oracle_agrees_on_geometric_graph():
    rng = random.Random(5)
    f = random_balls(rng, 14, 2, 3.0)
    g = build_intersection_graph(f)
    from fatgraph.graphcore import independence_number

    assert independence_number(g)[0] == oracles.alpha(g)
