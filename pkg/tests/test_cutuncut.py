import itertools
import random

import pytest

from fatgraph.cutuncut import (
    A_SIDE,
    B_SIDE,
    CutSolution,
    CutUncutDP,
    CutUncutInstance,
    SteinerGuess,
    brute_cutuncut,
    brute_zero_cut,
    constrained_component_cut,
    cut_weight,
    default_steiner_cap,
    enumerate_steiner_guesses,
    is_feasible,
    loads_instance,
    solve_cutuncut,
    tab0,
    verify_cut_solution,
)
from fatgraph.errors import CapExceeded, Infeasible, ParseError
from fatgraph.geometry import GeomObject, ObjectSet, build_intersection_graph
from fatgraph.graphcore import Graph
from fatgraph.modulator import ModulatorDecomposition, random_verified_modulator

import oracles


def random_instance(rng, n_max=10, terminals=2):
    n = rng.randint(2, n_max)
    g = oracles.random_graph(rng, n, rng.uniform(0.15, 0.6), weights=9)
    vs = list(range(n))
    rng.shuffle(vs)
    a = rng.randint(1, min(terminals, n - 1))
    b = rng.randint(1, min(terminals, n - a))
    return CutUncutInstance.create(g, vs[:a], vs[a : a + b])


def test_instance_validation_and_json():
    g = Graph.from_edges(3, [(0, 1, 2), (1, 2, 3)])
    with pytest.raises(ValueError):
        CutUncutInstance.create(g, [0], [0])
    with pytest.raises(ValueError):
        CutUncutInstance.create(g, [], [1])
    inst = CutUncutInstance.create(g, [0], [2])
    back = loads_instance(inst.dumps())
    assert back.graph == g and back.s_terminals == (0,) and back.t_terminals == (2,)
    with pytest.raises(ParseError):
        loads_instance('{"graph": {"n": 2}, "S": [0], "T": [1]}')


def test_feasibility_requires_connected_terminal_sets():
    path = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    inst = CutUncutInstance.create(path, [0, 2], [1])
    assert not is_feasible(inst, [0, 1, 0])
    assert brute_cutuncut(inst) is None
    inst2 = CutUncutInstance.create(path, [0], [2])
    sol = brute_cutuncut(inst2)
    assert sol.weight == 1 and verify_cut_solution(inst2, sol)


def test_brute_matches_reference():
    rng = random.Random(20)
    for _ in range(150):
        inst = random_instance(rng, 9)
        sol = brute_cutuncut(inst)
        want = oracles.cut_optimum(inst.graph, inst.s_terminals, inst.t_terminals)
        assert (sol.weight if sol else None) == want
        if sol:
            assert verify_cut_solution(inst, sol)
            assert cut_weight(inst.graph, sol.side) == sol.weight


def test_brute_cap():
    g = Graph.from_edges(25, [(i, i + 1, 1) for i in range(24)])
    with pytest.raises(CapExceeded):
        brute_cutuncut(CutUncutInstance.create(g, [0], [24]))


def test_zero_cut_matches_brute():
    rng = random.Random(21)
    for _ in range(200):
        n = rng.randint(2, 11)
        g = oracles.random_graph(rng, n, rng.uniform(0.2, 0.6), weights=1)
        vs = rng.sample(range(n), 2 if n < 4 else 4)
        half = len(vs) // 2
        inst = CutUncutInstance.create(g, vs[:half], vs[half:])
        sol = brute_cutuncut(inst)
        z = brute_zero_cut(inst)
        assert (z is not None) == (sol is not None and sol.weight == 0)
        if z:
            assert verify_cut_solution(inst, z) and z.weight == 0


def _subsets(items):
    return [frozenset(c) for r in range(1, len(items) + 1) for c in itertools.combinations(items, r)]


def _reference_guess_count(g, comp, k, cap):
    """Count bundles straight from the definition by filtering all subset families."""
    indep = [s for s in _subsets(comp) if not any(g.has_edge(u, v) for u, v in itertools.combinations(s, 2))]

    def connected(z):
        return len(oracles.components(g, [v for v in range(g.vertex_count) if v not in z])) == 1

    supersets = {s: [z for z in _subsets(comp) if s <= z and len(z) <= cap and connected(z)] for s in indep}
    fams = []
    for r in range(0, 2 * k + 1):
        for fam in itertools.combinations(indep, r):
            if sum(map(len, fam)) <= 2 * k and all(not (a & b) for a, b in itertools.combinations(fam, 2)):
                fams.append(fam)
    total = 0
    for fa in fams:
        for fb in fams:
            if sum(map(len, fa)) + sum(map(len, fb)) > 2 * k:
                continue
            used = frozenset().union(*fa) if fa else frozenset()
            if any(b & used for b in fb):
                continue
            count = 1
            for s in fa + fb:
                count *= len(supersets[s])
            total += count
    return total


@pytest.mark.parametrize("k,cap", [(1, 4), (1, 2), (2, 4)])
def test_p4_guess_count_matches_definition(k, cap):
    p4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    got = sum(1 for _ in enumerate_steiner_guesses(range(4), p4, k, cap))
    assert got == _reference_guess_count(p4, range(4), k, cap)


def test_guess_bundle_shape():
    p4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    for guess in enumerate_steiner_guesses(range(4), p4, 1, 4):
        used = [v for s in guess.a_sets + guess.b_sets for v in s]
        assert len(used) == len(set(used)) <= 2
        for s, z in zip(guess.a_sets + guess.b_sets, guess.x_sets + guess.y_sets):
            assert set(s) <= set(z)


def test_pruned_guesses_cover_every_assignment_at_full_cap():
    rng = random.Random(22)
    for _ in range(30):
        n = rng.randint(1, 7)
        g = oracles.random_graph(rng, n, rng.uniform(0.2, 0.7))
        comp = list(range(n))
        k = max(1, oracles.alpha(g))
        sides = set()
        for guess in enumerate_steiner_guesses(comp, g, k, None, prune=True):
            fa = {v for z in guess.x_sets for v in z}
            fb = {v for z in guess.y_sets for v in z}
            if len(fa) + len(fb) == n:
                sides.add(tuple(A_SIDE if v in fa else B_SIDE for v in comp))
        assert len(sides) == 2**n


def test_constrained_cut_infeasible_pattern():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    inst = CutUncutInstance.create(g, [0], [2])
    bad = SteinerGuess(((1,),), (), ((1,),), ())
    with pytest.raises(Infeasible):
        constrained_component_cut(g, {0: A_SIDE, 2: B_SIDE}, [1], SteinerGuess((), (), ((1,),), ((1,),)), inst)
    side, w = constrained_component_cut(g, {0: A_SIDE, 2: B_SIDE}, [1], bad, inst)
    assert side[1] == A_SIDE and w == 1


def test_tab0_is_every_modulator_assignment():
    rng = random.Random(23)
    for _ in range(40):
        inst = random_instance(rng, 10)
        g = inst.graph
        x = sorted(rng.sample(range(g.vertex_count), rng.randint(0, min(6, g.vertex_count))))
        table = tab0(inst, x)
        want = {}
        for bits in itertools.product((0, 1), repeat=len(x)):
            side = dict(zip(x, bits))
            if any(side.get(v, A_SIDE) != A_SIDE for v in inst.s_terminals):
                continue
            if any(side.get(v, B_SIDE) != B_SIDE for v in inst.t_terminals):
                continue
            w = sum(g.weight(u, v) for u, v in g.edges() if u in side and v in side and side[u] != side[v])
            sigma = sum(b << i for i, b in enumerate(bits))
            want[sigma] = w
        assert {s.sigma: w for s, w in table.items()} == want
        for s in table:
            for sd, blocks, marks, terms in ((A_SIDE, s.pi_a, s.mu_a, inst.s_terminals), (B_SIDE, s.pi_b, s.mu_b, inst.t_terminals)):
                members = [x[i] for i in range(len(x)) if ((s.sigma >> i) & 1) == sd]
                got = sorted(sorted(x[i] for i in range(len(x)) if (b >> i) & 1) for b in blocks)
                sub = [c for c in oracles.components(g, [v for v in range(g.vertex_count) if v not in members])]
                assert got == sorted(sorted(c) for c in sub)
                marked = {b for b in blocks if any(x[i] in terms for i in range(len(x)) if (b >> i) & 1)}
                assert set(marks) == marked


@pytest.mark.parametrize("transitions", ["guess", "enumerate"])
def test_dp_matches_brute(transitions):
    rng = random.Random(24 if transitions == "guess" else 25)
    for _ in range(60):
        inst = random_instance(rng, 10)
        dec = random_verified_modulator(inst.graph, rng, 5)
        sol = solve_cutuncut(inst, dec, transitions=transitions)
        ref = brute_cutuncut(inst)
        assert (sol.weight if sol else None) == (ref.weight if ref else None)
        if sol:
            assert verify_cut_solution(inst, sol)


def test_dp_with_many_terminals():
    rng = random.Random(26)
    for _ in range(40):
        inst = random_instance(rng, 10, terminals=4)
        dec = random_verified_modulator(inst.graph, rng, 4)
        sol = solve_cutuncut(inst, dec)
        ref = brute_cutuncut(inst)
        assert (sol.weight if sol else None) == (ref.weight if ref else None)


def test_weight_scaling_and_monotonicity():
    rng = random.Random(27)
    for _ in range(30):
        inst = random_instance(rng, 9)
        g = inst.graph
        dec = random_verified_modulator(g, rng, 4)
        base = solve_cutuncut(inst, dec)
        c = rng.randint(2, 5)
        scaled = g.with_weights({e: c * g.weight(*e) for e in g.edges()})
        sdec = ModulatorDecomposition.create(scaled, dec.modulator)
        s_inst = CutUncutInstance.create(scaled, inst.s_terminals, inst.t_terminals)
        got = solve_cutuncut(s_inst, sdec)
        assert (got.weight if got else None) == (c * base.weight if base else None)
        if g.edges():
            e = rng.choice(g.edges())
            heavier = g.with_weights({**{f: g.weight(*f) for f in g.edges()}, e: g.weight(*e) + 3})
            h_inst = CutUncutInstance.create(heavier, inst.s_terminals, inst.t_terminals)
            h = solve_cutuncut(h_inst, ModulatorDecomposition.create(heavier, dec.modulator))
            if base:
                assert base.weight <= h.weight <= base.weight + 3


def test_small_steiner_cap_gives_upper_bound():
    rng = random.Random(28)
    for _ in range(30):
        inst = random_instance(rng, 10)
        dec = random_verified_modulator(inst.graph, rng, 4)
        ref = brute_cutuncut(inst)
        sol = solve_cutuncut(inst, dec, steiner_cap=1)
        if sol:
            assert verify_cut_solution(inst, sol)
            assert sol.weight >= ref.weight


def test_default_steiner_cap():
    objs = tuple(GeomObject.ball((0.8 * i, 0.0), 0.5) for i in range(6))
    f = ObjectSet(2, 1.0, objs)
    g = build_intersection_graph(f)
    assert default_steiner_cap(g, range(6)) == 6
    assert 1 <= default_steiner_cap(g, range(6), f) <= 6


def test_dp_rejects_unknown_transition_mode():
    g = Graph.from_edges(2, [(0, 1, 1)])
    inst = CutUncutInstance.create(g, [0], [1])
    with pytest.raises(ValueError):
        CutUncutDP(inst, ModulatorDecomposition.create(g, []), transitions="magic")


def test_solution_sides():
    sol = CutSolution((0, 1, 1, 0), 3)
    assert sol.a_side == (0, 3) and sol.b_side == (1, 2)
