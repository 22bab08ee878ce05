"""Two Sets Cut-Uncut: brute force, Steiner guessing, constrained cuts and the DP.

Sides are encoded per vertex as ``0`` (the A side, holding S) and ``1`` (the
B side, holding T). A cut is feasible when S lies inside one component of
``G[A]`` and T inside one component of ``G[B]``.

DP states over the modulator ``X`` are
``(sigma, Pi_A, Pi_B, mu_A, mu_B, closed_A, closed_B)``. ``sigma`` is a
bitmask over modulator positions (bit set = B), partitions are tuples of
position bitmasks sorted by lowest bit, and marks are the subtuples of blocks
reaching a terminal. ``closed_X`` records that the whole terminal set already
sits in a finished component that never touches the modulator; such a
component is invisible to the partitions and would otherwise be lost.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Any, Iterator, Mapping, Sequence

from .errors import CapExceeded, Infeasible, ParseError
from .graphcore import (
    Graph,
    greedy_kappa_partition,
    induced_subgraph,
    iter_bits,
    mask_components,
    max_flow_min_cut,
    to_mask,
)
from .modulator import ModulatorDecomposition

BRUTE_CAP = 20
A_SIDE, B_SIDE = 0, 1


@dataclass(frozen=True, eq=False)
class CutUncutInstance:
    graph: Graph
    s_terminals: tuple[int, ...]
    t_terminals: tuple[int, ...]

    def __post_init__(self) -> None:
        s, t = set(self.s_terminals), set(self.t_terminals)
        if not s or not t:
            raise ValueError("S and T must be nonempty")
        if s & t:
            raise ValueError(f"S and T intersect in {sorted(s & t)}")
        if not all(0 <= v < self.graph.vertex_count for v in s | t):
            raise ValueError("terminal out of range")

    @classmethod
    def create(cls, graph: Graph, s: Sequence[int], t: Sequence[int]) -> CutUncutInstance:
        return cls(graph, tuple(sorted(set(s))), tuple(sorted(set(t))))

    def to_json(self) -> dict[str, Any]:
        g = self.graph
        return {
            "graph": {"n": g.vertex_count, "edges": [[u, v, g.weight(u, v)] for u, v in g.edges()]},
            "S": list(self.s_terminals),
            "T": list(self.t_terminals),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json()) + "\n"


def instance_from_json(data: Mapping[str, Any]) -> CutUncutInstance:
    try:
        gd = data["graph"]
        n = int(gd["n"])
        edges = [(int(u), int(v), int(w)) for u, v, w in gd["edges"]]
        s = [int(v) for v in data["S"]]
        t = [int(v) for v in data["T"]]
        return CutUncutInstance.create(Graph.from_edges(n, edges), s, t)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad cut-uncut instance: {exc}") from exc


def loads_instance(text: str) -> CutUncutInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return instance_from_json(data)


@dataclass(frozen=True)
class CutSolution:
    side: tuple[int, ...]
    weight: int

    @property
    def a_side(self) -> tuple[int, ...]:
        return tuple(v for v, s in enumerate(self.side) if s == A_SIDE)

    @property
    def b_side(self) -> tuple[int, ...]:
        return tuple(v for v, s in enumerate(self.side) if s == B_SIDE)


def cut_weight(g: Graph, side: Sequence[int]) -> int:
    return sum(g.weight(u, v) for u, v in g.edges() if side[u] != side[v])


def _reach(masks: Sequence[int], start: int, live: int) -> int:
    seen = start & live
    frontier = seen
    while frontier:
        grow = 0
        for v in iter_bits(frontier):
            grow |= masks[v]
        frontier = grow & live & ~seen
        seen |= frontier
    return seen


def _together(masks: Sequence[int], terms: int, live: int) -> bool:
    """True iff the vertices of ``terms`` lie in one component of ``live``."""
    if terms & ~live:
        return False
    low = terms & -terms
    return terms & ~_reach(masks, low, live) == 0


def is_feasible(inst: CutUncutInstance, side: Sequence[int]) -> bool:
    g = inst.graph
    if len(side) != g.vertex_count or any(s not in (0, 1) for s in side):
        return False
    a = to_mask(v for v in range(g.vertex_count) if side[v] == A_SIDE)
    b = ((1 << g.vertex_count) - 1) & ~a
    return _together(g.masks, to_mask(inst.s_terminals), a) and _together(
        g.masks, to_mask(inst.t_terminals), b
    )


def verify_cut_solution(inst: CutUncutInstance, sol: CutSolution) -> bool:
    return is_feasible(inst, sol.side) and cut_weight(inst.graph, sol.side) == sol.weight


def brute_cutuncut(inst: CutUncutInstance, cap: int | None = BRUTE_CAP) -> CutSolution | None:
    """Minimum feasible cut over all side vectors; ties go to the lexicographically smallest."""
    g = inst.graph
    n = g.vertex_count
    if cap is not None and n > cap:
        raise CapExceeded(f"brute cut-uncut capped at {cap} vertices, graph has {n}")
    fixed = set(inst.s_terminals) | set(inst.t_terminals)
    free = [v for v in range(n) if v not in fixed]
    base = [A_SIDE] * n
    for v in inst.t_terminals:
        base[v] = B_SIDE
    edges = [(u, v, g.weight(u, v)) for u, v in g.edges()]
    best: CutSolution | None = None
    f = len(free)
    for code in range(1 << f):
        side = list(base)
        for i, v in enumerate(free):
            side[v] = (code >> (f - 1 - i)) & 1
        w = sum(wt for u, v, wt in edges if side[u] != side[v])
        if best is not None and w >= best.weight:
            continue
        if is_feasible(inst, side):
            best = CutSolution(tuple(side), w)
    return best


def brute_zero_cut(inst: CutUncutInstance) -> CutSolution | None:
    """Search for a feasible cut of weight 0.

    A weight-0 cut keeps every positive-weight edge uncut, so each connected
    class of positive edges is monochromatic. Classes are assigned by depth
    first search, pruned whenever S (resp. T) is no longer connected inside
    its side plus the unassigned vertices.
    """
    g = inst.graph
    n = g.vertex_count
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges():
        if g.weight(u, v) > 0:
            parent[find(u)] = find(v)
    classes: dict[int, int] = {}
    for v in range(n):
        r = find(v)
        classes[r] = classes.get(r, 0) | (1 << v)
    smask, tmask = to_mask(inst.s_terminals), to_mask(inst.t_terminals)
    a = b = 0
    free: list[int] = []
    for cls in classes.values():
        hs, ht = bool(cls & smask), bool(cls & tmask)
        if hs and ht:
            return None
        if hs:
            a |= cls
        elif ht:
            b |= cls
        else:
            free.append(cls)
    free.sort(key=lambda c: (-c.bit_count(), c & -c))
    masks = g.masks
    full = (1 << n) - 1

    def dfs(i: int, a: int, b: int) -> int | None:
        rest = full & ~(a | b)
        if not _together(masks, smask, a | rest) or not _together(masks, tmask, b | rest):
            return None
        if i == len(free):
            return a
        for put_a in (True, False):
            got = dfs(i + 1, a | free[i], b) if put_a else dfs(i + 1, a, b | free[i])
            if got is not None:
                return got
        return None

    got = dfs(0, a, b)
    if got is None:
        return None
    side = tuple(A_SIDE if (got >> v) & 1 else B_SIDE for v in range(n))
    return CutSolution(side, cut_weight(g, side))


# ---------------------------------------------------------------------------
# Steiner guesses


@dataclass(frozen=True)
class SteinerGuess:
    a_sets: tuple[tuple[int, ...], ...]
    b_sets: tuple[tuple[int, ...], ...]
    x_sets: tuple[tuple[int, ...], ...]
    y_sets: tuple[tuple[int, ...], ...]


def _independent_subsets(masks: Sequence[int], live: int, max_size: int) -> list[int]:
    verts = list(iter_bits(live))
    out: list[int] = []

    def rec(i: int, chosen: int, banned: int, size: int) -> None:
        if chosen:
            out.append(chosen)
        if size == max_size:
            return
        for j in range(i, len(verts)):
            v = verts[j]
            if not (banned >> v) & 1:
                rec(j + 1, chosen | (1 << v), banned | masks[v], size + 1)

    rec(0, 0, 0, 0)
    out.sort()
    return out


def _families(sets: list[int], forbidden: int, budget: int) -> Iterator[tuple[int, ...]]:
    """Tuples of pairwise disjoint sets (in list order) avoiding ``forbidden``, sizes summing to ``<= budget``."""

    def rec(start: int, used: int, left: int, acc: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        yield acc
        for j in range(start, len(sets)):
            s = sets[j]
            c = s.bit_count()
            if c <= left and not s & used:
                yield from rec(j + 1, used | s, left - c, acc + (s,))

    yield from rec(0, forbidden, budget, ())


def _connected_supersets(masks: Sequence[int], core: int, region: int, cap: int) -> list[int]:
    """Every ``core ⊆ Z ⊆ region`` with ``G[Z]`` connected and ``|Z| <= cap``."""
    extra = list(iter_bits(region & ~core))
    room = cap - core.bit_count()
    out = []
    if room < 0:
        return out
    for size in range(0, min(room, len(extra)) + 1):
        for pick in combinations(extra, size):
            z = core | to_mask(pick)
            if len(mask_components(masks, z)) == 1:
                out.append(z)
    out.sort()
    return out


def _closed_nbhd(masks: Sequence[int], s: int, live: int) -> int:
    out = s
    for v in iter_bits(s):
        out |= masks[v]
    return out & live


def _pure_guesses(
    masks: Sequence[int], live: int, k: int, cap: int
) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], tuple[int, ...]]]:
    budget = 2 * k
    indep = _independent_subsets(masks, live, budget)
    for a_fam in _families(indep, 0, budget):
        a_used = 0
        for s in a_fam:
            a_used |= s
        left = budget - a_used.bit_count()
        for b_fam in _families(indep, a_used, left):
            x_opts = [_connected_supersets(masks, s, live, cap) for s in a_fam]
            y_opts = [_connected_supersets(masks, s, live, cap) for s in b_fam]
            for xs in product(*x_opts):
                for ys in product(*y_opts):
                    yield a_fam, b_fam, xs, ys


def greedy_mis_mask(masks: Sequence[int], live: int) -> int:
    """Maximal independent set of ``live`` taken greedily by smallest id."""
    out = 0
    rest = live
    while rest:
        low = rest & -rest
        out |= low
        rest &= ~low & ~masks[low.bit_length() - 1]
    return out


def _connected_pieces(masks: Sequence[int], root: int, allowed: int, cap: int) -> list[int]:
    """Connected sets whose smallest vertex is ``root``, inside ``allowed``, size ``<= cap``."""
    allowed &= ~((1 << root) - 1)
    out: list[int] = []

    def rec(piece: int, frontier: int, banned: int) -> None:
        out.append(piece)
        if piece.bit_count() == cap:
            return
        cand = frontier & ~banned
        while cand:
            low = cand & -cand
            cand ^= low
            v = low.bit_length() - 1
            rec(piece | low, (frontier | masks[v]) & allowed & ~piece & ~low, banned)
            banned |= low

    rec(1 << root, masks[root] & allowed, 1 << root)
    return out


def _piece_families(masks: Sequence[int], allowed: int, cap: int, budget: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Families of pairwise disjoint, non-adjacent connected pieces; yields (pieces, MIS union)."""

    def rec(start: int, free: int, acc: tuple[int, ...], mis: int, left: int):
        yield acc, mis
        cand = free & ~((1 << start) - 1)
        while cand:
            low = cand & -cand
            cand ^= low
            r = low.bit_length() - 1
            for piece in _connected_pieces(masks, r, free, cap):
                a = greedy_mis_mask(masks, piece)
                c = a.bit_count()
                if c > left:
                    continue
                yield from rec(r + 1, free & ~_closed_nbhd(masks, piece, ~0), acc + (piece,), mis | a, left - c)

    yield from rec(0, allowed, (), 0, budget)


def _pruned_guesses(
    masks: Sequence[int], live: int, k: int, cap: int
) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], tuple[int, ...]]]:
    budget = 2 * k
    for xs, a_used in _piece_families(masks, live, cap, budget):
        taken = 0
        for z in xs:
            taken |= z
        cover_a = _closed_nbhd(masks, a_used, live)
        left = budget - a_used.bit_count()
        for ys, b_used in _piece_families(masks, live & ~taken, cap, left):
            if (cover_a | _closed_nbhd(masks, b_used, live)) != live:
                continue
            a_fam = tuple(greedy_mis_mask(masks, z) for z in xs)
            b_fam = tuple(greedy_mis_mask(masks, z) for z in ys)
            yield a_fam, b_fam, xs, ys


def enumerate_steiner_guesses(
    component: Sequence[int], g: Graph, k: int, cap: int | None = None, prune: bool = False
) -> Iterator[SteinerGuess]:
    """Guess bundles ``(A', B', X, Y)`` for one component.

    ``A'`` and ``B'`` are families of nonempty independent sets, all pairwise
    disjoint, of total size ``<= 2k``; each ``X_i`` (``Y_j``) ranges over the
    connected supersets of ``A'_i`` (``B'_j``) with at most ``cap`` vertices.
    With ``prune`` the bundles are restricted to those that can describe an
    actual cut: the ``X``'s are pairwise disjoint and non-adjacent (likewise
    the ``Y``'s), ``X`` and ``Y`` are disjoint, each ``A'_i`` is the greedy
    maximal independent set of ``X_i`` (so ``X_i ⊆ N[A'_i]``), and
    ``N[∪A'] ∪ N[∪B'] = C``. Taking ``X`` and ``Y`` to be the components of
    the two sides of an optimal cut inside ``C`` satisfies all of these, so no
    optimum is lost.
    """
    comp = sorted(component)
    sub, order = induced_subgraph(g, comp)
    masks = sub.masks
    live = (1 << len(comp)) - 1
    cap = len(comp) if cap is None else cap

    def back(m: int) -> tuple[int, ...]:
        return tuple(order[i] for i in iter_bits(m))

    gen = _pruned_guesses if prune else _pure_guesses
    for a_fam, b_fam, xs, ys in gen(masks, live, k, cap):
        yield SteinerGuess(
            tuple(back(m) for m in a_fam),
            tuple(back(m) for m in b_fam),
            tuple(back(m) for m in xs),
            tuple(back(m) for m in ys),
        )


def forcing_pattern(
    g: Graph, component: Sequence[int], guess: SteinerGuess, inst: CutUncutInstance
) -> tuple[frozenset[int], frozenset[int]]:
    """Vertices of the component forced to A and to B by a guess bundle."""
    comp = set(component)

    def nb(vs: Sequence[int]) -> set[int]:
        out = set(vs)
        for v in vs:
            out.update(g.adjacency[v])
        return out & comp

    fa: set[int] = set()
    fb: set[int] = set()
    for z in guess.x_sets:
        fa.update(z)
    for z in guess.y_sets:
        fb.update(z)
    fa.update(comp & set(inst.s_terminals))
    fb.update(comp & set(inst.t_terminals))
    for fam, other in ((guess.a_sets, fb), (guess.b_sets, fa)):
        hoods = [nb(s) for s in fam]
        for i, j in combinations(range(len(hoods)), 2):
            other.update(hoods[i] & hoods[j])
        covered = set().union(*hoods) if hoods else set()
        other.update(comp - covered)
    return frozenset(fa), frozenset(fb)


def _pattern_cut(
    g: Graph,
    x_assign: Mapping[int, int],
    component: Sequence[int],
    fa: frozenset[int],
    fb: frozenset[int],
) -> tuple[dict[int, int], int]:
    comp = sorted(component)
    cset = set(comp)
    xs = sorted(v for v in x_assign if any(w in cset for w in g.adjacency[v]))
    verts = xs + comp
    local = {v: i for i, v in enumerate(verts)}
    src, snk = len(verts), len(verts) + 1
    edges = []
    for u in verts:
        for w in g.adjacency[u]:
            if w in local and u < w and (u in cset or w in cset):
                edges.append((local[u], local[w], g.weight(u, w)))
    h = Graph.from_edges(len(verts) + 2, edges)
    to_a = [local[v] for v in xs if x_assign[v] == A_SIDE] + [local[v] for v in fa]
    to_b = [local[v] for v in xs if x_assign[v] == B_SIDE] + [local[v] for v in fb]
    cut = max_flow_min_cut(h, src, snk, to_a, to_b)
    side = dict(x_assign)
    for v in comp:
        side[v] = A_SIDE if local[v] in cut.source_side else B_SIDE
    weight = sum(
        g.weight(u, w) for u in comp for w in g.adjacency[u] if w in side and side[u] != side[w] and (w not in cset or u < w)
    )
    return side, weight


def constrained_component_cut(
    g: Graph,
    x_assign: Mapping[int, int],
    component: Sequence[int],
    guess: SteinerGuess,
    inst: CutUncutInstance,
) -> tuple[dict[int, int], int]:
    """Min cut of ``G[X ∪ C]`` under the guess's forcing; weight counts edges incident to ``C``.

    Raises ``Infeasible`` when the forcing contradicts itself or ``x_assign``.
    """
    fa, fb = forcing_pattern(g, component, guess, inst)
    if fa & fb:
        raise Infeasible(f"guess forces {sorted(fa & fb)} to both sides")
    return _pattern_cut(g, x_assign, component, fa, fb)


# ---------------------------------------------------------------------------
# the DP


@dataclass(frozen=True)
class CutState:
    sigma: int
    pi_a: tuple[int, ...]
    pi_b: tuple[int, ...]
    mu_a: tuple[int, ...]
    mu_b: tuple[int, ...]
    closed_a: bool = False
    closed_b: bool = False


@dataclass(frozen=True)
class _Outcome:
    side: tuple[int, ...]
    weight: int
    touch: tuple[tuple[tuple[int, bool], ...], tuple[tuple[int, bool], ...]]
    closes: tuple[bool, bool]


def _blocks(masks_local: Sequence[int], live: int) -> tuple[int, ...]:
    return tuple(sorted(mask_components(masks_local, live), key=lambda m: m & -m))


def tab0(inst: CutUncutInstance, modulator: Sequence[int]) -> dict[CutState, int]:
    """Initial table: every side assignment of the modulator with its internal cut weight."""
    g = inst.graph
    xs = list(modulator)
    pos = {v: i for i, v in enumerate(xs)}
    xm = [to_mask(pos[w] for w in g.adjacency[v] if w in pos) for v in xs]
    spos = to_mask(pos[v] for v in inst.s_terminals if v in pos)
    tpos = to_mask(pos[v] for v in inst.t_terminals if v in pos)
    full = (1 << len(xs)) - 1
    table: dict[CutState, int] = {}
    for sigma in range(1 << len(xs)):
        if sigma & spos or (~sigma & tpos & full):
            continue
        a, b = full & ~sigma, sigma
        pa, pb = _blocks(xm, a), _blocks(xm, b)
        ma = tuple(blk for blk in pa if blk & spos)
        mb = tuple(blk for blk in pb if blk & tpos)
        w = 0
        for i, v in enumerate(xs):
            for j in iter_bits(xm[i]):
                if j > i and ((sigma >> i) & 1) != ((sigma >> j) & 1):
                    w += g.weight(v, xs[j])
        table[CutState(sigma, pa, pb, ma, mb)] = w
    return table


def _merge(blocks: tuple[int, ...], marks: tuple[int, ...], touch) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Join the block partition with the connections realized through the component."""
    parent = list(range(len(blocks)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    marked = {i for i, blk in enumerate(blocks) if blk in marks}
    hit: set[int] = set()
    for xn, has_term in touch:
        ids = [i for i, blk in enumerate(blocks) if blk & xn]
        for i in ids[1:]:
            parent[find(i)] = find(ids[0])
        if has_term:
            hit.add(ids[0])
    groups: dict[int, int] = {}
    gmark: dict[int, bool] = {}
    for i, blk in enumerate(blocks):
        r = find(i)
        groups[r] = groups.get(r, 0) | blk
        gmark[r] = gmark.get(r, False) or i in marked
    for i in hit:
        gmark[find(i)] = True
    new = tuple(sorted(groups.values(), key=lambda m: m & -m))
    newm = tuple(sorted((groups[r] for r in groups if gmark[r]), key=lambda m: m & -m))
    return new, newm


@dataclass
class CutUncutDP:
    inst: CutUncutInstance
    decomp: ModulatorDecomposition
    steiner_cap: int | None = None
    transitions: str = "guess"
    tables: list[dict[CutState, tuple[int, CutState | None, tuple[int, ...]]]] = field(default_factory=list)
    cut_calls: int = 0

    def __post_init__(self) -> None:
        if self.transitions not in ("guess", "enumerate"):
            raise ValueError("transitions must be 'guess' or 'enumerate'")
        g = self.inst.graph
        self.X = list(self.decomp.modulator)
        self.pos = {v: i for i, v in enumerate(self.X)}
        self.smask = to_mask(self.inst.s_terminals)
        self.tmask = to_mask(self.inst.t_terminals)
        self.s_total = len(self.inst.s_terminals)
        self.t_total = len(self.inst.t_terminals)
        self.g = g

    # -- per component outcomes --------------------------------------------
    def _patterns(self, comp: tuple[int, ...], t: int) -> list[tuple[frozenset[int], frozenset[int]]]:
        k = self.decomp.k
        cap = self.steiner_cap if self.steiner_cap is not None else len(comp)
        seen: dict[tuple[frozenset[int], frozenset[int]], None] = {}
        for guess in enumerate_steiner_guesses(comp, self.g, k, cap, prune=True):
            fa, fb = forcing_pattern(self.g, comp, guess, self.inst)
            if not fa & fb:
                seen.setdefault((fa, fb), None)
        return list(seen)

    def _summarize(self, comp: tuple[int, ...], side: Mapping[int, int], sigma_n: int) -> _Outcome | None:
        g = self.g
        cmask = to_mask(comp)
        touch: list[list[tuple[int, bool]]] = [[], []]
        closes = [False, False]
        for sd, terms, total in ((A_SIDE, self.smask, self.s_total), (B_SIDE, self.tmask, self.t_total)):
            live = to_mask(v for v in comp if side[v] == sd)
            for k_mask in mask_components(g.masks, live):
                nbr = 0
                for v in iter_bits(k_mask):
                    nbr |= g.masks[v]
                nbr &= ~cmask
                xn = to_mask(
                    self.pos[w] for w in iter_bits(nbr) if ((sigma_n >> self.pos[w]) & 1) == sd
                )
                cnt = (k_mask & terms).bit_count()
                if xn:
                    touch[sd].append((xn, cnt > 0))
                elif cnt == total:
                    closes[sd] = True
                elif cnt:
                    return None
        weight = 0
        for u in comp:
            for w in g.adjacency[u]:
                if side[u] != side[w] and (not (cmask >> w) & 1 or u < w):
                    weight += g.weight(u, w)
        return _Outcome(
            tuple(side[v] for v in comp), weight, (tuple(touch[0]), tuple(touch[1])), (closes[0], closes[1])
        )

    def _outcomes(self, t: int, sigma_n: int) -> list[_Outcome]:
        comp = self.decomp.components[t]
        key = (t, sigma_n)
        if key in self._cache:
            return self._cache[key]
        x_assign = {v: (sigma_n >> i) & 1 for i, v in enumerate(self.X)}
        found: dict[tuple[int, ...], _Outcome] = {}
        if self.transitions == "enumerate":
            sides = []
            for code in range(1 << len(comp)):
                side = dict(x_assign)
                ok = True
                for i, v in enumerate(comp):
                    s = (code >> i) & 1
                    if ((self.smask >> v) & 1 and s != A_SIDE) or ((self.tmask >> v) & 1 and s != B_SIDE):
                        ok = False
                        break
                    side[v] = s
                if ok:
                    sides.append(side)
        else:
            sides = []
            for fa, fb in self._pattern_list(t):
                self.cut_calls += 1
                try:
                    side, _ = _pattern_cut(self.g, x_assign, comp, fa, fb)
                except Infeasible:
                    continue
                sides.append(side)
        for side in sides:
            out = self._summarize(comp, side, sigma_n)
            if out is not None and out.side not in found:
                found[out.side] = out
        res = list(found.values())
        self._cache[key] = res
        return res

    def _pattern_list(self, t: int):
        if t not in self._pcache:
            self._pcache[t] = self._patterns(self.decomp.components[t], t)
        return self._pcache[t]

    def _apply(self, state: CutState, out: _Outcome) -> CutState | None:
        sides = []
        for sd, blocks, marks, closed in (
            (A_SIDE, state.pi_a, state.mu_a, state.closed_a),
            (B_SIDE, state.pi_b, state.mu_b, state.closed_b),
        ):
            closes = out.closes[sd]
            if closes and (closed or marks or any(ht for _, ht in out.touch[sd])):
                return None
            nb, nm = _merge(blocks, marks, out.touch[sd])
            sides.append((nb, nm, closed or closes))
        (pa, ma, ca), (pb, mb, cb) = sides
        return CutState(state.sigma, pa, pb, ma, mb, ca, cb)

    def run(self) -> bool:
        self._cache: dict[tuple[int, int], list[_Outcome]] = {}
        self._pcache: dict[int, list] = {}
        g = self.g
        first = tab0(self.inst, self.X)
        self.tables = [{s: (w, None, ()) for s, w in first.items()}]
        for t, comp in enumerate(self.decomp.components):
            nmask = to_mask(self.pos[w] for v in comp for w in g.adjacency[v] if w in self.pos)
            prev = self.tables[-1]
            nxt: dict[CutState, tuple[int, CutState | None, tuple[int, ...]]] = {}
            for state in sorted(prev, key=_state_key):
                base = prev[state][0]
                for out in self._outcomes(t, state.sigma & nmask):
                    new = self._apply(state, out)
                    if new is None:
                        continue
                    w = base + out.weight
                    cur = nxt.get(new)
                    if cur is None or w < cur[0]:
                        nxt[new] = (w, state, out.side)
            self.tables.append(nxt)
            if not nxt:
                return False
        return any(_final_ok(s) for s in self.tables[-1])

    def best(self) -> CutSolution | None:
        final = [(v[0], _state_key(s), s) for s, v in self.tables[-1].items() if _final_ok(s)]
        if not final:
            return None
        w, _, state = min(final)
        side = [-1] * self.g.vertex_count
        for i, v in enumerate(self.X):
            side[v] = (state.sigma >> i) & 1
        cur: CutState | None = state
        for t in range(len(self.tables) - 1, 0, -1):
            assert cur is not None
            _, back, cside = self.tables[t][cur]
            for v, s in zip(self.decomp.components[t - 1], cside):
                side[v] = s
            cur = back
        return CutSolution(tuple(side), w)


def _state_key(s: CutState) -> tuple:
    return (s.sigma, s.pi_a, s.pi_b, s.mu_a, s.mu_b, s.closed_a, s.closed_b)


def _final_ok(s: CutState) -> bool:
    for marks, closed in ((s.mu_a, s.closed_a), (s.mu_b, s.closed_b)):
        if closed and marks:
            return False
        if not closed and len(marks) != 1:
            return False
    return True


def default_steiner_cap(g: Graph, component: Sequence[int], geometry_hint=None) -> int:
    """Cap from the greedy kappa-partition on geometric input, else the component size."""
    if geometry_hint is None:
        return len(component)
    kp = greedy_kappa_partition(g, geometry_hint)
    touched = len({kp.part_of[v] for v in component})
    return min(len(component), kp.kappa**2 * (kp.delta + 1) * touched)


def solve_cutuncut(
    inst: CutUncutInstance,
    decomp: ModulatorDecomposition,
    steiner_cap: int | None = None,
    transitions: str = "guess",
) -> CutSolution | None:
    """Optimal Two Sets Cut-Uncut solution by DP over ``decomp``, or None if infeasible."""
    dp = CutUncutDP(inst, decomp, steiner_cap=steiner_cap, transitions=transitions)
    dp.run()
    return dp.best()
