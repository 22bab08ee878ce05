"""Monotone NAE-3-SAT compiled into hard geometric instances.

A padded formula (every variable occurs exactly four times) is laid out on a
``p^d`` grid: clauses sit in distinct non-central cells, a BFS tree from the
center carries each occurrence from the center to its clause cell, and every
cell on the way holds a blown-up skeleton gadget. The subcoloring variant adds
a path of three check vertices per clause and a consistency clique at the
center; the cut-uncut variant turns the check path into a clique with two
terminals and weights edges by variable.

Two embeddings are provided: convex polygons for ``d = 2`` and balls of
radius 1/2 for ``d >= 3``.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import (
    CapExceeded,
    GridTooSmall,
    NegativeLiteral,
    ParseError,
    ShapeMismatch,
    SlackViolation,
    TooManyOccurrences,
)
from .geometry import GeomObject, ObjectSet, adjacency_slack
from .graphcore import Graph

SUBCOLORING = "subcoloring"
CUTUNCUT = "cutuncut"
VARIANTS = (SUBCOLORING, CUTUNCUT)
NAE_CAP = 24
OCCURRENCES = 4

Cell = tuple[int, ...]


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Occurrence:
    clause: int
    position: int
    variable: int


@dataclass(frozen=True)
class NAEFormula:
    """Monotone 3-CNF; variables are 1-indexed."""

    var_count: int
    clauses: tuple[tuple[int, int, int], ...]
    source_var_count: int | None = None
    source_clause_count: int | None = None

    def __post_init__(self) -> None:
        for c in self.clauses:
            if len(c) != 3:
                raise ParseError(f"clause {c} does not have three literals")
            for v in c:
                if v < 0:
                    raise NegativeLiteral(f"negative literal {v}")
                if not 1 <= v <= self.var_count:
                    raise ParseError(f"variable {v} outside 1..{self.var_count}")

    @property
    def clause_count(self) -> int:
        return len(self.clauses)

    @property
    def occurrences(self) -> tuple[Occurrence, ...]:
        return tuple(
            Occurrence(ci, pos, v) for ci, c in enumerate(self.clauses) for pos, v in enumerate(c)
        )

    def counts(self) -> list[int]:
        cnt = [0] * (self.var_count + 1)
        for c in self.clauses:
            for v in c:
                cnt[v] += 1
        return cnt[1:]

    @property
    def is_padded(self) -> bool:
        return all(c == OCCURRENCES for c in self.counts())


def pad_formula(f: NAEFormula) -> NAEFormula:
    """Equisatisfiable formula in which every variable occurs exactly four times.

    First, clauses are duplicated in order while no variable would exceed four
    occurrences (a duplicate clause is the same constraint). The remaining
    deficit ``D`` is absorbed by ``P`` fresh pairs ``(y_i, z_i)`` with clauses
    ``(w, y_i, z_i)``: each such clause is satisfied by ``y_i != z_i`` whatever
    ``w`` is. ``P`` is the least value with ``P = D (mod 3)`` and ``4P >= D``,
    which makes the slot counts integral; the ``w`` slots take the deficit
    variables, then the leftover uses of the fresh variables.
    """
    counts = f.counts()
    if any(c > OCCURRENCES for c in counts):
        bad = [i + 1 for i, c in enumerate(counts) if c > OCCURRENCES]
        raise TooManyOccurrences(f"variables {bad} occur more than {OCCURRENCES} times")
    clauses = list(f.clauses)
    grew = True
    while grew:
        grew = False
        for c in list(clauses[: len(f.clauses)]):
            extra = [0] * f.var_count
            for v in c:
                extra[v - 1] += 1
            if all(counts[i] + extra[i] <= OCCURRENCES for i in range(f.var_count)):
                clauses.append(c)
                for i in range(f.var_count):
                    counts[i] += extra[i]
                grew = True
    deficit = [v + 1 for v in range(f.var_count) for _ in range(OCCURRENCES - counts[v])]
    d = len(deficit)
    n = f.var_count
    if d:
        p = 1
        while p % 3 != d % 3 or 4 * p < d:
            p += 1
        total = (d + 8 * p) // 3
        sizes = []
        left = total
        for i in range(p):
            c = min(OCCURRENCES, left - (p - 1 - i))
            sizes.append(c)
            left -= c
        fillers = []
        for i in range(p):
            y, z = n + 2 * i + 1, n + 2 * i + 2
            fillers += [y] * (OCCURRENCES - sizes[i]) + [z] * (OCCURRENCES - sizes[i])
        slots = deficit + fillers
        k = 0
        for i in range(p):
            y, z = n + 2 * i + 1, n + 2 * i + 2
            for _ in range(sizes[i]):
                clauses.append((slots[k], y, z))
                k += 1
        n += 2 * p
    out = NAEFormula(
        n,
        tuple(tuple(c) for c in clauses),
        f.source_var_count if f.source_var_count is not None else f.var_count,
        f.source_clause_count if f.source_clause_count is not None else f.clause_count,
    )
    assert out.is_padded
    return out


def parse_nae3sat(text: str, pad: bool = True) -> NAEFormula:
    """Read ``p nae <n> <m>`` followed by ``m`` lines of three 1-indexed variables.

    Lines starting with ``c`` are comments; a trailing ``0`` per clause is accepted.
    """
    header = None
    clauses: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None or len(parts) != 4 or parts[1] != "nae":
                raise ParseError(f"line {lineno}: bad header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError as exc:
                raise ParseError(f"line {lineno}: bad header {line!r}") from exc
            continue
        if header is None:
            raise ParseError(f"line {lineno}: clause before header")
        try:
            lits = [int(x) for x in parts]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: non-integer literal") from exc
        if len(lits) == 4 and lits[3] == 0:
            lits = lits[:3]
        if len(lits) != 3:
            raise ParseError(f"line {lineno}: expected three literals, got {len(lits)}")
        if any(v < 0 for v in lits):
            raise NegativeLiteral(f"line {lineno}: negative literal in monotone formula")
        clauses.append((lits[0], lits[1], lits[2]))
    if header is None:
        raise ParseError("missing header line")
    n, m = header
    if n < 1:
        raise ParseError("formula needs at least one variable")
    if m != len(clauses):
        raise ParseError(f"header declares {m} clauses, found {len(clauses)}")
    f = NAEFormula(n, tuple(clauses))
    return pad_formula(f) if pad else f


def write_nae3sat(f: NAEFormula) -> str:
    lines = [f"p nae {f.var_count} {f.clause_count}"]
    lines += [" ".join(str(v) for v in c) for c in f.clauses]
    return "\n".join(lines) + "\n"


def nae_satisfied(f: NAEFormula, assignment: Sequence[bool]) -> bool:
    return all(len({assignment[v - 1] for v in c}) == 2 for c in f.clauses)


def solve_nae_brute(f: NAEFormula, cap: int = NAE_CAP) -> tuple[bool, ...] | None:
    """Smallest (as a binary number, x1 least significant) NAE-satisfying assignment."""
    n = f.var_count
    if n > cap:
        raise CapExceeded(f"brute NAE solver capped at {cap} variables, formula has {n}")
    if not f.clauses:
        return tuple([False] * n)
    cl = np.asarray(f.clauses, dtype=np.int64) - 1
    chunk = 1 << min(n, 16)
    for base in range(0, 1 << n, chunk):
        codes = np.arange(base, min(base + chunk, 1 << n), dtype=np.int64)
        ok = np.ones(len(codes), dtype=bool)
        for a, b, c in cl:
            xa, xb, xc = (codes >> a) & 1, (codes >> b) & 1, (codes >> c) & 1
            ok &= ~((xa == xb) & (xb == xc))
        hit = np.flatnonzero(ok)
        if len(hit):
            code = int(codes[hit[0]])
            return tuple(bool((code >> i) & 1) for i in range(n))
    return None


def random_formula(n: int, rng: random.Random) -> NAEFormula:
    """Shuffle four slots per variable into clauses, drop a partial tail, then pad."""
    slots = [v for v in range(1, n + 1) for _ in range(OCCURRENCES)]
    rng.shuffle(slots)
    m = len(slots) // 3
    clauses = tuple(tuple(slots[3 * i : 3 * i + 3]) for i in range(m))
    return pad_formula(NAEFormula(n, clauses))


def small_formula_sample(count: int = 60, seed: int = 0) -> list[NAEFormula]:
    """Formulas on three variables with four clauses, each variable exactly four times."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        slots = [v for v in (1, 2, 3) for _ in range(OCCURRENCES)]
        rng.shuffle(slots)
        out.append(NAEFormula(3, tuple(tuple(slots[3 * i : 3 * i + 3]) for i in range(4))))
    return out


# ---------------------------------------------------------------------------
# literal order and grid tree


@dataclass(frozen=True)
class LiteralOrder:
    """``h`` maps occurrence ids to ``1..4n``; a variable's four values are consecutive."""

    h: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]

    def h_tilde(self, var: int) -> float:
        grp = self.groups[var - 1]
        return sum(self.h[o] for o in grp) / len(grp)


def literal_order(f: NAEFormula) -> LiteralOrder:
    occs = f.occurrences
    groups: list[list[int]] = [[] for _ in range(f.var_count)]
    for idx, o in enumerate(occs):
        groups[o.variable - 1].append(idx)
    h = [0] * len(occs)
    nxt = 1
    for grp in groups:
        for o in grp:
            h[o] = nxt
            nxt += 1
    return LiteralOrder(tuple(h), tuple(tuple(g) for g in groups))


def grid_side(n: int, m: int, d: int) -> int:
    """Smallest odd ``p > n^(1/d)`` leaving at least ``m`` non-central cells."""
    p = 1
    while p**d <= n or p**d - 1 < m:
        p += 2
    return p


def edge_dimension(t: Cell, u: Cell) -> int:
    """1-based axis along which grid neighbors ``t`` and ``u`` differ."""
    diff = [i for i in range(len(t)) if t[i] != u[i]]
    if len(diff) != 1 or abs(t[diff[0]] - u[diff[0]]) != 1:
        raise ValueError(f"{t} and {u} are not grid neighbors")
    return diff[0] + 1


@dataclass(frozen=True)
class GridTree:
    d: int
    p: int
    root: Cell
    order: tuple[Cell, ...]
    parent: dict[Cell, Cell | None]
    cell_to_clause: dict[Cell, int]
    g_sets: dict[Cell, tuple[int, ...]]

    @property
    def tree_edges(self) -> list[tuple[Cell, Cell]]:
        return [(self.parent[t], t) for t in self.order if self.parent[t] is not None]  # type: ignore[misc]

    def is_tree_edge(self, t: Cell, u: Cell) -> bool:
        return self.parent.get(u) == t or self.parent.get(t) == u

    def grid_neighbors(self, t: Cell) -> list[Cell]:
        out = []
        for axis in range(self.d):
            for step in (-1, 1):
                c = t[axis] + step
                if 0 <= c < self.p:
                    out.append(t[:axis] + (c,) + t[axis + 1 :])
        return out

    def children(self, t: Cell) -> list[Cell]:
        return [u for u in self.order if self.parent[u] == t]

    def height(self) -> int:
        depth = {self.root: 0}
        for t in self.order[1:]:
            depth[t] = depth[self.parent[t]] + 1  # type: ignore[index]
        return max(depth.values())


def build_grid_tree(f: NAEFormula, d: int, order: LiteralOrder | None = None) -> GridTree:
    if d < 2:
        raise ValueError("dimension must be at least 2")
    order = order or literal_order(f)
    p = grid_side(f.var_count, f.clause_count, d)
    root = tuple([(p - 1) // 2] * d)
    parent: dict[Cell, Cell | None] = {root: None}
    seq = [root]
    queue = deque([root])
    while queue:
        t = queue.popleft()
        for axis in range(d):
            for step in (-1, 1):
                c = t[axis] + step
                if 0 <= c < p:
                    u = t[:axis] + (c,) + t[axis + 1 :]
                    if u not in parent:
                        parent[u] = t
                        seq.append(u)
                        queue.append(u)
    if len(seq) - 1 < f.clause_count:
        raise GridTooSmall(f"{len(seq) - 1} free cells for {f.clause_count} clauses")
    cell_to_clause = {t: ci for ci, t in enumerate(seq[1 : 1 + f.clause_count])}
    per_clause = [[] for _ in range(f.clause_count)]
    for idx, o in enumerate(f.occurrences):
        per_clause[o.clause].append(idx)
    acc: dict[Cell, set[int]] = {t: set() for t in seq}
    for t in reversed(seq):
        if t in cell_to_clause:
            acc[t].update(per_clause[cell_to_clause[t]])
        par = parent[t]
        if par is not None:
            acc[par].update(acc[t])
    g_sets = {t: tuple(sorted(acc[t], key=lambda o: order.h[o])) for t in seq}
    return GridTree(d, p, root, tuple(seq), parent, cell_to_clause, g_sets)


# ---------------------------------------------------------------------------
# gadgets


def skeleton_vertices(d: int) -> list[tuple[int, int]]:
    out = [(i, 1) for i in range(1, 2 * d + 2)]
    for j in range(2, d + 1):
        out += [(1, j), (2, j), (3, j), (4, j)]
    out.append((1, d + 1))
    return out


def skeleton_edges(d: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    out = [((i, 1), (i + 1, 1)) for i in range(1, 2 * d + 1)]
    for j in range(2, d + 1):
        hub = (2 * j - 2, 1)
        out += [((1, j), (2, j)), ((2, j), hub), (hub, (3, j)), ((3, j), (4, j))]
    out.append(((1, d + 1), (2 * d, 1)))
    return out


def build_skeleton(d: int) -> Graph:
    if d < 2:
        raise ValueError("dimension must be at least 2")
    verts = skeleton_vertices(d)
    idx = {v: k for k, v in enumerate(verts)}
    edges = [(idx[a], idx[b]) for a, b in skeleton_edges(d)]
    return Graph.from_edges(len(verts), edges, labels=[f"v{i},{j}" for i, j in verts])


def build_cell_gadget(d: int, occurrences: Sequence[int], order: LiteralOrder | None = None) -> Graph:
    """Skeleton blown up: a clique per skeleton vertex, a matching per skeleton edge."""
    if not occurrences:
        raise ValueError("the occurrence set must be nonempty")
    verts = skeleton_vertices(d)
    occ = list(occurrences)
    tag = [order.h[o] if order else o for o in occ]
    k = len(occ)
    idx = {v: n * k for n, v in enumerate(verts)}
    edges = []
    for v in verts:
        b = idx[v]
        edges += [(b + x, b + y) for x, y in combinations(range(k), 2)]
    for a, c in skeleton_edges(d):
        edges += [(idx[a] + x, idx[c] + x) for x in range(k)]
    labels = [f"v{i},{j},{tag[x]}" for i, j in verts for x in range(k)]
    return Graph.from_edges(len(verts) * k, edges, labels=labels)


# ---------------------------------------------------------------------------
# abstract graph


@dataclass(frozen=True)
class VertexInfo:
    kind: str  # "v", "a", "b" or "u"
    cell: Cell | None
    i: int = 0
    j: int = 0
    occurrence: int | None = None
    variable: int | None = None


@dataclass(eq=False)
class ReductionOutput:
    formula: NAEFormula
    d: int
    variant: str
    graph: Graph
    grid: GridTree
    order: LiteralOrder
    info: tuple[VertexInfo, ...]
    s_terminals: tuple[int, ...] = ()
    t_terminals: tuple[int, ...] = ()
    geometry: ObjectSet | None = None
    index: dict[tuple, int] = field(default_factory=dict, repr=False)

    def instance(self):
        from .cutuncut import CutUncutInstance

        if self.variant != CUTUNCUT:
            raise ValueError("terminals exist only in the cut-uncut variant")
        return CutUncutInstance.create(self.graph, self.s_terminals, self.t_terminals)

    def size_ratio(self) -> float:
        n = self.formula.var_count
        return self.graph.vertex_count / (self.d**2 * n ** ((self.d + 1) / self.d))


def _cell_str(t: Cell) -> str:
    return ",".join(str(c) for c in t)


def build_abstract_graph(f: NAEFormula, d: int, variant: str = SUBCOLORING) -> ReductionOutput:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if not f.is_padded:
        raise ValueError("formula must be padded (every variable exactly four times)")
    order = literal_order(f)
    grid = build_grid_tree(f, d, order)
    occs = f.occurrences
    info: list[VertexInfo] = []
    labels: list[str] = []
    index: dict[tuple, int] = {}
    edges: list[tuple[int, int]] = []

    def add(key: tuple, vi: VertexInfo, label: str) -> int:
        index[key] = len(info)
        info.append(vi)
        labels.append(label)
        return index[key]

    verts = skeleton_vertices(d)
    for t in grid.order:
        L = grid.g_sets[t]
        if not L:
            continue
        cs = _cell_str(t)
        for i, j in verts:
            ids = [
                add(("v", t, i, j, o), VertexInfo("v", t, i, j, o, occs[o].variable), f"v{i},{j},{order.h[o]}@{cs}")
                for o in L
            ]
            edges += list(combinations(ids, 2))
        for a, c in skeleton_edges(d):
            edges += [(index[("v", t) + a + (o,)], index[("v", t) + c + (o,)]) for o in L]
        if t in grid.cell_to_clause:
            ci = grid.cell_to_clause[t]
            lits = sorted((o for o in range(len(occs)) if occs[o].clause == ci), key=lambda o: order.h[o])
            a_ids = []
            for b, o in enumerate(lits, 1):
                a = add(("a", t, b), VertexInfo("a", t, b, 0, o, occs[o].variable), f"a{b}@{cs}")
                a_ids.append(a)
                edges.append((a, index[("v", t, 1, d + 1, o)]))
            if variant == SUBCOLORING:
                edges += [(a_ids[0], a_ids[1]), (a_ids[1], a_ids[2])]
            else:
                edges += list(combinations(a_ids, 2))
                b1 = add(("b", t, 1), VertexInfo("b", t, 1), f"b1@{cs}")
                b2 = add(("b", t, 2), VertexInfo("b", t, 2), f"b2@{cs}")
                edges.append((b1, b2))
                edges += [(b, a) for b in (b1, b2) for a in a_ids]
    for par, child in grid.tree_edges:
        dim = edge_dimension(par, child)
        lo, hi = (par, child) if par[dim - 1] < child[dim - 1] else (child, par)
        src = (2 * d + 1, 1) if dim == 1 else (4, dim)
        for o in grid.g_sets[child]:
            edges.append((index[("v", lo) + src + (o,)], index[("v", hi, 1, dim, o)]))
    if variant == SUBCOLORING:
        u_ids = [add(("u", i), VertexInfo("u", None, i, 0, None, i), f"u{i}") for i in range(1, f.var_count + 1)]
        edges += list(combinations(u_ids, 2))
        for o, occ in enumerate(occs):
            edges.append((u_ids[occ.variable - 1], index[("v", grid.root, 1, d + 1, o)]))
    n = len(info)
    weights = None
    if variant == CUTUNCUT:
        weights = {}
        for u, v in edges:
            same = info[u].variable is not None and info[u].variable == info[v].variable
            weights[(min(u, v), max(u, v))] = 1 if same else 0
    g = Graph.from_edges(n, edges, weights=weights, labels=labels)
    out = ReductionOutput(f, d, variant, g, grid, order, tuple(info), index=index)
    if variant == CUTUNCUT:
        out.s_terminals = tuple(index[("b", t, 1)] for t in grid.order if ("b", t, 1) in index)
        out.t_terminals = tuple(index[("b", t, 2)] for t in grid.order if ("b", t, 2) in index)
    return out


# ---------------------------------------------------------------------------
# propagation check


def check_propagation(g: Graph, coloring: Sequence[int]) -> bool:
    """On two cliques joined by a matching, every matching edge must be bichromatic.

    The matching edges are recovered as the edges lying in no triangle.
    """
    n = g.vertex_count
    masks = g.masks
    matching = [(u, v) for u, v in g.edges() if not masks[u] & masks[v]]
    rest = [(u, v) for u, v in g.edges() if masks[u] & masks[v]]
    h = Graph.from_edges(n, rest)
    from .graphcore import connected_components

    comps = connected_components(h)
    if len(comps) != 2 or any(len(c) < 3 for c in comps):
        raise ShapeMismatch("expected two cliques of size at least 3")
    for c in comps:
        for u, v in combinations(c, 2):
            if not g.has_edge(u, v):
                raise ShapeMismatch("a side is not a clique")
    side = {v: k for k, c in enumerate(comps) for v in c}
    ends = [x for e in matching for x in e]
    if len(matching) < 2 or len(set(ends)) != len(ends) or any(side[u] == side[v] for u, v in matching):
        raise ShapeMismatch("cross edges must form a matching of at least two edges")
    if len(coloring) != n:
        raise ValueError("coloring must be total")
    return all(coloring[u] != coloring[v] for u, v in matching)


# ---------------------------------------------------------------------------
# 2D polygons


def _suppressed_faces(grid: GridTree) -> dict[Cell, set[int]]:
    """Per cell, the axes (1-based) whose upper face borders a non-tree neighbor."""
    out: dict[Cell, set[int]] = {t: set() for t in grid.order}
    for t in grid.order:
        for axis in range(grid.d):
            if t[axis] + 1 < grid.p:
                u = t[:axis] + (t[axis] + 1,) + t[axis + 1 :]
                if not grid.is_tree_edge(t, u):
                    out[t].add(axis + 1)
    return out


def polygon_epsilon(out: ReductionOutput) -> float:
    """Offset unit; keeps every ``h * eps`` strictly below 1/2."""
    return 1.0 / (2 * len(out.formula.occurrences) + 2)


def _local_polygon(vi: VertexInfo, c: float, shift: set[int], delta: float) -> list[tuple[float, float]]:
    i, j = vi.i, vi.j
    if j == 1:
        x = 2.0 * (i - 1)
        if i % 2:
            pts = [(x, c), (x + 1, 1.0), (x + 2, c), (x + 1, -1.0)]
        else:
            pts = [(x, c), (x + 1 + c, 1.0), (x + 2, c), (x + 1 + c, -1.0)]
        if i == 5 and 1 in shift:
            pts[2] = (x + 2 - delta, c)
        return pts
    if j == 2:
        y = (-5.0, -3.0, 1.0, 3.0)[i - 1]
        pts = [(3 + c, y), (2.0, y + 1), (3 + c, y + 2), (4.0, y + 1)]
        if i == 4 and 2 in shift:
            pts[2] = (3 + c, y + 2 - delta)
        return pts
    return [(7 + c, -3.0), (6.0, -2.0), (7 + c, -1.0), (8.0, -2.0)]


def embed_2d(out: ReductionOutput, tolerance: float = 1e-9) -> ObjectSet:
    """Convex polygons whose intersection graph is the abstract graph."""
    if out.d != 2:
        raise ValueError("polygon embedding needs d = 2")
    eps = polygon_epsilon(out)
    delta = eps / 10
    h = out.order.h
    faces = _suppressed_faces(out.grid)
    clause_h: dict[Cell, list[float]] = {}
    for vi in out.info:
        if vi.kind == "a":
            clause_h.setdefault(vi.cell, []).append(h[vi.occurrence] * eps)  # type: ignore[arg-type, index]
    objs = []
    for k, vi in enumerate(out.info):
        if vi.kind == "v":
            pts = _local_polygon(vi, h[vi.occurrence] * eps, faces[vi.cell], delta)  # type: ignore[index]
            cell = vi.cell
        elif vi.kind == "a":
            cs = clause_h[vi.cell]  # type: ignore[index]
            c = cs[vi.i - 1]
            if out.variant == SUBCOLORING:
                pts = [
                    [(7 + c, -3.0), (7 + c, -5.0), (6.0, -4.0)],
                    [(7 + c, -3.0), (8.0, -4.0), (7 + c, -5.0), (6.0, -4.0)],
                    [(7 + c, -3.0), (7 + c, -5.0), (8.0, -4.0)],
                ][vi.i - 1]
            else:
                pts = [(7 + c, -3.0), (6.4, -4.6), (8.1, -4.6)]
            cell = vi.cell
        elif vi.kind == "b":
            x0 = 6.1 if vi.i == 1 else 6.6
            pts = [(x0, -4.98), (x0 + 1.3, -4.98), (x0 + 1.3, -4.3), (x0, -4.3)]
            cell = vi.cell
        else:
            hi = min(h[o] for o in out.order.groups[vi.i - 1])
            pts = [(7 + hi * eps, -3.0), (7 + (hi + 3) * eps, -3.0), (8.0, -4.0), (7.0, -5.0), (6.0, -4.0)]
            cell = out.grid.root
        t1, t2 = cell  # type: ignore[misc]
        glob = [(10.0 * t1 + x, 10.0 * t2 + 5.0 + y) for x, y in pts]
        objs.append(GeomObject.polytope(glob, label=out.graph.label(k)))
    f = ObjectSet.normalized(2, objs, tolerance=tolerance, meta={"eps": eps, "shift": delta})
    _check_slack(f, out.graph)
    return f


def _check_slack(f: ObjectSet, designed: Graph) -> None:
    slack = adjacency_slack(f, designed)
    if slack < 10 * f.tolerance:
        raise SlackViolation(
            f"non-designed pair at gap {slack:.3e}, below 10x tolerance {10 * f.tolerance:.1e}"
        )


# ---------------------------------------------------------------------------
# unit balls


@dataclass(frozen=True)
class BallParameters:
    m: int
    eps: float
    eps_prime: float
    eps_shift: float
    tolerance: float

    @classmethod
    def for_occurrences(cls, occurrence_count: int) -> BallParameters:
        """Offsets sized so every non-designed gap is at least ``eps^2 / 4``.

        ``m`` strictly exceeds every ``h`` value. The angular step keeps the
        whole fan of a cylinder within a sixth of a turn, and the face shift
        stays below the smallest cross-occurrence clearance ``eps^2 / 2``.
        """
        m = occurrence_count + 1
        eps = 1.0 / (16 * m**3)
        shift = eps * eps / 4
        tol = max(1e-13, min(1e-9, shift / 20))
        return cls(m, eps, math.pi / (6 * m), shift, tol)


def _cyl(center: tuple[float, float], r: float, theta: float, z: float, d: int) -> np.ndarray:
    p = np.zeros(d)
    p[0] = center[0] + r * math.cos(theta)
    p[1] = center[1] + r * math.sin(theta)
    p[d - 1] = z
    return p


def _ball_center(out: ReductionOutput, vi: VertexInfo, prm: BallParameters, faces) -> np.ndarray:
    d = out.d
    eps, ep, m = prm.eps, prm.eps_prime, prm.m
    h = out.order.h
    cell = vi.cell if vi.cell is not None else out.grid.root
    typ_one = sum(cell) % 2 == 0
    if vi.kind == "v":
        hv = h[vi.occurrence]  # type: ignore[index]
        i, j = vi.i, vi.j
        if j == 1:
            p = np.zeros(d)
            p[0] = i
            p[d - 1] = hv * eps
        elif j == d + 1:
            p = np.zeros(d)
            p[0] = 2 * d
            p[1] = -1
            p[d - 1] = hv * eps
        elif j < d:
            p = np.zeros(d)
            p[0] = 2 * j - 2
            p[d - 1] = hv * eps
            p[j - 1] = (-2, -1, 1, 2)[i - 1]
        else:
            low, high = (-math.pi / 2, math.pi / 2) if typ_one else (math.pi / 2, -math.pi / 2)
            theta = (low if i in (1, 2) else high) + ep * hv
            z = {1: -1 + eps * m, 2: eps * hv, 3: eps * hv, 4: 1.0}[i]
            p = _cyl((2 * d - 2, 0.0), 1.0, theta, z, d)
        shift_axis = {(2 * d + 1, 1): 1}.get((i, j))
        if i == 4 and 2 <= j <= d:
            shift_axis = j
        if shift_axis is not None and shift_axis in faces[cell]:
            p[shift_axis - 1] -= prm.eps_shift
    elif vi.kind == "a":
        hv = h[vi.occurrence]  # type: ignore[index]
        if out.variant == SUBCOLORING:
            angle = (-3, -4, -7)[vi.i - 1] * math.pi / 10
        else:
            angle = (-3, -4, -5)[vi.i - 1] * math.pi / 10
        p = _cyl((2 * d, -1.0), 1.0, angle, hv * eps, d)
    elif vi.kind == "b":
        p = _cyl((2 * d, -1.0), 1.5, -4 * math.pi / 10, 0.0 if vi.i == 1 else 0.5, d)
    else:
        ht = out.order.h_tilde(vi.i)
        p = np.zeros(d)
        p[0] = 2 * d
        p[1] = -1 - math.sqrt(1 - (1.5 * eps) ** 2)
        p[d - 1] = ht * eps
    period = [2 * d + 1] + [5] * (d - 2) + [3 - eps * m]
    return p + np.asarray([c * w for c, w in zip(cell, period)], dtype=float)


def embed_balls(out: ReductionOutput, params: BallParameters | None = None) -> ObjectSet:
    """Balls of radius 1/2 whose intersection graph is the abstract graph."""
    if out.d < 3:
        raise ValueError("ball embedding needs d >= 3")
    prm = params or BallParameters.for_occurrences(len(out.formula.occurrences))
    faces = _suppressed_faces(out.grid)
    objs = []
    for k, vi in enumerate(out.info):
        c = _ball_center(out, vi, prm, faces)
        objs.append(GeomObject.ball(c, 0.5, label=out.graph.label(k)))
    meta: dict[str, Any] = {"m": prm.m, "eps": prm.eps, "eps_prime": prm.eps_prime, "shift": prm.eps_shift}
    f = ObjectSet(out.d, 1.0, tuple(objs), 1.0, prm.tolerance, meta)
    _check_slack(f, out.graph)
    return f


def embed(out: ReductionOutput) -> ObjectSet:
    f = embed_2d(out) if out.d == 2 else embed_balls(out)
    out.geometry = f
    return f


# ---------------------------------------------------------------------------
# cylinder inequalities


@dataclass(frozen=True)
class CylinderMargins:
    same_margin: float
    cross_margin: float
    bound_margin: float
    chord_margin: float


def cylinder_margins(m: int, eps: float, eps_prime: float) -> CylinderMargins:
    """Clearances of the cylinder path of one gadget for ``h`` ranging over ``1..m-1``.

    ``same_margin`` is ``min(1 - |X_1 X_2|^2)`` over equal occurrences,
    ``cross_margin`` is ``min(|X_1 X_2'|^2 - 1)`` over distinct ones (both
    from explicit coordinates), and ``bound_margin`` is the closed-form
    lower bound ``(1 - eps m)^2 + 2 sin^2(eps'/2) - 1``; ``chord_margin``
    is the same bound with the exact chord term ``4 sin^2(eps'/2)``.
    """
    hs = np.arange(1, m, dtype=float)
    theta = -math.pi / 2 + eps_prime * hs
    x1 = np.stack([np.cos(theta), np.sin(theta), np.full_like(hs, -1 + eps * m)], axis=1)
    x2 = np.stack([np.cos(theta), np.sin(theta), eps * hs], axis=1)
    same = 1 - np.einsum("ij,ij->i", x1 - x2, x1 - x2)
    diff = x1[:, None, :] - x2[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(sq, np.inf)
    base = (1 - eps * m) ** 2 - 1
    sine = math.sin(eps_prime / 2) ** 2
    return CylinderMargins(float(same.min()), float(sq.min() - 1), base + 2 * sine, base + 4 * sine)


def padded(clauses: Iterable[Sequence[int]], n: int) -> NAEFormula:
    return pad_formula(NAEFormula(n, tuple(tuple(c) for c in clauses)))
