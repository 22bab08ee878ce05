"""Graph representation and the exact combinatorial subroutines used by the solvers.

Vertices are dense integer ids ``0..n-1``. Labels live in an optional side
table. Most routines work on integer bitmasks internally, which keeps the
small exact searches cheap.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping, Sequence

from .errors import CapExceeded, Infeasible, ParseError

if TYPE_CHECKING:  # pragma: no cover
    from .geometry import ObjectSet

DEFAULT_ALPHA_CAP = 40


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph with optional integer edge weights and labels."""

    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]
    edge_weights: Mapping[tuple[int, int], int] | None = None
    vertex_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.adjacency) != self.vertex_count:
            raise ValueError("adjacency length differs from vertex_count")
        for u, nbrs in enumerate(self.adjacency):
            prev = -1
            for v in nbrs:
                if v == u:
                    raise ValueError(f"self-loop at {u}")
                if v <= prev:
                    raise ValueError(f"adjacency of {u} is not strictly sorted")
                if not 0 <= v < self.vertex_count:
                    raise ValueError(f"neighbor {v} of {u} out of range")
                prev = v
        masks = self.masks
        for u in range(self.vertex_count):
            for v in self.adjacency[u]:
                if not (masks[v] >> u) & 1:
                    raise ValueError(f"adjacency not symmetric at {u}-{v}")
        if self.edge_weights is not None:
            for (u, v), w in self.edge_weights.items():
                if u >= v or not (masks[u] >> v) & 1:
                    raise ValueError(f"weight on non-edge ({u},{v})")
                if not isinstance(w, int) or w < 0:
                    raise ValueError(f"weight of ({u},{v}) must be a nonnegative integer")
        if self.vertex_labels is not None and len(self.vertex_labels) != self.vertex_count:
            raise ValueError("label table length differs from vertex_count")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Sequence[int]],
        weights: Mapping[tuple[int, int], int] | None = None,
        labels: Sequence[str] | None = None,
    ) -> Graph:
        """Build a graph from ``(u, v)`` or ``(u, v, w)`` tuples.

        Weighted triples switch the graph to weighted mode; an explicit
        ``weights`` mapping may be given instead. Duplicate edges are merged.
        """
        nbrs: list[set[int]] = [set() for _ in range(n)]
        wmap: dict[tuple[int, int], int] = {}
        weighted = weights is not None
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError(f"self-loop at {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
            if len(e) > 2:
                weighted = True
                wmap[_edge_key(u, v)] = int(e[2])
        if weights is not None:
            for (u, v), w in weights.items():
                wmap[_edge_key(u, v)] = int(w)
        adjacency = tuple(tuple(sorted(s)) for s in nbrs)
        final_weights = None
        if weighted:
            final_weights = {}
            for u in range(n):
                for v in adjacency[u]:
                    if u < v:
                        final_weights[(u, v)] = wmap.get((u, v), 1)
        return cls(n, adjacency, final_weights, tuple(labels) if labels is not None else None)

    @property
    def n(self) -> int:
        return self.vertex_count

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Open neighborhoods as bitmasks."""
        return tuple(to_mask(nbrs) for nbrs in self.adjacency)

    @property
    def is_weighted(self) -> bool:
        return self.edge_weights is not None

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.masks[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def weight(self, u: int, v: int) -> int:
        """Weight of edge ``uv``; unweighted graphs report 1 for every edge."""
        if self.edge_weights is None:
            return 1
        return self.edge_weights[_edge_key(u, v)]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.vertex_count) for v in self.adjacency[u] if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def total_weight(self) -> int:
        if self.edge_weights is None:
            return self.edge_count
        return sum(self.edge_weights.values())

    def label(self, v: int) -> str:
        if self.vertex_labels is None:
            return str(v)
        return self.vertex_labels[v]

    def with_weights(self, weights: Mapping[tuple[int, int], int]) -> Graph:
        full = {e: int(weights.get(e, 1)) for e in self.edges()}
        return Graph(self.vertex_count, self.adjacency, full, self.vertex_labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.vertex_count == other.vertex_count
            and self.adjacency == other.adjacency
            and (dict(self.edge_weights) if self.edge_weights is not None else None)
            == (dict(other.edge_weights) if other.edge_weights is not None else None)
            and self.vertex_labels == other.vertex_labels
        )

    def __hash__(self) -> int:
        return hash((self.vertex_count, self.adjacency))

    def __repr__(self) -> str:
        kind = "weighted " if self.is_weighted else ""
        return f"Graph({kind}n={self.vertex_count}, m={self.edge_count})"


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Return ``g[vertices]`` relabelled densely, plus the original id of each new vertex."""
    order = tuple(sorted(set(vertices)))
    index = {v: i for i, v in enumerate(order)}
    edges = []
    weights = {} if g.is_weighted else None
    for i, u in enumerate(order):
        for v in g.adjacency[u]:
            j = index.get(v)
            if j is not None and i < j:
                edges.append((i, j))
                if weights is not None:
                    weights[(i, j)] = g.weight(u, v)
    labels = None
    if g.vertex_labels is not None:
        labels = [g.vertex_labels[v] for v in order]
    sub = Graph.from_edges(len(order), edges, weights=weights, labels=labels)
    if weights is not None and not edges:
        sub = Graph(sub.vertex_count, sub.adjacency, {}, sub.vertex_labels)
    return sub, order


# ---------------------------------------------------------------------------
# text format


def write_graph_text(g: Graph) -> str:
    edges = g.edges()
    header = f"p {g.vertex_count} {len(edges)}"
    lines = [header + (" weighted" if g.is_weighted else "")]
    for u, v in edges:
        if g.is_weighted:
            lines.append(f"e {u} {v} {g.weight(u, v)}")
        else:
            lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def read_graph_text(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("c")]
    if not lines:
        raise ParseError("empty graph file")
    head = lines[0].split()
    if len(head) not in (3, 4) or head[0] != "p":
        raise ParseError(f"bad header: {lines[0]!r}")
    if len(head) == 4 and head[3] != "weighted":
        raise ParseError(f"unknown header flag {head[3]!r}")
    try:
        n, m = int(head[1]), int(head[2])
    except ValueError as exc:
        raise ParseError(f"bad header: {lines[0]!r}") from exc
    weighted = len(head) == 4
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        want = 4 if weighted else 3
        if parts[0] != "e" or len(parts) != want:
            raise ParseError(f"bad edge line: {ln!r}")
        try:
            nums = [int(x) for x in parts[1:]]
        except ValueError as exc:
            raise ParseError(f"bad edge line: {ln!r}") from exc
        u, v = nums[0], nums[1]
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise ParseError(f"edge out of range or loop: {ln!r}")
        if weighted and nums[2] < 0:
            raise ParseError(f"negative weight: {ln!r}")
        edges.append(tuple(nums))
    if len(edges) != m:
        raise ParseError(f"header declares {m} edges, found {len(edges)}")
    g = Graph.from_edges(n, edges)
    if weighted and g.edge_weights is None:
        g = Graph(g.vertex_count, g.adjacency, {}, None)
    return g


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class Partition:
    """A set partition with canonical block order (by smallest element)."""

    ground_set: frozenset[int]
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise ValueError("empty block")
            if seen & b:
                raise ValueError("blocks overlap")
            seen |= b
        if seen != set(self.ground_set):
            raise ValueError("blocks do not cover the ground set")

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> Partition:
        bl = [frozenset(b) for b in blocks]
        bl = [b for b in bl if b]
        bl.sort(key=min)
        ground = frozenset().union(*bl) if bl else frozenset()
        return cls(ground, tuple(bl))

    def block_of(self, v: int) -> frozenset[int]:
        for b in self.blocks:
            if v in b:
                return b
        raise KeyError(v)

    def refines(self, other: Partition) -> bool:
        """True when every block of ``self`` lies inside a block of ``other``."""
        if self.ground_set != other.ground_set:
            return False
        return all(any(b <= c for c in other.blocks) for b in self.blocks)

    def join(self, other: Partition) -> Partition:
        """Finest partition coarser than both (transitive closure of the two relations)."""
        ground = self.ground_set | other.ground_set
        parent = {v: v for v in ground}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for b in list(self.blocks) + list(other.blocks):
            it = iter(b)
            first = find(next(it))
            for v in it:
                r = find(v)
                if r != first:
                    parent[max(r, first)] = min(r, first)
                    first = min(r, first)
        groups: dict[int, set[int]] = {}
        for v in ground:
            groups.setdefault(find(v), set()).add(v)
        return Partition.from_blocks(groups.values())

    def coarsenings(self) -> Iterator[Partition]:
        """Every partition obtained by merging blocks of ``self``, each exactly once."""
        k = len(self.blocks)
        for grouping in set_partitions(range(k)):
            yield Partition.from_blocks(
                frozenset().union(*(self.blocks[i] for i in grp)) for grp in grouping
            )


def set_partitions(items: Iterable[int]) -> Iterator[list[list[int]]]:
    """Enumerate all set partitions of ``items`` (restricted growth strings)."""
    items = list(items)
    n = len(items)
    if n == 0:
        yield []
        return
    codes = [0] * n

    def rec(i: int, nblocks: int) -> Iterator[list[list[int]]]:
        if i == n:
            out: list[list[int]] = [[] for _ in range(nblocks)]
            for idx, c in enumerate(codes):
                out[c].append(items[idx])
            yield out
            return
        for c in range(nblocks + 1):
            codes[i] = c
            yield from rec(i + 1, max(nblocks, c + 1))

    codes[0] = 0
    yield from rec(1, 1)


@dataclass(frozen=True)
class KappaPartition:
    parts: Partition
    representative: tuple[int, ...]
    clique_cover_per_part: tuple[tuple[tuple[int, ...], ...], ...]
    kappa: int
    contraction: Graph
    delta: int
    part_of: tuple[int, ...] = field(repr=False, default=())


# ---------------------------------------------------------------------------
# basic structure


def connected_components(g: Graph, removed: Iterable[int] = ()) -> list[tuple[int, ...]]:
    """Components of ``g - removed`` as sorted tuples, ordered by smallest vertex."""
    gone = set(removed)
    seen = [False] * g.vertex_count
    for v in gone:
        seen[v] = True
    comps = []
    for start in range(g.vertex_count):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in g.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(tuple(sorted(comp)))
    return comps


def mask_components(masks: Sequence[int], live: int) -> list[int]:
    """Connected components of the subgraph induced by bitmask ``live``."""
    comps = []
    while live:
        comp = live & -live
        frontier = comp
        while frontier:
            grow = 0
            for v in iter_bits(frontier):
                grow |= masks[v]
            grow &= live & ~comp
            comp |= grow
            frontier = grow
        comps.append(comp)
        live &= ~comp
    return comps


def _clique_cover_masks(masks: Sequence[int], live: int) -> int:
    """Cheap greedy clique-cover size of ``live`` (lowest vertex first)."""
    count = 0
    while live:
        v = (live & -live).bit_length() - 1
        cand = masks[v] & live
        clique = 1 << v
        while cand:
            low = cand & -cand
            u = low.bit_length() - 1
            clique |= low
            cand &= masks[u]
        live &= ~clique
        count += 1
    return count


def max_independent_set_mask(masks: Sequence[int], live: int) -> int:
    """Maximum independent set of ``live`` by branch and bound; returns a bitmask.

    Vertices of degree at most one are taken greedily (always safe). Otherwise
    the search branches on a maximum-degree vertex: include it and drop its
    closed neighborhood, or exclude it. A greedy clique cover bounds each node.
    """
    best = 0
    best_size = -1

    def rec(live: int, chosen: int) -> None:
        nonlocal best, best_size
        while True:
            if not live:
                size = chosen.bit_count()
                if size > best_size:
                    best, best_size = chosen, size
                return
            pivot = -1
            pivot_deg = -1
            reduced = False
            for v in iter_bits(live):
                dg = (masks[v] & live).bit_count()
                if dg <= 1:
                    chosen |= 1 << v
                    live &= ~(masks[v] | (1 << v))
                    reduced = True
                    break
                if dg > pivot_deg:
                    pivot, pivot_deg = v, dg
            if not reduced:
                break
        if chosen.bit_count() + _clique_cover_masks(masks, live) <= best_size:
            return
        bit = 1 << pivot
        rec(live & ~(masks[pivot] | bit), chosen | bit)
        rec(live & ~bit, chosen)

    rec(live, 0)
    return best


def independence_number(g: Graph, cap: int | None = DEFAULT_ALPHA_CAP) -> tuple[int, tuple[int, ...]]:
    """Exact independence number with a witness set.

    Raises ``CapExceeded`` above ``cap`` vertices; pass ``cap=None`` to lift it.
    """
    if cap is not None and g.vertex_count > cap:
        raise CapExceeded(f"exact alpha capped at {cap} vertices, graph has {g.vertex_count}")
    full = (1 << g.vertex_count) - 1
    best = max_independent_set_mask(g.masks, full)
    return best.bit_count(), tuple(iter_bits(best))


def independence_number_of(
    g: Graph, vertices: Iterable[int], cap: int | None = DEFAULT_ALPHA_CAP
) -> int:
    """Exact alpha of ``g[vertices]`` without materializing the subgraph."""
    live = to_mask(vertices)
    if cap is not None and live.bit_count() > cap:
        raise CapExceeded(f"exact alpha capped at {cap} vertices, set has {live.bit_count()}")
    return max_independent_set_mask(g.masks, live).bit_count()


def greedy_clique_cover(g: Graph, vertices: Iterable[int] | None = None) -> list[tuple[int, ...]]:
    """Partition ``vertices`` into cliques, each grown from a max-degree remaining vertex."""
    masks = g.masks
    live = to_mask(range(g.vertex_count) if vertices is None else vertices)
    cover = []
    while live:
        seed = max(iter_bits(live), key=lambda v: ((masks[v] & live).bit_count(), -v))
        clique = 1 << seed
        cand = masks[seed] & live
        while cand:
            u = max(iter_bits(cand), key=lambda v: ((masks[v] & cand).bit_count(), -v))
            clique |= 1 << u
            cand &= masks[u]
        cover.append(tuple(iter_bits(clique)))
        live &= ~clique
    return cover


def independence_upper_bound(g: Graph, vertices: Iterable[int] | None = None) -> int:
    """Greedy clique-cover size, an upper bound on alpha."""
    return len(greedy_clique_cover(g, vertices))


def is_cluster_graph(
    g: Graph, subset: Iterable[int] | None = None
) -> tuple[bool, tuple[int, int, int] | None]:
    """Check that ``g[subset]`` has no induced P3.

    On failure returns a triple ``(a, b, c)`` with ``ab, bc`` edges and ``ac``
    a non-edge; ``b`` is the middle vertex.
    """
    masks = g.masks
    sub = to_mask(range(g.vertex_count) if subset is None else subset)
    for b in iter_bits(sub):
        nb = masks[b] & sub
        for a in iter_bits(nb):
            bad = nb & ~masks[a] & ~(1 << a)
            if bad:
                c = (bad & -bad).bit_length() - 1
                return False, (min(a, c), b, max(a, c))
    return True, None


def torso(g: Graph, x: Iterable[int]) -> Graph:
    """``g[x]`` plus a clique on ``N(C) ∩ x`` for every component ``C`` of ``g - x``.

    Vertex ``i`` of the result is the ``i``-th smallest element of ``x``.
    """
    order = tuple(sorted(set(x)))
    index = {v: i for i, v in enumerate(order)}
    edges = set()
    for i, u in enumerate(order):
        for v in g.adjacency[u]:
            j = index.get(v)
            if j is not None and i < j:
                edges.add((i, j))
    for comp in connected_components(g, order):
        attach = sorted({index[w] for v in comp for w in g.adjacency[v] if w in index})
        edges.update(combinations(attach, 2))
    labels = None
    if g.vertex_labels is not None:
        labels = [g.vertex_labels[v] for v in order]
    return Graph.from_edges(len(order), sorted(edges), labels=labels)


def greedy_kappa_partition(g: Graph, geometry_hint: ObjectSet | None = None) -> KappaPartition:
    """Partition around a greedy maximal independent set and measure kappa and Delta."""
    if geometry_hint is not None:
        from .geometry import object_center

        keyed = [(tuple(object_center(o)), v) for v, o in enumerate(geometry_hint.objects)]
        order = [v for _, v in sorted(keyed)]
    else:
        order = list(range(g.vertex_count))
    masks = g.masks
    reps: list[int] = []
    taken = 0
    for v in order:
        if not masks[v] & taken:
            reps.append(v)
            taken |= 1 << v
    reps.sort()
    part_index = {r: i for i, r in enumerate(reps)}
    members: list[list[int]] = [[r] for r in reps]
    part_of = [-1] * g.vertex_count
    for r in reps:
        part_of[r] = part_index[r]
    for v in range(g.vertex_count):
        if part_of[v] >= 0:
            continue
        rep = min(r for r in g.adjacency[v] if (taken >> r) & 1)
        part_of[v] = part_index[rep]
        members[part_index[rep]].append(v)
    covers = tuple(tuple(greedy_clique_cover(g, m)) for m in members)
    kappa = max((len(c) for c in covers), default=0)
    cedges = set()
    for u, v in g.edges():
        pu, pv = part_of[u], part_of[v]
        if pu != pv:
            cedges.add((min(pu, pv), max(pu, pv)))
    contraction = Graph.from_edges(len(reps), sorted(cedges))
    delta = max((contraction.degree(i) for i in range(contraction.vertex_count)), default=0)
    return KappaPartition(
        parts=Partition.from_blocks(members),
        representative=tuple(reps),
        clique_cover_per_part=covers,
        kappa=kappa,
        contraction=contraction,
        delta=delta,
        part_of=tuple(part_of),
    )


# ---------------------------------------------------------------------------
# flows


@dataclass(frozen=True)
class MinCut:
    value: int
    source_side: frozenset[int]

    def side_assignment(self, n: int) -> tuple[int, ...]:
        """0 for source side, 1 for sink side."""
        return tuple(0 if v in self.source_side else 1 for v in range(n))


def max_flow_min_cut(
    g: Graph,
    source: int,
    sink: int,
    forced_source: Iterable[int] = (),
    forced_sink: Iterable[int] = (),
) -> MinCut:
    """Minimum s-t cut with vertices pinned to either side.

    Pinned vertices are tied to the terminal by an arc of capacity
    ``total_weight + 1``, which no finite cut can afford to sever. The flow is
    pushed along shortest augmenting paths. The returned source side is the
    residual-reachable set, i.e. the inclusion-minimal optimal source side.
    """
    if source == sink:
        raise ValueError("source and sink coincide")
    fs = set(forced_source) | {source}
    ft = set(forced_sink) | {sink}
    if fs & ft:
        raise Infeasible(f"vertices forced to both sides: {sorted(fs & ft)}")
    n = g.vertex_count
    cap: list[dict[int, int]] = [dict() for _ in range(n)]
    for u, v in g.edges():
        w = g.weight(u, v)
        cap[u][v] = cap[u].get(v, 0) + w
        cap[v][u] = cap[v].get(u, 0) + w
    sentinel = g.total_weight() + 1
    for f in sorted(fs - {source}):
        cap[source][f] = cap[source].get(f, 0) + sentinel
        cap[f].setdefault(source, 0)
    for f in sorted(ft - {sink}):
        cap[f][sink] = cap[f].get(sink, 0) + sentinel
        cap[sink].setdefault(f, 0)
    order = [sorted(c) for c in cap]
    flow = 0
    while True:
        parent = [-1] * n
        parent[source] = source
        queue = deque([source])
        while queue and parent[sink] < 0:
            u = queue.popleft()
            for v in order[u]:
                if parent[v] < 0 and cap[u].get(v, 0) > 0:
                    parent[v] = u
                    queue.append(v)
        if parent[sink] < 0:
            break
        push = None
        v = sink
        while v != source:
            u = parent[v]
            c = cap[u][v]
            push = c if push is None or c < push else push
            v = u
        v = sink
        while v != source:
            u = parent[v]
            cap[u][v] -= push
            cap[v][u] = cap[v].get(u, 0) + push
            v = u
        flow += push
    reach = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in order[u]:
            if v not in reach and cap[u].get(v, 0) > 0:
                reach.add(v)
                queue.append(v)
    if flow >= sentinel:
        raise Infeasible("forcing makes every cut infinite")
    return MinCut(flow, frozenset(reach))
