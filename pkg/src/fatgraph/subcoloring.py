"""2-Subcoloring: brute force, partial extension, and the modulator DP.

A 2-subcoloring colors every vertex 0 or 1 so that each color class induces
a disjoint union of cliques (no monochromatic induced P3).

The search engine shared by :func:`brute_subcoloring` and
:func:`extend_partial_subcoloring` keeps, per color, the bitmask of assigned
vertices. Giving vertex ``v`` color ``c`` is legal iff its ``c``-colored
neighbors are empty (``v`` opens a new cluster) or form exactly one whole
existing cluster. After each assignment, vertices that lost an option are
re-examined and forced when a single option remains; optionally every
frontier vertex is probed both ways (failed-literal detection).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import CapExceeded, InvalidPartial
from .graphcore import Graph, connected_components, induced_subgraph, is_cluster_graph, iter_bits, to_mask
from .modulator import ModulatorDecomposition

BRUTE_CAP = 22

Coloring = tuple[int, ...]


class _Engine:
    """Backtracking 2-subcoloring search over the vertices in ``live``."""

    def __init__(self, g: Graph, live: int, budget: int | None = None, probe: bool = True):
        self.masks = g.masks
        self.live = live
        self.budget = budget
        self.probe = probe
        self.color = [-1] * g.vertex_count
        self.cls = [0, 0]
        self.clusters = 0
        self.trail: list[tuple[int, int, bool]] = []

    # -- primitive moves -------------------------------------------------
    def legal(self, v: int, c: int) -> bool:
        nv = self.masks[v] & self.cls[c]
        if not nv:
            return self.budget is None or self.clusters < self.budget
        a = (nv & -nv).bit_length() - 1
        return nv == (self.masks[a] & self.cls[c]) | (1 << a)

    def assign(self, v: int, c: int) -> int:
        opened = not (self.masks[v] & self.cls[c])
        self.cls[c] |= 1 << v
        self.color[v] = c
        self.clusters += opened
        self.trail.append((v, c, opened))
        cluster = (self.masks[v] & self.cls[c]) | (1 << v)
        touched = 0
        for u in iter_bits(cluster):
            touched |= self.masks[u]
        return touched & self.live & ~(self.cls[0] | self.cls[1])

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            v, c, opened = self.trail.pop()
            self.cls[c] &= ~(1 << v)
            self.color[v] = -1
            self.clusters -= opened

    @property
    def unassigned(self) -> int:
        return self.live & ~(self.cls[0] | self.cls[1])

    # -- inference -------------------------------------------------------
    def propagate(self, pending: int) -> bool:
        while pending:
            low = pending & -pending
            u = low.bit_length() - 1
            pending ^= low
            if self.color[u] >= 0:
                continue
            ok0 = self.legal(u, 0)
            ok1 = self.legal(u, 1)
            if not ok0 and not ok1:
                return False
            if ok0 != ok1:
                pending |= self.assign(u, 0 if ok0 else 1)
        return True

    def probe_all(self) -> bool:
        """Failed-literal probing on frontier vertices until nothing changes."""
        changed = True
        while changed:
            changed = False
            assigned = self.cls[0] | self.cls[1]
            frontier = 0
            for v in iter_bits(assigned):
                frontier |= self.masks[v]
            frontier &= self.unassigned
            for u in iter_bits(frontier):
                if self.color[u] >= 0:
                    continue
                viable = []
                for c in (0, 1):
                    if not self.legal(u, c):
                        continue
                    mark = len(self.trail)
                    ok = self.propagate(self.assign(u, c))
                    self.undo(mark)
                    if ok:
                        viable.append(c)
                if not viable:
                    return False
                if len(viable) == 1:
                    if not self.propagate(self.assign(u, viable[0])):
                        return False
                    changed = True
        return True

    def pick(self) -> int:
        assigned = self.cls[0] | self.cls[1]
        best, best_key = -1, None
        for u in iter_bits(self.unassigned):
            key = (-(self.masks[u] & assigned).bit_count(), u)
            if best_key is None or key < best_key:
                best, best_key = u, key
        return best

    def search(self) -> bool:
        if self.probe and not self.probe_all():
            return False
        if not self.unassigned:
            return True
        u = self.pick()
        for c in (0, 1):
            if not self.legal(u, c):
                continue
            mark = len(self.trail)
            if self.propagate(self.assign(u, c)) and self.search():
                return True
            self.undo(mark)
        return False

    def run(self, fixed: Mapping[int, int] | None = None) -> dict[int, int] | None:
        if fixed:
            for v in sorted(fixed):
                c = fixed[v]
                if not self.legal(v, c):
                    return None
                self.assign(v, c)
        if not self.propagate(self.unassigned):
            return None
        if not self.search():
            return None
        return {v: self.color[v] for v in iter_bits(self.live)}


def _check_cap(g: Graph, cap: int | None) -> None:
    if cap is not None and g.vertex_count > cap:
        raise CapExceeded(f"brute subcoloring capped at {cap} vertices, graph has {g.vertex_count}")


def brute_subcoloring(g: Graph, cap: int | None = BRUTE_CAP, probe: bool = True) -> Coloring | None:
    """Exhaustive search for a 2-subcoloring; each connected component is solved alone.

    The search base is 2^n colorings; pruning only discards colorings that
    already contain a monochromatic induced P3 among assigned vertices, so the
    answer is exact. ``cap=None`` lifts the size cap.
    """
    _check_cap(g, cap)
    colors = [0] * g.vertex_count
    for comp in connected_components(g):
        eng = _Engine(g, to_mask(comp), probe=probe)
        got = eng.run()
        if got is None:
            return None
        for v, c in got.items():
            colors[v] = c
    return tuple(colors)


def unpruned_subcolorable(g: Graph) -> bool:
    """Reference decision: test every one of the 2^n colorings with the P3 scan."""
    n = g.vertex_count
    for code in range(1 << n):
        if verify_subcoloring(g, tuple((code >> v) & 1 for v in range(n))):
            return True
    return False


def extend_partial_subcoloring(
    g: Graph, partial: Mapping[int, int], cluster_budget: int, probe: bool = True
) -> Coloring | None:
    """Complete ``partial`` to a 2-subcoloring with at most ``cluster_budget`` clusters.

    Raises ``InvalidPartial`` if the fixed part already has a monochromatic
    induced P3.
    """
    for c in (0, 1):
        ok, triple = is_cluster_graph(g, [v for v, col in partial.items() if col == c])
        if not ok:
            raise InvalidPartial(f"color {c} contains induced P3 {triple}")
    if any(col not in (0, 1) for col in partial.values()):
        raise InvalidPartial("colors must be 0 or 1")
    eng = _Engine(g, (1 << g.vertex_count) - 1, budget=cluster_budget, probe=probe)
    got = eng.run(partial)
    if got is None:
        return None
    return tuple(got[v] for v in range(g.vertex_count))


def verify_subcoloring(g: Graph, colors: Sequence[int]) -> bool:
    if len(colors) != g.vertex_count or any(c not in (0, 1) for c in colors):
        return False
    for c in (0, 1):
        ok, _ = is_cluster_graph(g, [v for v in range(g.vertex_count) if colors[v] == c])
        if not ok:
            return False
    return True


def cluster_count(g: Graph, colors: Sequence[int], vertices: Iterable[int] | None = None) -> int:
    """Number of monochromatic cliques (clusters) of a valid coloring."""
    verts = list(range(g.vertex_count)) if vertices is None else list(vertices)
    total = 0
    for c in (0, 1):
        cls = [v for v in verts if colors[v] == c]
        gone = set(range(g.vertex_count)) - set(cls)
        total += len(connected_components(g, gone))
    return total


# ---------------------------------------------------------------------------
# the DP over a modulator decomposition


@dataclass(frozen=True)
class SignatureState:
    """``mu`` and ``sigma`` as bitmasks over modulator positions (sigma bit set = top)."""

    mu: int
    sigma: int


@dataclass
class SubcoloringDP:
    decomp: ModulatorDecomposition
    probe: bool = True
    tables: list[dict[SignatureState, tuple[SignatureState | None, dict[int, int]]]] = field(
        default_factory=list
    )
    extension_calls: int = 0

    def __post_init__(self) -> None:
        g = self.decomp.graph
        self.S = list(self.decomp.modulator)
        self.pos = {v: i for i, v in enumerate(self.S)}
        self.s_adj = [
            to_mask(self.pos[w] for w in g.adjacency[v] if w in self.pos) for v in self.S
        ]
        self._memo: dict[tuple, Coloring | None] = {}

    # -- helpers on the modulator ---------------------------------------
    def mu_clusters(self, mu: int) -> list[int] | None:
        """Clusters of ``G[S]`` under ``mu`` (position bitmasks), or None if invalid."""
        s = len(self.S)
        out = []
        for c in (0, 1):
            cls = 0
            for i in range(s):
                if ((mu >> i) & 1) == c:
                    cls |= 1 << i
            rest = cls
            while rest:
                i = (rest & -rest).bit_length() - 1
                clique = (self.s_adj[i] & cls) | (1 << i)
                for j in iter_bits(clique):
                    if (self.s_adj[j] & cls) | (1 << j) != clique:
                        return None
                out.append(clique)
                rest &= ~clique
        out.sort()
        return out

    def stage_zero(self) -> dict[SignatureState, tuple[None, dict[int, int]]]:
        table: dict[SignatureState, tuple[None, dict[int, int]]] = {}
        for mu in range(1 << len(self.S)):
            clusters = self.mu_clusters(mu)
            if clusters is None:
                continue
            for pick in range(1 << len(clusters)):
                sigma = 0
                for b, cl in enumerate(clusters):
                    if (pick >> b) & 1:
                        sigma |= cl
                table[SignatureState(mu, sigma)] = (None, {})
        return table

    def _rejects(self, mu: int, sigma2: int) -> bool:
        """Adjacent same-colored modulator vertices must agree on sigma."""
        for i in range(len(self.S)):
            for j in iter_bits(self.s_adj[i]):
                if j > i and ((mu >> i) & 1) == ((mu >> j) & 1):
                    if ((sigma2 >> i) & 1) != ((sigma2 >> j) & 1):
                        return True
        return False

    def transition(
        self, t: int, state: SignatureState, sigma2: int
    ) -> dict[int, int] | None:
        """Coloring of ``C_t`` realizing the move to ``(mu, sigma2)``, if any."""
        g = self.decomp.graph
        comp = self.decomp.components[t]
        mu, sigma1 = state.mu, state.sigma
        if self._rejects(mu, sigma2):
            return None
        full = (1 << len(self.S)) - 1
        bottom = full & ~sigma2
        closed = bottom | sigma1
        forced: dict[int, int] = {}
        for u in comp:
            nbr = to_mask(self.pos[w] for w in g.adjacency[u] if w in self.pos)
            nb = nbr & bottom
            if nb:
                cols = {(mu >> i) & 1 for i in iter_bits(nb)}
                if len(cols) > 1:
                    return None
            want = {1 - ((mu >> i) & 1) for i in iter_bits(nbr & closed)}
            if len(want) > 1:
                return None
            if want:
                forced[u] = want.pop()
        key = (t, mu, tuple(sorted(forced.items())))
        if key not in self._memo:
            self._memo[key] = self._extend(t, mu, forced)
        got = self._memo[key]
        if got is None:
            return None
        return dict(zip(comp, got))

    def _extend(self, t: int, mu: int, forced: dict[int, int]) -> Coloring | None:
        g = self.decomp.graph
        comp = self.decomp.components[t]
        sub, order = induced_subgraph(g, list(self.S) + list(comp))
        local = {v: i for i, v in enumerate(order)}
        partial = {local[v]: (mu >> i) & 1 for i, v in enumerate(self.S)}
        for v, c in forced.items():
            partial[local[v]] = c
        budget = 2 * (len(self.S) + self.decomp.alpha_bounds[t])
        self.extension_calls += 1
        try:
            ext = extend_partial_subcoloring(sub, partial, budget, probe=self.probe)
        except InvalidPartial:
            return None
        if ext is None:
            return None
        return tuple(ext[local[v]] for v in comp)

    def run(self) -> bool:
        self.tables = [self.stage_zero()]
        for t in range(len(self.decomp.components)):
            prev = self.tables[-1]
            nxt: dict[SignatureState, tuple[SignatureState | None, dict[int, int]]] = {}
            for state in sorted(prev, key=lambda s: (s.mu, s.sigma)):
                clusters = self.mu_clusters(state.mu) or []
                free = [cl for cl in clusters if not cl & state.sigma]
                for pick in range(1 << len(free)):
                    sigma2 = state.sigma
                    for b, cl in enumerate(free):
                        if (pick >> b) & 1:
                            sigma2 |= cl
                    target = SignatureState(state.mu, sigma2)
                    if target in nxt:
                        continue
                    ext = self.transition(t, state, sigma2)
                    if ext is not None:
                        nxt[target] = (state, ext)
            self.tables.append(nxt)
            if not nxt:
                return False
        return bool(self.tables[-1])

    def witness(self, stage: int | None = None, state: SignatureState | None = None) -> Coloring:
        """Replay ancestors from ``state`` at ``stage`` (default: first final state)."""
        g = self.decomp.graph
        if stage is None:
            stage = len(self.tables) - 1
        if state is None:
            state = min(self.tables[stage], key=lambda s: (s.mu, s.sigma))
        colors = [-1] * g.vertex_count
        for i, v in enumerate(self.S):
            colors[v] = (state.mu >> i) & 1
        cur: SignatureState | None = state
        for t in range(stage, 0, -1):
            assert cur is not None
            back, ext = self.tables[t][cur]
            for v, c in ext.items():
                colors[v] = c
            cur = back
        return tuple(colors)


def solve_subcoloring(decomp: ModulatorDecomposition, probe: bool = True) -> Coloring | None:
    """Decide 2-subcoloring by DP over the decomposition; returns a witness or None."""
    dp = SubcoloringDP(decomp, probe=probe)
    if not dp.run():
        return None
    return dp.witness()
