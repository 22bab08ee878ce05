"""Alpha-modulators: verification, exact computation and decompositions.

A set ``S`` is an alpha-modulator of width ``k`` when ``|S| <= k`` and every
component of ``G - S`` has independence number at most ``k``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import TYPE_CHECKING, Any, Iterable, Sequence

from .errors import CapExceeded, ParseError
from .graphcore import (
    DEFAULT_ALPHA_CAP,
    Graph,
    connected_components,
    independence_number_of,
    independence_upper_bound,
    mask_components,
    to_mask,
)

if TYPE_CHECKING:  # pragma: no cover
    from .geometry import ObjectSet

AMOD_CAP = 18


@dataclass(frozen=True, eq=False)
class ModulatorDecomposition:
    graph: Graph
    modulator: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]
    alpha_bounds: tuple[int, ...]
    k: int
    info: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.components) != len(self.alpha_bounds):
            raise ValueError("one alpha bound per component required")
        expected = connected_components(self.graph, self.modulator)
        if list(self.components) != expected:
            raise ValueError("components must be exactly the components of G - S")

    @classmethod
    def create(
        cls,
        graph: Graph,
        modulator: Iterable[int],
        components: Sequence[Sequence[int]] | None = None,
        alpha_bounds: Sequence[int] | None = None,
        info: dict[str, Any] | None = None,
    ) -> ModulatorDecomposition:
        """Fill in components and (exact or clique-cover) bounds when not supplied."""
        sep = tuple(sorted(set(modulator)))
        comps = connected_components(graph, sep) if components is None else [tuple(c) for c in components]
        if alpha_bounds is None:
            alpha_bounds = [certified_alpha(graph, c) for c in comps]
        bounds = tuple(int(b) for b in alpha_bounds)
        k = max([len(sep), *bounds]) if (sep or bounds) else 0
        return cls(graph, sep, tuple(comps), bounds, k, dict(info or {}))

    @property
    def q(self) -> int:
        return len(self.components)

    def to_json(self) -> dict[str, Any]:
        return {
            "modulator": list(self.modulator),
            "components": [list(c) for c in self.components],
            "alpha_bounds": list(self.alpha_bounds),
            "k": self.k,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json()) + "\n"


def certified_alpha(g: Graph, comp: Sequence[int], cap: int = DEFAULT_ALPHA_CAP) -> int:
    """Exact alpha under the cap, greedy clique cover above it."""
    if len(comp) <= cap:
        return independence_number_of(g, comp, cap=None)
    return independence_upper_bound(g, comp)


def decomposition_from_json(g: Graph, data: dict[str, Any]) -> ModulatorDecomposition:
    try:
        sep = [int(v) for v in data["modulator"]]
        comps = [tuple(int(v) for v in c) for c in data["components"]]
        bounds = [int(b) for b in data["alpha_bounds"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad decomposition: {exc}") from exc
    try:
        dec = ModulatorDecomposition.create(g, sep, comps, bounds)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if "k" in data and int(data["k"]) != dec.k:
        raise ParseError(f"decomposition declares k={data['k']} but implies k={dec.k}")
    return dec


def loads_decomposition(g: Graph, text: str) -> ModulatorDecomposition:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return decomposition_from_json(g, data)


def verify_modulator(g: Graph, s: Iterable[int], k: int, cap: int = DEFAULT_ALPHA_CAP) -> bool:
    """True iff ``|s| <= k`` and every component of ``g - s`` has exact alpha ``<= k``."""
    sep = set(s)
    if len(sep) > k:
        return False
    for comp in connected_components(g, sep):
        if len(comp) <= k:
            continue
        if len(comp) > cap:
            raise CapExceeded(f"component of size {len(comp)} exceeds the exact alpha cap {cap}")
        if independence_number_of(g, comp, cap=None) > k:
            return False
    return True


def _alpha_table(g: Graph) -> list[int]:
    """alpha of every induced subgraph, indexed by vertex bitmask."""
    n = g.vertex_count
    masks = g.masks
    table = [0] * (1 << n)
    for m in range(1, 1 << n):
        low = m & -m
        v = low.bit_length() - 1
        rest = m ^ low
        table[m] = max(table[rest], 1 + table[rest & ~masks[v]])
    return table


def amod_exact(g: Graph, cap: int = AMOD_CAP) -> tuple[int, tuple[int, ...]]:
    """Smallest width ``k`` of an alpha-modulator and the first witness.

    Tries ``k = 0, 1, 2, ...``; for each ``k`` scans candidate sets by size and
    then lexicographically, returning the first that passes the modulator test.
    """
    n = g.vertex_count
    if n > cap:
        raise CapExceeded(f"amod_exact is capped at {cap} vertices, graph has {n}")
    if n == 0:
        return 0, ()
    alpha = _alpha_table(g)
    masks = g.masks
    full = (1 << n) - 1
    worst: dict[int, int] = {}

    def widest_component(smask: int) -> int:
        got = worst.get(smask)
        if got is None:
            got = max((alpha[c] for c in mask_components(masks, full & ~smask)), default=0)
            worst[smask] = got
        return got

    for k in range(n + 1):
        for size in range(k + 1):
            for sep in combinations(range(n), size):
                if widest_component(to_mask(sep)) <= k:
                    return k, sep
    raise AssertionError("unreachable: S = V always works")


def decomposition_from_geometry(
    f: ObjectSet, graph: Graph | None = None, cap: int = DEFAULT_ALPHA_CAP
) -> ModulatorDecomposition:
    """Slab separator with component bounds tightened by exact alpha under the cap."""
    from .geometry import slab_separator

    dec = slab_separator(f, graph)
    bounds = []
    for comp, cert in zip(dec.components, dec.alpha_bounds):
        if len(comp) <= cap:
            bounds.append(min(cert, independence_number_of(dec.graph, comp, cap=None)))
        else:
            bounds.append(cert)
    return ModulatorDecomposition.create(dec.graph, dec.modulator, dec.components, bounds, dec.info)


def join_graph(g: Graph) -> Graph:
    """``G + G``: two disjoint copies with every cross pair joined."""
    n = g.vertex_count
    edges = list(g.edges())
    edges += [(u + n, v + n) for u, v in g.edges()]
    edges += [(u, v + n) for u in range(n) for v in range(n)]
    return Graph.from_edges(2 * n, edges)


def two_level_bags(dec: ModulatorDecomposition) -> list[tuple[int, ...]]:
    """Bags of the star-shaped tree decomposition: ``S`` at the root, ``S ∪ C`` at the leaves."""
    sep = tuple(dec.modulator)
    bags = [sep]
    for comp in dec.components:
        bags.append(tuple(sorted(sep + comp)))
    return bags


def random_verified_modulator(g: Graph, rng, max_size: int) -> ModulatorDecomposition:
    """A random vertex subset turned into an exact-width decomposition."""
    size = rng.randint(0, min(max_size, g.vertex_count))
    sep = sorted(rng.sample(range(g.vertex_count), size))
    dec = ModulatorDecomposition.create(g, sep)
    assert verify_modulator(g, dec.modulator, dec.k)
    return dec
