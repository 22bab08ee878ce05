"""Brute-force reference implementations, written independently of the package."""

from __future__ import annotations

import itertools
import random
from typing import Sequence

import networkx as nx

from fatgraph.graphcore import Graph


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.vertex_count))
    for u, v in g.edges():
        h.add_edge(u, v, weight=g.weight(u, v) if g.is_weighted else 1)
    return h


def random_graph(rng: random.Random, n: int, p: float, weights: int | None = None) -> Graph:
    edges = []
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < p:
            edges.append((u, v, rng.randint(0, weights)) if weights is not None else (u, v))
    if weights is not None:
        return Graph.from_edges(n, edges, weights={(u, v): w for u, v, w in edges})
    return Graph.from_edges(n, edges)


def alpha(g: Graph, vertices: Sequence[int] | None = None) -> int:
    h = to_nx(g)
    vs = list(range(g.vertex_count)) if vertices is None else list(vertices)
    sub = nx.complement(h.subgraph(vs))
    return max((len(c) for c in nx.find_cliques(sub)), default=0)


def clique_number(g: Graph) -> int:
    return max((len(c) for c in nx.find_cliques(to_nx(g))), default=0)


def min_vertex_cover(g: Graph) -> int:
    n = g.vertex_count
    edges = g.edges()
    for size in range(n + 1):
        for cover in itertools.combinations(range(n), size):
            cs = set(cover)
            if all(u in cs or v in cs for u, v in edges):
                return size
    return n


def components(g: Graph, removed: Sequence[int] = ()) -> list[set[int]]:
    h = to_nx(g)
    h.remove_nodes_from(removed)
    return [set(c) for c in nx.connected_components(h)]


def is_modulator(g: Graph, s: Sequence[int], k: int) -> bool:
    return len(set(s)) <= k and all(alpha(g, c) <= k for c in components(g, s))


def has_induced_p3(g: Graph, vertices: Sequence[int]) -> bool:
    vs = list(vertices)
    for a, b, c in itertools.permutations(vs, 3):
        if a < c and g.has_edge(a, b) and g.has_edge(b, c) and not g.has_edge(a, c):
            return True
    return False


def is_subcoloring(g: Graph, colors: Sequence[int]) -> bool:
    return all(
        not has_induced_p3(g, [v for v in range(g.vertex_count) if colors[v] == c]) for c in (0, 1)
    )


def subcolorable(g: Graph) -> bool:
    n = g.vertex_count
    return any(is_subcoloring(g, bits) for bits in itertools.product((0, 1), repeat=n))


def cut_optimum(g: Graph, s: Sequence[int], t: Sequence[int]) -> int | None:
    """Minimum weight of a feasible cut, or None."""
    h = to_nx(g)
    n = g.vertex_count
    best = None
    for bits in itertools.product((0, 1), repeat=n):
        if any(bits[v] for v in s) or not all(bits[v] for v in t):
            continue
        a = [v for v in range(n) if bits[v] == 0]
        b = [v for v in range(n) if bits[v] == 1]
        if not _same_component(h, a, s) or not _same_component(h, b, t):
            continue
        w = sum(d["weight"] for u, v, d in h.edges(data=True) if bits[u] != bits[v])
        best = w if best is None or w < best else best
    return best


def _same_component(h: nx.Graph, side: Sequence[int], terms: Sequence[int]) -> bool:
    sub = h.subgraph(side)
    comp = nx.node_connected_component(sub, terms[0])
    return all(x in comp for x in terms)


def nae_satisfiable(n: int, clauses: Sequence[Sequence[int]]) -> bool:
    for bits in itertools.product((False, True), repeat=n):
        if all(len({bits[v - 1] for v in c}) == 2 for c in clauses):
            return True
    return False


def all_graphs(n: int):
    pairs = list(itertools.combinations(range(n), 2))
    for code in range(1 << len(pairs)):
        yield Graph.from_edges(n, [pairs[i] for i in range(len(pairs)) if (code >> i) & 1])
