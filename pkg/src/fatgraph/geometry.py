"""Fat objects, their intersection graphs, and the slab separator.

Objects are balls or convex polytopes (given by their vertices). Each object
carries a declared inner radius and outer diameter; an :class:`ObjectSet`
checks that all objects are similarly sized and fat with respect to a common
``scale`` and fatness constant ``beta``.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Any, Iterable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, cKDTree

from .errors import DegenerateGeometry, InvalidObjectSet, ParseError
from .graphcore import Graph, connected_components, independence_number_of
from .modulator import ModulatorDecomposition

DEFAULT_TOLERANCE = 1e-9
_SEB_SEED = 20240601

Point = tuple[float, ...]


@dataclass(frozen=True)
class Ball:
    center: Point
    radius: float


@dataclass(frozen=True)
class Polytope:
    vertices: tuple[Point, ...]


@dataclass(frozen=True, eq=False)
class GeomObject:
    shape: Ball | Polytope
    declared_inradius: float
    declared_outdiameter: float
    label: str | None = None

    def __post_init__(self) -> None:
        if isinstance(self.shape, Ball):
            if self.shape.radius <= 0:
                raise InvalidObjectSet("ball radius must be positive")
        else:
            pts = self.shape.vertices
            if len(pts) < len(pts[0]) + 1:
                raise InvalidObjectSet("a polytope needs at least d+1 vertices")
            if all(p == pts[0] for p in pts):
                raise DegenerateGeometry("polytope vertices all coincide")
        if self.declared_inradius <= 0 or self.declared_outdiameter <= 0:
            raise InvalidObjectSet("declared sizes must be positive")

    @classmethod
    def ball(cls, center: Sequence[float], radius: float, label: str | None = None) -> GeomObject:
        r = float(radius)
        return cls(Ball(tuple(float(x) for x in center), r), r, 2.0 * r, label)

    @classmethod
    def polytope(
        cls,
        vertices: Iterable[Sequence[float]],
        inradius: float | None = None,
        outdiameter: float | None = None,
        label: str | None = None,
    ) -> GeomObject:
        """Build a polytope; missing sizes are computed (Chebyshev ball, enclosing ball)."""
        pts = tuple(tuple(float(x) for x in p) for p in vertices)
        if not pts:
            raise InvalidObjectSet("polytope without vertices")
        if all(p == pts[0] for p in pts):
            raise DegenerateGeometry("polytope vertices all coincide")
        if inradius is None:
            inradius = polytope_inradius(pts)
        if outdiameter is None:
            outdiameter = 2.0 * smallest_enclosing_ball(pts)[1]
        return cls(Polytope(pts), float(inradius), float(outdiameter), label)

    @property
    def dim(self) -> int:
        if isinstance(self.shape, Ball):
            return len(self.shape.center)
        return len(self.shape.vertices[0])

    @property
    def kind(self) -> str:
        return "ball" if isinstance(self.shape, Ball) else "polytope"

    @cached_property
    def enclosing_ball(self) -> tuple[Point, float]:
        if isinstance(self.shape, Ball):
            return self.shape.center, self.shape.radius
        return smallest_enclosing_ball(self.shape.vertices)

    @cached_property
    def vertex_array(self) -> np.ndarray:
        assert isinstance(self.shape, Polytope)
        return np.asarray(self.shape.vertices, dtype=float)


def object_center(o: GeomObject) -> Point:
    """Center of the smallest enclosing ball."""
    return o.enclosing_ball[0]


@dataclass(frozen=True, eq=False)
class ObjectSet:
    dim: int
    beta: float
    objects: tuple[GeomObject, ...]
    scale: float = 1.0
    tolerance: float = DEFAULT_TOLERANCE
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidObjectSet("dimension must be positive")
        if self.beta < 1:
            raise InvalidObjectSet("beta must be at least 1")
        if self.scale <= 0:
            raise InvalidObjectSet("scale must be positive")
        if self.tolerance < 0:
            raise InvalidObjectSet("tolerance must be nonnegative")
        slack = 1e-9
        for i, o in enumerate(self.objects):
            if o.dim != self.dim:
                raise InvalidObjectSet(f"object {i} has dimension {o.dim}, expected {self.dim}")
            if o.declared_inradius < self.scale / 2 * (1 - slack):
                raise InvalidObjectSet(f"object {i}: inradius {o.declared_inradius} < scale/2")
            if o.declared_outdiameter > self.beta * self.scale * (1 + slack):
                raise InvalidObjectSet(
                    f"object {i}: outdiameter {o.declared_outdiameter} > beta*scale"
                )

    def __len__(self) -> int:
        return len(self.objects)

    @cached_property
    def centers(self) -> np.ndarray:
        if not self.objects:
            return np.zeros((0, self.dim))
        return np.asarray([object_center(o) for o in self.objects], dtype=float)

    @classmethod
    def normalized(
        cls,
        dim: int,
        objects: Sequence[GeomObject],
        tolerance: float = DEFAULT_TOLERANCE,
        meta: dict[str, Any] | None = None,
    ) -> ObjectSet:
        """Pick ``scale`` and ``beta`` as tight as the declared object sizes allow."""
        scale = 2.0 * min(o.declared_inradius for o in objects)
        beta = max(1.0, max(o.declared_outdiameter for o in objects) / scale)
        return cls(dim, beta, tuple(objects), scale, tolerance, dict(meta or {}))


# ---------------------------------------------------------------------------
# smallest enclosing ball


def _ball_from_boundary(boundary: list[np.ndarray]) -> tuple[np.ndarray | None, float]:
    if not boundary:
        return None, -1.0
    p0 = boundary[0]
    if len(boundary) == 1:
        return p0, 0.0
    a = np.asarray([p - p0 for p in boundary[1:]])
    gram = 2.0 * a @ a.T
    rhs = np.einsum("ij,ij->i", a, a)
    lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    c = p0 + lam @ a
    return c, float(np.dot(c - p0, c - p0))


def _inside(p: np.ndarray, c: np.ndarray | None, r2: float) -> bool:
    if c is None:
        return False
    d2 = float(np.dot(p - c, p - c))
    return d2 <= r2 * (1 + 1e-12) + 1e-24


def _welzl(pts: list[np.ndarray], n: int, boundary: list[np.ndarray], dim: int):
    if n == 0 or len(boundary) == dim + 1:
        return _ball_from_boundary(boundary)
    c, r2 = _welzl(pts, n - 1, boundary, dim)
    p = pts[n - 1]
    if _inside(p, c, r2):
        return c, r2
    return _welzl(pts, n - 1, boundary + [p], dim)


def smallest_enclosing_ball(points: Iterable[Sequence[float]], seed: int = _SEB_SEED) -> tuple[Point, float]:
    """Minimum enclosing ball by Welzl's randomized recursion (fixed seed).

    The returned radius is the maximum distance from the center to an input
    point, so every point is inside the ball up to rounding.
    """
    uniq = sorted({tuple(float(x) for x in p) for p in points})
    if not uniq:
        raise ValueError("smallest_enclosing_ball needs at least one point")
    if len(uniq) == 1:
        return uniq[0], 0.0
    random.Random(seed).shuffle(uniq)
    arrs = [np.asarray(p) for p in uniq]
    dim = len(uniq[0])
    c, _ = _welzl(arrs, len(arrs), [], dim)
    assert c is not None
    radius = max(float(np.linalg.norm(p - c)) for p in arrs)
    return tuple(float(x) for x in c), radius


def polytope_inradius(vertices: Sequence[Sequence[float]]) -> float:
    """Radius of the largest ball inside the convex hull (Chebyshev center LP)."""
    pts = np.asarray(vertices, dtype=float)
    try:
        hull = ConvexHull(pts)
    except Exception as exc:  # qhull raises its own error type
        raise DegenerateGeometry(f"polytope has empty interior: {exc}") from exc
    normals = hull.equations[:, :-1]
    offsets = hull.equations[:, -1]
    norms = np.linalg.norm(normals, axis=1)
    dim = pts.shape[1]
    cost = np.zeros(dim + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([normals, norms[:, None]])
    res = linprog(cost, A_ub=a_ub, b_ub=-offsets, bounds=[(None, None)] * dim + [(0, None)])
    if not res.success:
        raise DegenerateGeometry("inradius LP failed")
    return float(res.x[-1])


# ---------------------------------------------------------------------------
# distances


def _closest_on_simplex(simplex: list[np.ndarray]) -> tuple[np.ndarray, list[int]]:
    """Point of the simplex's convex hull nearest the origin, and its support face."""
    best_pt: np.ndarray | None = None
    best_n2 = math.inf
    best_idx: list[int] = []
    k = len(simplex)
    for size in range(1, k + 1):
        for idx in combinations(range(k), size):
            p0 = simplex[idx[0]]
            if size == 1:
                pt = p0
            else:
                a = np.asarray([simplex[i] - p0 for i in idx[1:]])
                gram = a @ a.T
                if abs(np.linalg.det(gram)) <= 1e-18 * max(1.0, float(np.trace(gram))) ** (size - 1):
                    continue
                mu = np.linalg.solve(gram, -(a @ p0))
                if mu.min() < -1e-12 or mu.sum() > 1 + 1e-12:
                    continue
                pt = p0 + mu @ a
            n2 = float(np.dot(pt, pt))
            if n2 < best_n2 - 1e-30:
                best_pt, best_n2, best_idx = pt, n2, list(idx)
    assert best_pt is not None
    return best_pt, best_idx


def gjk_distance(a: np.ndarray, b: np.ndarray, max_iter: int = 100) -> float:
    """Euclidean distance between the convex hulls of point sets ``a`` and ``b``.

    Iterates on the Minkowski difference with support-point queries and keeps a
    simplex of at most ``d+1`` support points; zero means the hulls meet.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    dim = a.shape[1]

    def support(direction: np.ndarray) -> np.ndarray:
        return a[int(np.argmax(a @ direction))] - b[int(np.argmin(b @ direction))]

    v = a[0] - b[0]
    simplex = [v]
    for _ in range(max_iter):
        vv = float(np.dot(v, v))
        if vv <= 1e-30:
            return 0.0
        w = support(-v)
        if vv - float(np.dot(v, w)) <= 1e-13 * vv:
            break
        if any(np.array_equal(w, s) for s in simplex):
            break
        simplex.append(w)
        v, keep = _closest_on_simplex(simplex)
        simplex = [simplex[i] for i in keep]
        if len(simplex) == dim + 1:
            return 0.0
    return math.sqrt(float(np.dot(v, v)))


def object_gap(a: GeomObject, b: GeomObject) -> float:
    """Signed clearance: ball pairs report center distance minus radii (may be
    negative); any pair with a polytope reports the hull distance (>= 0)."""
    if isinstance(a.shape, Ball) and isinstance(b.shape, Ball):
        d = math.dist(a.shape.center, b.shape.center)
        return d - a.shape.radius - b.shape.radius
    if isinstance(a.shape, Ball):
        a, b = b, a
    if isinstance(b.shape, Ball):
        d = gjk_distance(a.vertex_array, np.asarray([b.shape.center]))
        return max(0.0, d - b.shape.radius)
    return gjk_distance(a.vertex_array, b.vertex_array)


def objects_intersect(a: GeomObject, b: GeomObject, tolerance: float = DEFAULT_TOLERANCE) -> bool:
    if a.dim != b.dim:
        raise ValueError("objects live in different dimensions")
    return object_gap(a, b) <= tolerance


# ---------------------------------------------------------------------------
# intersection graphs


def _candidate_pairs(f: ObjectSet) -> np.ndarray:
    """All pairs whose enclosing-ball centers are close enough to possibly touch."""
    n = len(f.objects)
    if n < 2:
        return np.zeros((0, 2), dtype=np.int64)
    reach = 2.0 * max(o.enclosing_ball[1] for o in f.objects)
    reach = max(reach, 0.0) * (1 + 1e-9) + 2 * f.tolerance + 1e-12
    tree = cKDTree(f.centers)
    pairs = tree.query_pairs(reach, output_type="ndarray")
    if len(pairs) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    pairs = np.sort(pairs, axis=1)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def pair_gaps(f: ObjectSet) -> tuple[np.ndarray, np.ndarray]:
    """Candidate pairs (sorted) and their gaps."""
    pairs = _candidate_pairs(f)
    gaps = np.empty(len(pairs))
    balls = [isinstance(o.shape, Ball) for o in f.objects]
    if all(balls) and len(pairs):
        centers = np.asarray([o.shape.center for o in f.objects])
        radii = np.asarray([o.shape.radius for o in f.objects])
        diff = centers[pairs[:, 0]] - centers[pairs[:, 1]]
        gaps = np.sqrt(np.einsum("ij,ij->i", diff, diff)) - radii[pairs[:, 0]] - radii[pairs[:, 1]]
    else:
        for k, (i, j) in enumerate(pairs):
            gaps[k] = object_gap(f.objects[i], f.objects[j])
    return pairs, gaps


def build_intersection_graph(f: ObjectSet) -> Graph:
    """One vertex per object, an edge for every intersecting (or touching) pair.

    Candidate pairs come from a k-d tree over enclosing-ball centers, so only
    pairs that can possibly touch are tested exactly.
    """
    pairs, gaps = pair_gaps(f)
    keep = gaps <= f.tolerance
    edges = [(int(i), int(j)) for (i, j) in pairs[keep]]
    labels = None
    if f.objects and all(o.label is not None for o in f.objects):
        labels = [o.label for o in f.objects]
    return Graph.from_edges(len(f.objects), edges, labels=labels)


def intersection_graph_all_pairs(f: ObjectSet) -> Graph:
    """Reference construction testing every pair."""
    edges = []
    for i, j in combinations(range(len(f.objects)), 2):
        if objects_intersect(f.objects[i], f.objects[j], f.tolerance):
            edges.append((i, j))
    return Graph.from_edges(len(f.objects), edges)


def adjacency_slack(f: ObjectSet, designed: Graph | None = None) -> float:
    """Smallest gap among non-adjacent candidate pairs.

    With ``designed`` given, pairs that are edges of ``designed`` are skipped
    and the result is the margin of every other pair over the contact
    threshold (negative when an undesired contact exists).
    """
    pairs, gaps = pair_gaps(f)
    best = math.inf
    for (i, j), gap in zip(pairs, gaps):
        i, j = int(i), int(j)
        if designed is not None:
            if designed.has_edge(i, j):
                continue
            best = min(best, gap)
        elif gap > f.tolerance:
            best = min(best, gap)
    return best


# ---------------------------------------------------------------------------
# slab separator


def slab_count(n: int, dim: int) -> int:
    """Smallest ``p >= 2`` with ``p^(d+1) >= n``."""
    p = max(1, int(math.floor(n ** (1.0 / (dim + 1)))))
    while p ** (dim + 1) < n:
        p += 1
    while p > 1 and (p - 1) ** (dim + 1) >= n:
        p -= 1
    return max(p, 2)


def separator_size_bound(n: int, dim: int) -> float:
    return dim * n ** (1 - 1 / (dim + 1))


def geometric_alpha_certificate(n: int, dim: int, beta: float) -> float:
    return (2 * beta * dim) ** dim * n ** (1 - 1 / (dim + 1))


@dataclass(frozen=True)
class SlabChoice:
    p: int
    width: float
    residues: tuple[int, ...]
    class_sizes: tuple[tuple[int, ...], ...]


def slab_choice(f: ObjectSet) -> SlabChoice:
    """Per axis, the residue class of slabs holding the fewest centers."""
    n = len(f.objects)
    p = slab_count(n, f.dim)
    width = f.beta * f.scale
    slabs = np.floor(f.centers / width).astype(np.int64) % p if n else np.zeros((0, f.dim), np.int64)
    residues = []
    sizes = []
    for axis in range(f.dim):
        counts = np.bincount(slabs[:, axis], minlength=p) if n else np.zeros(p, np.int64)
        residues.append(int(np.argmin(counts)))
        sizes.append(tuple(int(c) for c in counts))
    return SlabChoice(p, width, tuple(residues), tuple(sizes))


def slab_separator(f: ObjectSet, graph: Graph | None = None) -> ModulatorDecomposition:
    """Remove, per axis, the lightest residue class of slabs of width ``beta*scale``.

    Component alpha bounds carry the geometric certificate (also capped by the
    component size); :func:`fatgraph.modulator.decomposition_from_geometry`
    tightens them further.
    """
    n = len(f.objects)
    if graph is None:
        graph = build_intersection_graph(f)
    choice = slab_choice(f)
    if n:
        slabs = np.floor(f.centers / choice.width).astype(np.int64) % choice.p
        hit = np.zeros(n, dtype=bool)
        for axis, res in enumerate(choice.residues):
            hit |= slabs[:, axis] == res
        sep = tuple(int(v) for v in np.flatnonzero(hit))
    else:
        sep = ()
    comps = connected_components(graph, sep)
    cert = math.floor(geometric_alpha_certificate(max(n, 1), f.dim, f.beta) + 1e-9)
    bounds = tuple(min(cert, len(c)) for c in comps)
    info = {
        "p": choice.p,
        "residues": list(choice.residues),
        "certificate": cert,
        "size_bound": separator_size_bound(n, f.dim),
    }
    return ModulatorDecomposition.create(graph, sep, comps, bounds, info=info)


def center_extent(f: ObjectSet, vertices: Iterable[int]) -> float:
    """Largest per-axis spread of enclosing-ball centers over ``vertices``."""
    idx = list(vertices)
    if not idx:
        return 0.0
    pts = f.centers[idx]
    return float((pts.max(axis=0) - pts.min(axis=0)).max())


def exact_component_alpha(g: Graph, comp: Sequence[int], cap: int = 25) -> int | None:
    if len(comp) > cap:
        return None
    return independence_number_of(g, comp, cap=None)


# ---------------------------------------------------------------------------
# JSON


def object_set_to_json(f: ObjectSet) -> dict[str, Any]:
    objs = []
    for i, o in enumerate(f.objects):
        rec: dict[str, Any] = {"id": i, "kind": o.kind}
        if isinstance(o.shape, Ball):
            rec["center"] = list(o.shape.center)
            rec["radius"] = o.shape.radius
        else:
            rec["vertices"] = [list(p) for p in o.shape.vertices]
        rec["inradius"] = o.declared_inradius
        rec["outdiameter"] = o.declared_outdiameter
        if o.label is not None:
            rec["label"] = o.label
        objs.append(rec)
    out: dict[str, Any] = {"dim": f.dim, "beta": f.beta, "scale": f.scale}
    if f.tolerance != DEFAULT_TOLERANCE:
        out["tolerance"] = f.tolerance
    out["objects"] = objs
    return out


def dumps_object_set(f: ObjectSet) -> str:
    return json.dumps(object_set_to_json(f), indent=1) + "\n"


def object_set_from_json(data: dict[str, Any]) -> ObjectSet:
    try:
        dim = int(data["dim"])
        beta = float(data["beta"])
        scale = float(data.get("scale", 1.0))
        tol = float(data.get("tolerance", DEFAULT_TOLERANCE))
        raw = sorted(data["objects"], key=lambda r: int(r["id"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad object set: {exc}") from exc
    if [int(r["id"]) for r in raw] != list(range(len(raw))):
        raise ParseError("object ids must be 0..n-1")
    objs = []
    for r in raw:
        kind = r.get("kind")
        label = r.get("label")
        if kind == "ball":
            o = GeomObject.ball(r["center"], float(r["radius"]), label)
            if "inradius" in r and abs(float(r["inradius"]) - o.declared_inradius) > 1e-12:
                raise InvalidObjectSet("ball inradius must equal its radius")
        elif kind == "polytope":
            o = GeomObject.polytope(
                r["vertices"], float(r["inradius"]), float(r["outdiameter"]), label
            )
        else:
            raise ParseError(f"unknown object kind {kind!r}")
        objs.append(o)
    return ObjectSet(dim, beta, tuple(objs), scale, tol)


def loads_object_set(text: str) -> ObjectSet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return object_set_from_json(data)
