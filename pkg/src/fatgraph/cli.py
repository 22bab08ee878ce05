"""``fatgraph`` command-line front end.

Exit codes: 0 success or "yes", 1 "no", 2 usage or parse error, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .cutuncut import (
    CutUncutInstance,
    brute_cutuncut,
    brute_zero_cut,
    loads_instance,
    solve_cutuncut,
    verify_cut_solution,
)
from .errors import CapExceeded, FatgraphError
from .geometry import (
    GeomObject,
    ObjectSet,
    build_intersection_graph,
    dumps_object_set,
    intersection_graph_all_pairs,
    loads_object_set,
    slab_separator,
)
from .graphcore import Graph, independence_number, read_graph_text, write_graph_text
from .modulator import amod_exact, decomposition_from_geometry, loads_decomposition
from .reduction import CUTUNCUT, VARIANTS, build_abstract_graph, embed_2d, embed_balls, parse_nae3sat, solve_nae_brute
from .subcoloring import brute_subcoloring, solve_subcoloring, verify_subcoloring

EXIT_OK = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_CAP = 3

SEED_ENV = "FATGRAPH_SEED"
BENCH_COLUMNS = ("suite", "d", "n", "seed", "separator_size", "width", "seconds", "result")
INSTANCE_KINDS = ("unit-balls", "fat-boxes")


# ---------------------------------------------------------------------------
# random instances


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def gen_random_instance(kind: str, d: int, n: int, density: float, seed: int) -> ObjectSet:
    """``n`` objects with centers uniform in a cube sized for expected degree ``density``.

    Unit balls have radius 1/2. Fat boxes are axis-parallel with sides in
    ``[1, 2/sqrt(d)]``, so every box has diameter at most twice its width.
    """
    if d < 2 or n < 1:
        raise ValueError("need d >= 2 and n >= 1")
    if kind not in INSTANCE_KINDS:
        raise ValueError(f"kind must be one of {INSTANCE_KINDS}")
    rng = np.random.default_rng(seed)
    if kind == "unit-balls":
        reach = unit_ball_volume(d)
    else:
        hi = 2 / math.sqrt(d)
        reach = (1 + hi) ** d
    side = ((n - 1) * reach / density) ** (1 / d) if n > 1 and density > 0 else 1.0
    centers = rng.uniform(0.0, side, size=(n, d))
    objs = []
    if kind == "unit-balls":
        objs = [GeomObject.ball(c, 0.5) for c in centers]
        return ObjectSet(d, 1.0, tuple(objs), 1.0)
    sides = rng.uniform(1.0, 2 / math.sqrt(d), size=(n, d))
    for c, s in zip(centers, sides):
        corners = [
            [c[a] + (s[a] if (code >> a) & 1 else -s[a]) / 2 for a in range(d)] for code in range(1 << d)
        ]
        half = float(s.min()) / 2
        diam = float(math.sqrt((s**2).sum()))
        objs.append(GeomObject.polytope(corners, inradius=half, outdiameter=diam))
    return ObjectSet(d, 2.0, tuple(objs), 1.0)


def random_terminal_instance(g: Graph, rng: np.random.Generator) -> CutUncutInstance:
    """Weights 0-9 and one S and one T terminal, all drawn from ``rng``."""
    w = {e: int(rng.integers(0, 10)) for e in g.edges()}
    wg = Graph.from_edges(g.vertex_count, g.edges(), weights=w)
    if g.vertex_count < 2:
        return CutUncutInstance.create(wg, list(range(g.vertex_count)), [])
    s, t = (int(x) for x in rng.choice(g.vertex_count, size=2, replace=False))
    return CutUncutInstance.create(wg, [s], [t])


# ---------------------------------------------------------------------------
# benchmark


def bench(suite: str, d: int, sizes: Sequence[int], seeds: Sequence[int], density: float = 4.0) -> str:
    """CSV with columns ``BENCH_COLUMNS``; only ``seconds`` depends on timing."""
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(BENCH_COLUMNS)
    for n in sizes:
        for seed in seeds:
            f = gen_random_instance("unit-balls", d, n, density, seed)
            t0 = time.perf_counter()
            dec = decomposition_from_geometry(f)
            if suite == "separator":
                result = "ok" if len(dec.modulator) <= d * n ** (1 - 1 / (d + 1)) else "over"
            elif suite == "subcoloring":
                result = "yes" if solve_subcoloring(dec) is not None else "no"
            elif suite == "cutuncut":
                inst = random_terminal_instance(dec.graph, np.random.default_rng(seed))
                sol = solve_cutuncut(inst, dec)
                result = "infeasible" if sol is None else str(sol.weight)
            else:
                raise ValueError(f"unknown suite {suite!r}")
            secs = time.perf_counter() - t0
            out.writerow((suite, d, n, seed, len(dec.modulator), dec.k, f"{secs:.4f}", result))
    return buf.getvalue()


# ---------------------------------------------------------------------------
# plumbing


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _report(args: argparse.Namespace, data: dict[str, Any], human: str) -> None:
    if args.json:
        print(json.dumps(data, sort_keys=True))
    else:
        print(human)


def effective_seed(args: argparse.Namespace) -> int:
    env = os.environ.get(SEED_ENV)
    return int(env) if env not in (None, "") else args.seed


def _load_graph_or_objects(path: str) -> tuple[Graph, ObjectSet | None]:
    text = _read(path)
    if text.lstrip().startswith("{"):
        f = loads_object_set(text)
        return build_intersection_graph(f), f
    return read_graph_text(text), None


# ---------------------------------------------------------------------------
# commands


def cmd_build_graph(args: argparse.Namespace) -> int:
    f = loads_object_set(_read(args.objects))
    g = build_intersection_graph(f)
    _write(args.output, write_graph_text(g))
    if args.output not in (None, "-"):
        _report(args, {"vertices": g.vertex_count, "edges": g.edge_count}, f"{g.vertex_count} vertices, {g.edge_count} edges")
    return EXIT_OK


def _emit_decomposition(args: argparse.Namespace, dec) -> int:
    _write(args.output, dec.dumps())
    if args.output not in (None, "-"):
        data = {"separator_size": len(dec.modulator), "components": dec.q, "k": dec.k}
        _report(args, data, f"|S| = {len(dec.modulator)}, {dec.q} components, width {dec.k}")
    return EXIT_OK


def cmd_separator(args: argparse.Namespace) -> int:
    return _emit_decomposition(args, slab_separator(loads_object_set(_read(args.objects))))


def cmd_decompose(args: argparse.Namespace) -> int:
    return _emit_decomposition(args, decomposition_from_geometry(loads_object_set(_read(args.objects))))


def cmd_amod(args: argparse.Namespace) -> int:
    g = read_graph_text(_read(args.graph))
    k, sep = amod_exact(g)
    _report(args, {"amod": k, "modulator": list(sep)}, f"amod = {k}, S = {list(sep)}")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    if args.problem == "subcoloring":
        g, _ = _load_graph_or_objects(args.input)
        dec = loads_decomposition(g, _read(args.decomp))
        colors = solve_subcoloring(dec)
        if colors is not None:
            assert verify_subcoloring(g, colors)
        if args.witness and colors is not None:
            _write(args.witness, json.dumps({"colors": list(colors)}) + "\n")
        _report(args, {"subcolorable": colors is not None}, "yes" if colors is not None else "no")
        return EXIT_OK if colors is not None else EXIT_NO
    inst = loads_instance(_read(args.input))
    dec = loads_decomposition(inst.graph, _read(args.decomp))
    sol = solve_cutuncut(inst, dec, steiner_cap=args.steiner_cap)
    if sol is None:
        _report(args, {"feasible": False, "weight": None}, "infeasible")
        return EXIT_NO
    assert verify_cut_solution(inst, sol)
    if args.witness:
        _write(args.witness, json.dumps({"side": list(sol.side), "weight": sol.weight}) + "\n")
    _report(args, {"feasible": True, "weight": sol.weight}, f"weight {sol.weight}")
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    formula = parse_nae3sat(_read(args.formula))
    out = build_abstract_graph(formula, args.dim, args.variant)
    prefix = args.output
    Path(f"{prefix}.graph.txt").write_text(write_graph_text(out.graph))
    Path(f"{prefix}.labels.txt").write_text("".join(out.graph.label(v) + "\n" for v in range(out.graph.vertex_count)))
    if args.embed is not None:
        want = "polygons" if args.dim == 2 else "balls"
        if args.embed != want:
            raise ValueError(f"dimension {args.dim} uses the {want} embedding")
        geo = embed_2d(out) if args.dim == 2 else embed_balls(out)
        Path(f"{prefix}.objects.json").write_text(dumps_object_set(geo))
    if args.variant == CUTUNCUT:
        Path(f"{prefix}.inst.json").write_text(out.instance().dumps())
    g = out.graph
    data = {"vertices": g.vertex_count, "edges": g.edge_count, "variables": formula.var_count, "clauses": formula.clause_count}
    _report(args, data, f"{g.vertex_count} vertices, {g.edge_count} edges from {formula.var_count} variables")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    f = gen_random_instance(args.kind, args.dim, args.n, args.density, effective_seed(args))
    _write(args.output, dumps_object_set(f))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    base = effective_seed(args)
    seeds = [base + i for i in range(args.seeds)]
    _write(args.output, bench(args.suite, args.dim, args.sizes, seeds, args.density))
    return EXIT_OK


def _oracle_alpha(args: argparse.Namespace) -> tuple[dict[str, Any], str, int]:
    g, _ = _load_graph_or_objects(args.input)
    a, ind = independence_number(g)
    return {"alpha": a, "set": list(ind)}, f"alpha = {a}", EXIT_OK


def _oracle_amod(args: argparse.Namespace) -> tuple[dict[str, Any], str, int]:
    g, _ = _load_graph_or_objects(args.input)
    k, sep = amod_exact(g)
    return {"amod": k, "modulator": list(sep)}, f"amod = {k}", EXIT_OK


def _oracle_subcoloring(args: argparse.Namespace) -> tuple[dict[str, Any], str, int]:
    g, _ = _load_graph_or_objects(args.input)
    colors = brute_subcoloring(g)
    data = {"subcolorable": colors is not None, "colors": list(colors) if colors else None}
    return data, "yes" if colors else "no", EXIT_OK if colors else EXIT_NO


def _oracle_cutuncut(args: argparse.Namespace) -> tuple[dict[str, Any], str, int]:
    inst = loads_instance(_read(args.input))
    sol = brute_cutuncut(inst)
    if sol is None:
        return {"feasible": False, "weight": None}, "infeasible", EXIT_NO
    return {"feasible": True, "weight": sol.weight, "side": list(sol.side)}, f"weight {sol.weight}", EXIT_OK


def _oracle_zero_cut(args: argparse.Namespace) -> tuple[dict[str, Any], str, int]:
    inst = loads_instance(_read(args.input))
    sol = brute_zero_cut(inst)
    ok = sol is not None
    return {"zero_cut": ok}, "yes" if ok else "no", EXIT_OK if ok else EXIT_NO


def _oracle_nae(args: argparse.Namespace) -> tuple[dict[str, Any], str, int]:
    f = parse_nae3sat(_read(args.input), pad=False)
    a = solve_nae_brute(f)
    data = {"satisfiable": a is not None, "assignment": [int(x) for x in a] if a else None}
    return data, "yes" if a else "no", EXIT_OK if a else EXIT_NO


def _oracle_intersection(args: argparse.Namespace) -> tuple[dict[str, Any], str, int]:
    f = loads_object_set(_read(args.input))
    g = intersection_graph_all_pairs(f)
    return {"graph": write_graph_text(g)}, write_graph_text(g).rstrip("\n"), EXIT_OK


ORACLES: dict[str, Callable[[argparse.Namespace], tuple[dict[str, Any], str, int]]] = {
    "alpha": _oracle_alpha,
    "amod": _oracle_amod,
    "subcoloring": _oracle_subcoloring,
    "cutuncut": _oracle_cutuncut,
    "zero-cut": _oracle_zero_cut,
    "nae": _oracle_nae,
    "intersection": _oracle_intersection,
}


def cmd_oracle(args: argparse.Namespace) -> int:
    data, human, code = ORACLES[args.name](args)
    _report(args, data, human)
    return code


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help=f"random seed ({SEED_ENV} overrides)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=1, help="worker threads (work runs in one thread)")

    p = argparse.ArgumentParser(prog="fatgraph", description="Fat-object intersection graph toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build-graph", parents=[common], help="intersection graph of an object set")
    s.add_argument("objects")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_build_graph)

    s = sub.add_parser("separator", parents=[common], help="slab separator decomposition")
    s.add_argument("objects")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_separator)

    s = sub.add_parser("decompose", parents=[common], help="separator with tightened alpha bounds")
    s.add_argument("objects")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("amod", parents=[common], help="exact alpha-modulator width (small graphs)")
    s.add_argument("graph")
    s.set_defaults(func=cmd_amod)

    s = sub.add_parser("solve", parents=[common], help="run a dynamic program over a decomposition")
    s.add_argument("problem", choices=("subcoloring", "cutuncut"))
    s.add_argument("input", help="graph.txt or objects.json for subcoloring, inst.json for cutuncut")
    s.add_argument("--decomp", required=True)
    s.add_argument("--witness")
    s.add_argument("--steiner-cap", type=int, default=None)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("reduce", parents=[common], help="compile a monotone NAE-3-SAT formula")
    s.add_argument("formula")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--variant", choices=VARIANTS, required=True)
    s.add_argument("--embed", choices=("polygons", "balls"))
    s.add_argument("-o", "--output", required=True, help="output prefix")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("gen", parents=[common], help="random object set")
    s.add_argument("kind", choices=INSTANCE_KINDS)
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--density", type=float, default=4.0, help="target average degree")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("bench", parents=[common], help="scaling benchmark as CSV")
    s.add_argument("suite", choices=("separator", "subcoloring", "cutuncut"))
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--sizes", type=int, nargs="*", default=[])
    s.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    s.add_argument("--density", type=float, default=4.0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("oracle", parents=[common], help="brute-force reference answers")
    s.add_argument("name", choices=sorted(ORACLES))
    s.add_argument("input")
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"fatgraph: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (FatgraphError, ValueError, OSError) as exc:
        print(f"fatgraph: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
