import csv
import io
import json

import pytest

from fatgraph.cli import BENCH_COLUMNS, bench, gen_random_instance, main
from fatgraph.geometry import build_intersection_graph, loads_object_set


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


FORMULA = "p nae 3 4\n1 2 3\n1 2 3\n1 2 3\n1 2 3\n"
# x1 != x2, x2 != x3, x1 != x3 has no solution over two values
UNSAT = "p nae 3 3\n1 1 2\n2 2 3\n1 3 3\n"


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("FATGRAPH_SEED", raising=False)
    return tmp_path


def test_gen_build_decompose_solve(workdir, capsys):
    assert run(capsys, "gen", "unit-balls", "--dim", "2", "-n", "14", "--density", "3", "--seed", "4", "-o", "o.json")[0] == 0
    assert run(capsys, "build-graph", "o.json", "-o", "g.txt")[0] == 0
    assert run(capsys, "decompose", "o.json", "-o", "d.json")[0] == 0
    code, _ = run(capsys, "solve", "subcoloring", "g.txt", "--decomp", "d.json", "--witness", "w.json")
    assert code == 0
    assert len(json.loads((workdir / "w.json").read_text())["colors"]) == 14
    code, out = run(capsys, "solve", "subcoloring", "o.json", "--decomp", "d.json", "--json")
    assert code == 0 and json.loads(out.out) == {"subcolorable": True}


def test_separator_command(workdir, capsys):
    main(["gen", "unit-balls", "-n", "60", "-o", "o.json"])
    capsys.readouterr()
    code, out = run(capsys, "separator", "o.json", "--json", "-o", "s.json")
    assert code == 0 and json.loads(out.out)["separator_size"] <= 2 * 60 ** (2 / 3)
    assert set(json.loads((workdir / "s.json").read_text())) == {"modulator", "components", "alpha_bounds", "k"}


def test_solve_no_instance_exit_code(workdir, capsys):
    (workdir / "g.txt").write_text("p 8 16\n" + "".join(f"e {i} 7\ne {i} {(i + 1) % 7}\n" for i in range(7)))
    (workdir / "d.json").write_text(json.dumps({"modulator": [7], "components": [[0, 1, 2, 3, 4, 5, 6]], "alpha_bounds": [3], "k": 3}))
    code, out = run(capsys, "oracle", "subcoloring", "g.txt")
    code2, out2 = run(capsys, "solve", "subcoloring", "g.txt", "--decomp", "d.json")
    assert code == code2
    assert out.out.strip() == out2.out.strip()


def test_cutuncut_commands(workdir, capsys):
    inst = {"graph": {"n": 4, "edges": [[0, 1, 3], [1, 2, 1], [2, 3, 3], [0, 3, 1]]}, "S": [0], "T": [2]}
    (workdir / "i.json").write_text(json.dumps(inst))
    (workdir / "d.json").write_text(json.dumps({"modulator": [1], "components": [[0, 2, 3]], "alpha_bounds": [2], "k": 2}))
    code, out = run(capsys, "solve", "cutuncut", "i.json", "--decomp", "d.json", "--witness", "w.json", "--json")
    assert code == 0 and json.loads(out.out)["weight"] == 2
    code, out = run(capsys, "oracle", "cutuncut", "i.json", "--json")
    assert json.loads(out.out)["weight"] == 2


def test_reduce_outputs(workdir, capsys):
    (workdir / "f.cnf").write_text(FORMULA)
    code, _ = run(capsys, "reduce", "f.cnf", "--dim", "2", "--variant", "cutuncut", "--embed", "polygons", "-o", "r")
    assert code == 0
    for suffix in ("graph.txt", "labels.txt", "objects.json", "inst.json"):
        assert (workdir / f"r.{suffix}").exists()
    code, out = run(capsys, "oracle", "zero-cut", "r.inst.json")
    assert code == 0 and out.out.strip() == "yes"
    code, _ = run(capsys, "reduce", "f.cnf", "--dim", "2", "--variant", "subcoloring", "--embed", "balls", "-o", "r2")
    assert code == 2


def test_oracles(workdir, capsys):
    (workdir / "f.cnf").write_text(FORMULA)
    (workdir / "u.cnf").write_text(UNSAT)
    assert run(capsys, "oracle", "nae", "f.cnf")[0] == 0
    assert run(capsys, "oracle", "nae", "u.cnf")[0] == 1
    (workdir / "g.txt").write_text("p 3 2\ne 0 1\ne 1 2\n")
    code, out = run(capsys, "oracle", "alpha", "g.txt", "--json")
    assert json.loads(out.out)["alpha"] == 2
    code, out = run(capsys, "amod", "g.txt", "--json")
    assert json.loads(out.out) == {"amod": 1, "modulator": [0]}
    main(["gen", "unit-balls", "-n", "20", "-o", "o.json"])
    capsys.readouterr()
    code, out = run(capsys, "oracle", "intersection", "o.json", "--json")
    graph = json.loads(out.out)["graph"]
    assert graph.splitlines()[0].startswith("p 20 ")


def test_error_exit_codes(workdir, capsys):
    assert run(capsys, "amod", "missing.txt")[0] == 2
    (workdir / "bad.txt").write_text("nonsense\n")
    assert run(capsys, "amod", "bad.txt")[0] == 2
    (workdir / "big.txt").write_text("p 30 0\n")
    assert run(capsys, "amod", "big.txt")[0] == 3
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_gen_is_deterministic_and_env_overrides_seed(workdir, capsys, monkeypatch):
    main(["gen", "fat-boxes", "-n", "30", "--seed", "5", "-o", "a.json"])
    main(["gen", "fat-boxes", "-n", "30", "--seed", "5", "-o", "b.json"])
    assert (workdir / "a.json").read_bytes() == (workdir / "b.json").read_bytes()
    monkeypatch.setenv("FATGRAPH_SEED", "5")
    main(["gen", "fat-boxes", "-n", "30", "--seed", "99", "-o", "c.json"])
    assert (workdir / "c.json").read_bytes() == (workdir / "a.json").read_bytes()


def test_gen_singleton_and_fatness():
    f = gen_random_instance("unit-balls", 3, 1, 4.0, 0)
    assert len(f) == 1
    boxes = gen_random_instance("fat-boxes", 3, 20, 4.0, 0)
    assert boxes.beta == 2.0
    for o in boxes.objects:
        assert o.declared_outdiameter <= 2.0 + 1e-9 and o.declared_inradius >= 0.5


@pytest.mark.parametrize("d", [2, 3])
def test_density_calibration(d):
    degrees = []
    for seed in range(20):
        g = build_intersection_graph(gen_random_instance("unit-balls", d, 300, 6.0, seed))
        degrees.append(2 * g.edge_count / g.vertex_count)
    mean = sum(degrees) / len(degrees)
    assert 0.7 * 6.0 <= mean <= 1.3 * 6.0


def test_bench_empty_and_schema():
    assert bench("separator", 2, [], [0]) == ",".join(BENCH_COLUMNS) + "\n"
    rows = list(csv.DictReader(io.StringIO(bench("separator", 2, [100, 500], [0, 1]))))
    assert len(rows) == 4
    for r in rows:
        n = int(r["n"])
        assert int(r["separator_size"]) <= 2 * n ** (2 / 3) and r["result"] == "ok"


def test_bench_repeat_matches_except_time():
    def strip(text):
        return [r[:6] + r[7:] for r in csv.reader(io.StringIO(text))]

    for suite in ("separator", "subcoloring", "cutuncut"):
        a = bench(suite, 2, [12], [0, 1], density=2.0)
        b = bench(suite, 2, [12], [0, 1], density=2.0)
        assert strip(a) == strip(b)


def test_objects_written_by_gen_load(workdir, capsys):
    main(["gen", "unit-balls", "--dim", "3", "-n", "25", "-o", "o.json"])
    f = loads_object_set((workdir / "o.json").read_text())
    assert f.dim == 3 and len(f) == 25
