import re

import pytest

from layercross.cli import main, svg_text
from layercross.core import (
    Drawing,
    Instance,
    LayeredGraph,
    count_crossings,
    decode_drawing,
    decode_instance,
    encode_drawing,
    encode_instance,
)

from support import complete_bipartite

CATERPILLAR = LayeredGraph.build(2, [1, 2, 1, 2, 2], [(1, 2), (2, 3), (3, 4), (3, 5)])
P4 = LayeredGraph.build(2, [1, 2, 1, 2], [(1, 2), (2, 3), (3, 4)])


def _write(tmp_path, name, graph, k=0):
    path = tmp_path / name
    path.write_text(encode_instance(Instance(graph, k)))
    return str(path)


def _ord(tmp_path, name, drawing):
    path = tmp_path / name
    path.write_text(encode_drawing(drawing))
    return str(path)


# ------------------------------------------------------------------- solve

def test_solve_caterpillar_with_brute(tmp_path, capsys):
    g = _write(tmp_path, "cat.lgr", CATERPILLAR)
    out = tmp_path / "cat.ord"
    assert main(["solve", "--alg", "brute", "-k", "0", g, "-o", str(out)]) == 0
    d = decode_drawing(out.read_text())
    assert count_crossings(CATERPILLAR, d).total == 0


def test_solve_k22_with_subexp2(tmp_path, capsys):
    g = _write(tmp_path, "k22.lgr", complete_bipartite(2, 2))
    assert main(["solve", "--alg", "subexp2", "-k", "0", g]) == 2
    assert capsys.readouterr().out.strip() == "no"
    assert main(["solve", "--alg", "subexp2", "-k", "1", g]) == 0
    d = decode_drawing(capsys.readouterr().out)
    assert count_crossings(complete_bipartite(2, 2), d).total == 1


@pytest.mark.parametrize("alg", ["brute", "bnb", "subexp2"])
def test_solve_algorithms_agree(tmp_path, capsys, alg):
    g = _write(tmp_path, "k23.lgr", complete_bipartite(2, 3), k=3)
    assert main(["solve", "--alg", alg, g]) == 0
    assert "yes 3" in capsys.readouterr().err
    assert main(["solve", "--alg", alg, "-k", "2", g]) == 2


def test_solve_exact3_and_height_checks(tmp_path):
    path3 = _write(tmp_path, "p3.lgr", LayeredGraph.build(3, [1, 2, 3], [(1, 2), (2, 3)]))
    assert main(["solve", "--alg", "exact3", "-k", "0", path3]) == 0
    assert main(["solve", "--alg", "subexp2", "-k", "0", path3]) == 3
    path2 = _write(tmp_path, "p4.lgr", P4)
    assert main(["solve", "--alg", "exact3", path2]) == 3
    assert main(["solve", "--jobs", "0", path2]) == 3


def test_resource_limit_exit_code(tmp_path):
    g = _write(tmp_path, "k44.lgr", complete_bipartite(4, 4), k=100)
    assert main(["solve", "--alg", "bnb", "--node-limit", "3", g]) == 4


# ------------------------------------------------------------ count/verify

def test_count_and_verify(tmp_path, capsys):
    g = _write(tmp_path, "k22.lgr", complete_bipartite(2, 2), k=0)
    d = _ord(tmp_path, "d.ord", Drawing.of([(1, 2), (3, 4)]))
    assert main(["count", g, d]) == 0
    assert "crossings: 1" in capsys.readouterr().out
    assert main(["verify", g, d]) == 2
    assert main(["verify", g, d, "-k", "1"]) == 0
    assert main(["verify", g, d, "-k", "0"]) == 2


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.lgr"
    bad.write_text("p lgr 2 2 1 0\nn 1 1\nn 2 1\ne 1 2\n")
    assert main(["count", str(bad), str(bad)]) == 3
    assert main(["count", str(tmp_path / "missing.lgr"), "x.ord"]) == 3
    assert main(["frobnicate"]) == 3
    assert main([]) == 3
    g = _write(tmp_path, "p4.lgr", P4)
    wrong = _ord(tmp_path, "w.ord", Drawing.of([(1, 3), (2,)]))
    assert main(["count", g, wrong]) == 3


# ------------------------------------------------------------------ render

def test_render_p4(tmp_path):
    g = _write(tmp_path, "p4.lgr", P4)
    out = tmp_path / "p4.svg"
    assert main(["render", g, "-o", str(out)]) == 0
    text = out.read_text(encoding="utf-8")
    assert text.count("<circle") == 4
    assert text.count("<line") == 3
    assert "crossings: 0" in text


def test_render_k22_and_determinism(tmp_path):
    g = _write(tmp_path, "k22.lgr", complete_bipartite(2, 2))
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(["render", g, "-o", str(a)]) == 0
    assert main(["render", g, "-o", str(b)]) == 0
    assert "crossings: 1" in a.read_text()
    assert a.read_bytes() == b.read_bytes()


def test_render_positions():
    text = svg_text(P4, Drawing.of([(3, 1), (2, 4)]))
    # vertex 3 is first on layer 1: x = 0, y = 80 * (2 - 1)
    assert re.search(r'<circle cx="0" cy="80"[^>]*>\s*<title>3</title>', text)
    assert re.search(r'<circle cx="60" cy="0"[^>]*>\s*<title>4</title>', text)


def test_annotation_equals_count(tmp_path):
    g = complete_bipartite(3, 2)
    for orders in [((1, 2, 3), (4, 5)), ((3, 1, 2), (5, 4)), ((2, 3, 1), (4, 5))]:
        d = Drawing.of(orders)
        total = count_crossings(g, d).total
        assert f"crossings: {total}" in svg_text(g, d)


# --------------------------------------------------------------- planar

def test_planar_with_constraints(tmp_path, capsys):
    g = _write(tmp_path, "two.lgr", LayeredGraph.build(2, [1, 1, 2, 2], [(1, 3), (2, 4)]))
    assert main(["planar", g]) == 0
    d = decode_drawing(capsys.readouterr().out)
    assert d.orders in (((1, 2), (3, 4)), ((2, 1), (4, 3)))
    cons = tmp_path / "c.txt"
    cons.write_text("chain 1 1 2\nchain 2 4 3\n")
    assert main(["planar", g, "--constraints", str(cons)]) == 2
    assert capsys.readouterr().out.strip() == "no"
    cons.write_text("chain 1 2 1\n")
    assert main(["planar", g, "--constraints", str(cons)]) == 0
    assert decode_drawing(capsys.readouterr().out).orders == ((2, 1), (4, 3))


# --------------------------------------------------------------- kernel

def test_kernel_two_layers(tmp_path, capsys):
    g = _write(tmp_path, "k22.lgr", complete_bipartite(2, 2))
    assert main(["kernel", g, "--layers", "2", "-k", "0"]) == 2
    out = tmp_path / "kern.lgr"
    assert main(["kernel", g, "--layers", "2", "-k", "1", "-o", str(out)]) == 0
    assert decode_instance(out.read_text()).k == 1
    cat = _write(tmp_path, "cat.lgr", CATERPILLAR)
    assert main(["kernel", cat, "--layers", "2"]) == 0
    assert capsys.readouterr().out.strip().endswith("yes")
    split = _write(tmp_path, "split.lgr", LayeredGraph.build(2, [1, 2, 1, 2], [(1, 2), (3, 4)]))
    assert main(["kernel", split, "--layers", "2"]) == 3
    assert main(["kernel", g, "--layers", "2", "--mode", "fixpoint"]) == 3
    assert main(["kernel", g, "--layers", "3"]) == 3


def test_kernel_three_layers_with_trace(tmp_path, capsys):
    # K2,2 on layers 1 and 2; vertex 3 carries three pendants on layer 3
    g = LayeredGraph.build(3, [1, 1, 2, 2, 3, 3, 3, 3],
                           [(1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (3, 6), (3, 7), (4, 8)])
    path = _write(tmp_path, "g3.lgr", g, k=1)
    trace, out = tmp_path / "t.txt", tmp_path / "k.lgr"
    assert main(["kernel", path, "--layers", "3", "--trace", str(trace), "-o", str(out)]) == 0
    lines = trace.read_text().splitlines()
    assert lines == ["pend deleted=[5] added=[] locus=[3]", "map 1 2 3 4 6 7 8"]
    assert decode_instance(out.read_text()).graph.n == 7
    for mode in ("scheduled", "fixpoint"):
        assert main(["kernel", path, "--layers", "3", "--mode", mode, "-k", "0"]) == 2


# ------------------------------------------------------------- gen and df

@pytest.mark.parametrize("family, extra", [
    ("z", []), ("zhat", []), ("u", []), ("uhat", []), ("f", []), ("c", []),
    ("s", ["--symbol", "2"]), ("shat", []), ("r", ["--string", "aabb"]), ("rhat", []),
])
def test_gen_gadgets(tmp_path, family, extra):
    out, ord_path = tmp_path / "g.lgr", tmp_path / "g.ord"
    assert main(["gen", "--family", family, "--k", "2", "--p", "5", *extra,
                 "-o", str(out), "--ord", str(ord_path)]) == 0
    inst = decode_instance(out.read_text())
    d = decode_drawing(ord_path.read_text())
    assert count_crossings(inst.graph, d).total == 0


def test_gen_lower_bound_families(tmp_path, capsys):
    out, ord_path = tmp_path / "e.lgr", tmp_path / "e.ord"
    assert main(["gen", "--family", "eth5", "--k", "2", "--p", "5", "--string", "aabb",
                 "-o", str(out), "--ord", str(ord_path)]) == 0
    inst = decode_instance(out.read_text())
    assert inst.k == 104
    assert count_crossings(inst.graph, decode_drawing(ord_path.read_text())).total <= 104
    assert main(["gen", "--family", "nokern4", "--k", "2", "--p", "5", "--string", "aabb",
                 "-o", str(out), "--ord", str(ord_path)]) == 0
    inst = decode_instance(out.read_text())
    assert inst.k == 155
    assert count_crossings(inst.graph, decode_drawing(ord_path.read_text())).total <= 155


def test_gen_random_needs_a_seed(tmp_path):
    out = tmp_path / "r.lgr"
    assert main(["gen", "--family", "df-random", "--k", "2", "--p", "5", "-o", str(out)]) == 3
    assert main(["gen", "--family", "df-random", "--k", "2", "--p", "5", "--seed", "4", "-o", str(out)]) == 0
    first = out.read_bytes()
    assert main(["gen", "--family", "df-random", "--k", "2", "--p", "5", "--seed", "4", "-o", str(out)]) == 0
    assert out.read_bytes() == first


def test_gen_usage_errors(tmp_path):
    assert main(["gen", "--family", "z"]) == 3
    assert main(["gen", "--family", "s", "--k", "2", "--symbol", "3"]) == 3
    assert main(["gen", "--family", "eth5", "--k", "2"]) == 3


def test_df_command(capsys):
    assert main(["df", "--string", "aabb", "--k", "2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["yes aa bb", "1-2 3-4"]
    assert main(["df", "--string", "abab", "--k", "2"]) == 2
    assert main(["df", "--string", "abz", "--k", "2"]) == 3
