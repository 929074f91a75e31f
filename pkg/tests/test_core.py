import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layercross.core import (
    Drawing,
    Instance,
    InvariantError,
    LayeredGraph,
    ParseError,
    check_drawing,
    count_crossings,
    count_crossings_pairwise,
    count_crossings_weighted,
    decode_constraints,
    decode_drawing,
    decode_instance,
    encode_drawing,
    encode_instance,
    validate,
)

from support import complete_bipartite, pairwise_count, random_layered


@st.composite
def graph_and_drawing(draw, max_h=4, max_per_layer=5):
    seed = draw(st.integers(0, 10**9))
    rng = random.Random(seed)
    h = draw(st.integers(2, max_h))
    g = random_layered(rng, h, max_per_layer, draw(st.floats(0.1, 0.9)), mults=(1, 1, 2, 3))
    orders = [rng.sample(members, len(members)) for members in g.layers()]
    return g, Drawing.of(orders)


# ------------------------------------------------------------ validation

def test_p4_is_valid():
    g = LayeredGraph.build(2, [1, 2, 1, 2], [(1, 2), (2, 3), (3, 4)])
    assert validate(g) is None


def test_edge_inside_a_layer_is_rejected():
    g = LayeredGraph(2, (1, 1, 2), ((1, 2, 1),))
    assert "non-consecutive" in validate(g)
    with pytest.raises(InvariantError):
        LayeredGraph.build(2, [1, 1, 2], [(1, 2)])


def test_edge_skipping_a_layer_is_rejected():
    g = LayeredGraph(3, (1, 2, 3), ((1, 3, 1),))
    assert "non-consecutive" in validate(g)


def test_self_loop_and_bad_layer():
    assert "self-loop" in validate(LayeredGraph(2, (1, 2), ((1, 1, 1),)))
    assert "outside" in validate(LayeredGraph(2, (1, 3), ()))
    assert "layer count" in validate(LayeredGraph(6, (1,), ()))


def test_empty_layer_only_in_strict_mode():
    g = LayeredGraph.build(3, [1, 2], [(1, 2)])
    assert validate(g) is None
    assert "empty" in validate(g, allow_empty_layers=False)


def test_parallel_edges_merge_into_multiplicity():
    g = LayeredGraph.build(2, [1, 2], [(1, 2), (2, 1, 3)])
    assert g.edges == ((1, 2, 4),)


def test_instance_budget_rules():
    g = LayeredGraph.build(2, [1, 2], [(1, 2)])
    assert Instance(g, 3).k_star == 3
    with pytest.raises(InvariantError):
        Instance(g, 3, 2)
    with pytest.raises(InvariantError):
        Instance(g, -1)


def test_check_drawing_rejects_wrong_layer_content():
    g = LayeredGraph.build(2, [1, 2, 2], [(1, 2), (1, 3)])
    check_drawing(g, Drawing.of([[1], [3, 2]]))
    with pytest.raises(InvariantError):
        check_drawing(g, Drawing.of([[1], [2]]))
    with pytest.raises(InvariantError):
        check_drawing(g, Drawing.of([[1], [2, 3], []]))


# -------------------------------------------------------------- counting

def test_single_edge_never_crosses():
    g = LayeredGraph.build(2, [1, 2], [(1, 2)])
    assert count_crossings(g, Drawing.of([[1], [2]])).total == 0


def test_k22_natural_order_has_one_crossing():
    g = complete_bipartite(2, 2)
    report = count_crossings(g, Drawing.of([[1, 2], [3, 4]]), with_pairs=True)
    assert report.total == 1
    assert report.pairs == (((1, 4), (2, 3)),)


def test_multiplicities_multiply():
    g = LayeredGraph.build(2, [1, 1, 2, 2], [(1, 4, 2), (2, 3, 3)])
    assert count_crossings(g, Drawing.of([[1, 2], [3, 4]])).total == 6


def test_per_gap_split():
    g = LayeredGraph.build(3, [1, 1, 2, 2, 3, 3], [(1, 4), (2, 3), (3, 6), (4, 5)])
    report = count_crossings(g, Drawing.of([[1, 2], [3, 4], [5, 6]]))
    assert report.per_gap == (1, 1)
    assert report.total == 2


@pytest.mark.parametrize("m", range(1, 5))
@pytest.mark.parametrize("n", range(1, 5))
def test_complete_bipartite_count_is_order_free(m, n):
    g = complete_bipartite(m, n)
    rng = random.Random(m * 10 + n)
    for _ in range(10):
        orders = [rng.sample(members, len(members)) for members in g.layers()]
        assert count_crossings(g, Drawing.of(orders)).total == comb(m, 2) * comb(n, 2)


@settings(max_examples=200, deadline=None)
@given(graph_and_drawing())
def test_inversion_count_matches_pairwise(case):
    g, d = case
    fast = count_crossings(g, d)
    assert fast.total == count_crossings_pairwise(g, d).total
    assert fast.per_gap == count_crossings_pairwise(g, d).per_gap
    assert fast.total == pairwise_count(g, d)
    assert fast.total == sum(fast.per_gap)


@settings(max_examples=100, deadline=None)
@given(graph_and_drawing())
def test_reversal_symmetry(case):
    g, d = case
    assert count_crossings(g, d.reversed()).total == count_crossings(g, d).total


@settings(max_examples=100, deadline=None)
@given(graph_and_drawing(max_h=2, max_per_layer=4))
def test_unit_pairs_listing_matches_total(case):
    g, d = case
    unit = LayeredGraph.build(g.h, g.layer_of, [(u, v) for u, v, _ in g.edges])
    report = count_crossings(unit, d, with_pairs=True)
    assert len(report.pairs) == report.total


# ------------------------------------------------------ weighted counting

def _shield_fixture():
    # leftbound 1-4; weighted edges 1-6 (at endpoint 1) and 3-4 (at endpoint 4)
    g = LayeredGraph.build(2, [1, 1, 1, 2, 2, 2], [(1, 4), (1, 6, 2), (3, 4, 3), (2, 5)])
    ids = {(u, v): i for i, (u, v, _) in enumerate(g.edges)}
    return g, ids


def test_weighted_edges_on_opposite_boundary_ends_count_zero():
    g, ids = _shield_fixture()
    d = Drawing.of([[1, 2, 3], [4, 5, 6]])
    weighted = [ids[(1, 6)], ids[(3, 4)]]
    plain = count_crossings(g, d).total
    shielded = count_crossings_weighted(g, d, [ids[(1, 4)]], weighted).total
    assert plain - shielded == 2 * 3
    assert count_crossings_weighted(g, d, [], weighted).total == plain


def test_weighted_rejects_bad_ids():
    g, ids = _shield_fixture()
    d = Drawing.of([[1, 2, 3], [4, 5, 6]])
    with pytest.raises(InvariantError):
        count_crossings_weighted(g, d, [99], [])
    with pytest.raises(InvariantError):
        count_crossings_weighted(g, d, [ids[(1, 6)]], [ids[(1, 6)]])


def _expansion_oracle(g, d, exceptions, weighted):
    """Unit expansion count minus the excepted weighted pairs."""
    pos = d.positions()
    total = pairwise_count(g, d)
    at = {}
    for eid in weighted:
        u, v, _ = g.edges[eid]
        at.setdefault(u, set()).add(eid)
        at.setdefault(v, set()).add(eid)
    seen = set()
    for bid in exceptions:
        x, y, _ = g.edges[bid]
        for e1 in at.get(x, ()):
            for e2 in at.get(y, ()):
                key = frozenset((e1, e2))
                if e1 == e2 or key in seen:
                    continue
                seen.add(key)
                a1, b1, m1 = g.edges[e1]
                a2, b2, m2 = g.edges[e2]
                if g.layer(a1) > g.layer(b1):
                    a1, b1 = b1, a1
                if g.layer(a2) > g.layer(b2):
                    a2, b2 = b2, a2
                if g.layer(a1) == g.layer(a2) and (pos[a1] - pos[a2]) * (pos[b1] - pos[b2]) < 0:
                    total -= m1 * m2
    return total


@settings(max_examples=150, deadline=None)
@given(graph_and_drawing(max_h=3, max_per_layer=4), st.randoms(use_true_random=False))
def test_weighted_count_matches_expansion_oracle(case, rng):
    g, d = case
    if g.m < 2:
        return
    ids = list(range(g.m))
    exceptions = rng.sample(ids, rng.randint(1, min(2, g.m - 1)))
    rest = [e for e in ids if e not in exceptions]
    weighted = rng.sample(rest, rng.randint(0, len(rest)))
    got = count_crossings_weighted(g, d, exceptions, weighted).total
    assert got == _expansion_oracle(g, d, exceptions, weighted)


# ---------------------------------------------------------------- codecs

def test_minimal_file_round_trips_byte_identically():
    text = "p lgr 2 2 1 0\nn 1 1\nn 2 2\ne 1 2\n"
    assert encode_instance(decode_instance(text)) == text


def test_non_canonical_input_is_canonicalised():
    text = "c a comment\np lgr 2 3 2 1\nn 3 2\nn 1 1\nn 2 2\ne 3 1 2\ne 1 2\n"
    assert encode_instance(decode_instance(text)) == "p lgr 2 3 2 1\nn 1 1\nn 2 2\nn 3 2\ne 1 2\ne 1 3 2\n"


@pytest.mark.parametrize("text, line", [
    ("p lgr 3 2 1 0\nn 1 1\nn 2 3\ne 1 2\n", 4),
    ("n 1 1\n", 1),
    ("p lgr 2 2 1 0\nn 1 1\nn 2 2\ne 1 x\n", 4),
    ("p lgr 2 2 1 0\nn 1 1\nn 2 2\ne 1 5\n", 4),
    ("p lgr 2 2 1 0\nn 1 1\nn 1 2\n", 3),
    ("p lgr 2 2 1 0\nn 1 1\nn 2 2\ne 1 2 0\n", 4),
    ("p lgr 2 2 1 0\nn 1 1\nn 2 2\nq\n", 4),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as info:
        decode_instance(text)
    assert info.value.line == line


@pytest.mark.parametrize("text", [
    "p lgr 2 3 1 0\nn 1 1\nn 2 2\ne 1 2\n",
    "p lgr 2 2 2 0\nn 1 1\nn 2 2\ne 1 2\n",
    "p lgr 2 2 1 -1\nn 1 1\nn 2 2\ne 1 2\n",
    "",
])
def test_header_mismatches_are_rejected(text):
    with pytest.raises(ParseError):
        decode_instance(text)


@settings(max_examples=100, deadline=None)
@given(graph_and_drawing(max_h=5), st.integers(0, 20))
def test_instance_and_drawing_round_trip(case, k):
    g, d = case
    inst = Instance(g, k)
    back = decode_instance(encode_instance(inst))
    assert back.graph == g and back.k == k
    assert decode_drawing(encode_drawing(d)) == d


def test_drawing_layers_may_come_in_any_order():
    d = decode_drawing("p ord 2 3\no 2 3\no 1 2 1\n")
    assert d.orders == ((2, 1), (3,))


@pytest.mark.parametrize("text", [
    "p ord 2 3\no 1 1 2\n",
    "p ord 2 3\no 1 1\no 1 2\no 2 3\n",
    "p ord 2 4\no 1 1 2\no 2 3\n",
    "o 1 1\n",
    "p ord 1 1\nx 1 1\n",
])
def test_bad_drawings_are_rejected(text):
    with pytest.raises(ParseError):
        decode_drawing(text)


def test_constraint_file():
    cons = decode_constraints("c x\nchain 1 3 1 2\npair 2 5 4\n", 2)
    assert cons.layer_chains(1) == ((3, 1, 2),)
    assert cons.pairs == {2: (5, 4)}
    with pytest.raises(ParseError):
        decode_constraints("chain 3 1 2\n", 2)
    with pytest.raises(ParseError):
        decode_constraints("pair 1 1 2\npair 1 2 3\n", 2)
    with pytest.raises(ParseError):
        decode_constraints("order 1 2\n", 2)
