import random

import pytest

from layercross.brute import branch_and_bound
from layercross.core import Instance, InvariantError, LayeredGraph
from layercross.graphs import WorkGraph
from layercross.kernel2 import Decided, Kernelized
from layercross.kernel3 import (
    NOT_APPLICABLE,
    RULES,
    Changed,
    apply_rule,
    find_backbone_separations,
    find_long_cycle,
    kernelize3,
    pendant_profile,
    size_bounds,
)

from support import random_layered


def _yes(inst: Instance) -> bool:
    return branch_and_bound(inst.graph, inst.k) is not None


def _decision(result) -> bool:
    if result is Decided.YES:
        return True
    if result is Decided.NO:
        return False
    return _yes(result.instance)


def _corpus(seed: int, count: int, max_k: int = 2):
    """3-layer instances with n <= 12, sparse enough to be interesting."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        g = random_layered(rng, 3, 4, rng.choice([0.3, 0.45, 0.6]))
        if g.n > 12 or g.m == 0:
            continue
        out.append(Instance(g, rng.randint(0, max_k)))
    return out


def _pendant_rich(seed: int, count: int):
    """Middle vertices with many pendants and shared degree-two neighbours,
    so pend, degtwo and nice have work to do."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        # a K2,2 on layers 1 and 2 keeps the graph from being crossing-free
        layer = [1, 1, 2, 2, 3]
        edges = [(1, 3), (1, 4), (2, 3), (2, 4), (3, 5)]
        while len(layer) < 12:
            kind = rng.random()
            if kind < 0.4:
                anchor = rng.choice([v for v in range(1, len(layer) + 1) if layer[v - 1] == 2])
                layer.append(rng.choice([1, 3]))
                edges.append((anchor, len(layer)))
            elif kind < 0.7:
                layer.append(2)
                edges += [(1, len(layer)), (5, len(layer))]
            else:
                anchor = rng.choice([v for v in range(1, len(layer) + 1) if layer[v - 1] in (1, 3)])
                layer.append(2)
                edges.append((anchor, len(layer)))
        out.append(Instance(LayeredGraph.build(3, layer, edges), rng.randint(1, 2)))
    return out


def _backbone_fixture(k: int) -> LayeredGraph:
    """K2,2 between layers 2 and 3, closed into a loop by a long path that
    alternates between layers 1 and 2."""
    layer = [2, 2, 3, 3]
    edges = [(1, 3), (1, 4), (2, 3), (2, 4)]
    prev = 1
    for _ in range(2 * (4 * k + 3) + 4):
        layer.append(1 if layer[prev - 1] == 2 else 2)
        edges.append((prev, len(layer)))
        prev = len(layer)
    if layer[prev - 1] == 2:
        layer.append(1)
        edges.append((prev, len(layer)))
        prev = len(layer)
    edges.append((prev, 2))
    return LayeredGraph.build(3, layer, edges)


# ------------------------------------------------------------- single rules

def test_pend_deletes_one_pendant():
    # middle vertex 1 with pendants 2, 3, 4 on layer 1 and a neighbour 5 on layer 3
    g = LayeredGraph.build(3, [2, 1, 1, 1, 3], [(1, 2), (1, 3), (1, 4), (1, 5)])
    out = apply_rule("pend", Instance(g, 1))
    assert isinstance(out, Changed)
    assert len(out.application.deleted) == 1
    assert out.application.deleted[0] in (2, 3, 4)
    assert out.instance.graph.n == 4


def test_degtwo_deletes_one_shared_vertex():
    # u = 1 on layer 1, v = 2 on layer 3, middle vertices 3, 4, 5
    g = LayeredGraph.build(3, [1, 3, 2, 2, 2], [(1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)])
    out = apply_rule("degtwo", Instance(g, 1))
    assert isinstance(out, Changed)
    assert out.application.deleted == (3,)
    assert out.application.locus == (1, 2)
    assert apply_rule("degtwo", Instance(g, 2)) is NOT_APPLICABLE


def test_nice_prefers_the_size_one_component():
    # u = 1 on layer 1; components of G - u: {2}, {3, 4}, {5, 6}
    g = LayeredGraph.build(3, [1, 2, 2, 3, 2, 3], [(1, 2), (1, 3), (3, 4), (1, 5), (5, 6)])
    out = apply_rule("nice", Instance(g, 0))
    assert isinstance(out, Changed)
    assert out.application.deleted == (2,)


def test_final_rule_on_an_oversized_graph():
    max_v, max_e = size_bounds(0)
    assert (max_v, max_e) == (2**15 * 2**8, 2**16 * 2**8)
    huge = LayeredGraph(3, (1,) * (max_v + 1), ())
    assert apply_rule("final", Instance(huge, 0)) is Decided.NO
    small = LayeredGraph.build(3, [1, 2, 3], [(1, 2), (2, 3)])
    assert apply_rule("final", Instance(small, 0)) is NOT_APPLICABLE


def test_size_bounds_formula():
    for k in range(5):
        assert size_bounds(k) == (2**15 * (k + 2) ** 8, 2**16 * (k + 2) ** 8 + k)


def test_unknown_rule_and_wrong_height():
    g = LayeredGraph.build(3, [1, 2, 3], [(1, 2), (2, 3)])
    with pytest.raises(InvariantError):
        apply_rule("bogus", Instance(g, 0))
    with pytest.raises(InvariantError):
        kernelize3(Instance(LayeredGraph.build(2, [1, 2], [(1, 2)]), 0))
    with pytest.raises(InvariantError):
        kernelize3(Instance(g, 0), mode="eager")


# ------------------------------------------------------ separations, cycles

def test_long_cycle_escape():
    # a 6-cycle on layers 1 and 2 with a layer-3 vertex hanging off it; k = 1
    layer = [1, 2, 1, 2, 1, 2, 3]
    edges = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1), (2, 7)]
    g = LayeredGraph.build(3, layer, edges)
    assert find_long_cycle(WorkGraph.from_layered(g), 1) is not None
    assert find_backbone_separations(Instance(g, 1), "4sep") is Decided.NO
    assert kernelize3(Instance(g, 1)) is Decided.NO
    assert not _yes(Instance(g, 1))


def test_backbone_candidates_and_safe_application():
    g = _backbone_fixture(1)
    inst = Instance(g, 1)
    found = find_backbone_separations(inst, "4sep")
    assert found and all(s.rule in ("matchA", "matchB") for s in found)
    assert all(len(s.family) == 4 * 1 + 3 for s in found)
    out = apply_rule("matchA", inst)
    assert isinstance(out, Changed)
    assert out.instance.graph.n < g.n
    assert _yes(out.instance) == _yes(inst)


def test_no_backbone_on_small_graphs():
    g = LayeredGraph.build(3, [1, 2, 3, 2], [(1, 2), (2, 3), (1, 4), (3, 4)])
    assert find_backbone_separations(Instance(g, 1), "4sep") == []
    assert find_backbone_separations(Instance(g, 1), "6sep") == []


# --------------------------------------------------------- whole kernel

def test_free_graph_is_decided_yes():
    g = LayeredGraph.build(3, [1, 2, 3], [(1, 2), (2, 3)])
    assert kernelize3(Instance(g, 0)) is Decided.YES


@pytest.mark.parametrize("mode", ["scheduled", "fixpoint"])
def test_kernel_preserves_decisions(mode):
    corpus = _corpus(1, 80) + _pendant_rich(2, 40)
    for inst in corpus:
        out = kernelize3(inst, mode)
        assert _decision(out) == _yes(inst)


def test_modes_agree():
    for inst in _corpus(3, 60) + _pendant_rich(4, 30):
        assert _decision(kernelize3(inst, "scheduled")) == _decision(kernelize3(inst, "fixpoint"))


def test_every_single_rule_application_is_safe():
    for inst in _corpus(5, 40) + _pendant_rich(6, 40):
        before = _yes(inst)
        for rule in RULES:
            out = apply_rule(rule, inst)
            if isinstance(out, Changed):
                assert _yes(out.instance) == before, rule
                assert len(out.application.deleted) >= 1
                assert out.instance.graph.n < inst.graph.n
            elif out is Decided.NO:
                assert before is False


def test_outputs_respect_size_pendant_and_trace_rules():
    applied = 0
    for inst in _corpus(7, 60) + _pendant_rich(8, 60):
        out = kernelize3(inst)
        if not isinstance(out, Kernelized):
            continue
        g = out.instance.graph
        max_v, max_e = size_bounds(inst.k)
        assert g.n <= max_v and g.m <= max_e
        pend, q = pendant_profile(g)
        assert pend <= inst.k + 1 and q <= inst.k + 1
        assert len(out.trace) <= inst.graph.n
        assert len(out.vertex_map) == g.n
        for app in out.trace:
            assert app.rule in RULES
            assert len(app.deleted) >= 1
        applied += len(out.trace)
    assert applied > 0
