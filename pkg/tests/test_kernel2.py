import random

import pytest

from layercross.brute import branch_and_bound
from layercross.core import Instance, InvariantError, LayeredGraph
from layercross.kernel2 import Decided, Kernelized, block_measure_times3, kernelize2
from layercross.graphs import WorkGraph

from support import complete_bipartite, random_connected_2layer


def _decision(inst: Instance) -> bool:
    return branch_and_bound(inst.graph, inst.k) is not None


def _kernel_decision(result) -> bool:
    if result is Decided.YES:
        return True
    if result is Decided.NO:
        return False
    return _decision(result.instance)


def _barbell(rng: random.Random) -> LayeredGraph:
    """Two 4-cycles joined by a random path, with a few pendants."""
    layer = [1, 2, 1, 2]
    edges = [(1, 2), (2, 3), (3, 4), (4, 1)]
    last = rng.choice([1, 2, 3, 4])
    for _ in range(rng.randint(1, 4)):
        layer.append(3 - layer[last - 1])
        edges.append((last, len(layer)))
        last = len(layer)
    base = len(layer)
    layer += [3 - layer[last - 1], layer[last - 1], 3 - layer[last - 1]]
    edges += [(last, base + 1), (base + 1, base + 2), (base + 2, base + 3), (base + 3, last)]
    while len(layer) < 12 and rng.random() < 0.5:
        anchor = rng.randrange(1, len(layer) + 1)
        layer.append(3 - layer[anchor - 1])
        edges.append((anchor, len(layer)))
    return LayeredGraph.build(2, layer, edges)


def _corpus(seed: int, count: int):
    """Connected 2-layer instances with n <= 12. Every third one is a
    barbell so that bridge runs actually get contracted."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        if len(out) % 3 == 2:
            out.append(Instance(_barbell(rng), rng.randint(1, 3)))
            continue
        n = rng.randint(4, 12)
        n1 = rng.randint(max(1, n - 6), min(6, n - 1))
        g = random_connected_2layer(rng, n1, n - n1, rng.choice([0, 1, 1, 2, 3]), mults=(1, 1, 1, 2))
        out.append(Instance(g, rng.randint(0, 3)))
    return out


def _ladder(rungs: int) -> LayeredGraph:
    """C4 at each end of a long path: 2 blocks joined by a run of bridges."""
    # left square 1-2-3-4 (layers 1,2,1,2), path 4-5-...-(4+rungs), right square
    edges = [(1, 2), (2, 3), (3, 4), (4, 1)]
    layer = [1, 2, 1, 2]
    last = 4
    for _ in range(rungs):
        layer.append(3 - layer[last - 1])
        edges.append((last, len(layer)))
        last = len(layer)
    a, b, c = len(layer) + 1, len(layer) + 2, len(layer) + 3
    layer += [3 - layer[last - 1], layer[last - 1], 3 - layer[last - 1]]
    edges += [(last, a), (a, b), (b, c), (c, last)]
    return LayeredGraph.build(2, layer, edges)


def test_edge_surplus_is_a_trivial_no():
    g = complete_bipartite(3, 3)  # 9 edges, 6 vertices
    assert kernelize2(Instance(g, 3)) is Decided.NO
    assert _decision(Instance(g, 3)) is False


def test_small_instance_returned_unchanged():
    g = complete_bipartite(2, 2)
    inst = Instance(g, 2)
    out = kernelize2(inst)
    assert isinstance(out, Kernelized)
    assert out.instance == inst
    assert out.vertex_map == (1, 2, 3, 4)


def test_caterpillar_is_decided_yes():
    g = LayeredGraph.build(2, [1, 2, 1, 2], [(1, 2), (2, 3), (3, 4)])
    assert kernelize2(Instance(g, 0)) is Decided.YES


def test_block_measure_counts_nontrivial_blocks():
    work = WorkGraph.from_layered(_ladder(3))
    # two C4 blocks, each contributing 4 - 1
    assert block_measure_times3(work) == 6


def test_block_measure_above_k_is_no():
    g = _ladder(3)
    assert kernelize2(Instance(g, 1)) is Decided.NO
    assert _decision(Instance(g, 1)) is False


def test_long_bridge_run_is_shortened():
    g = _ladder(9)
    inst = Instance(g, 2)
    out = kernelize2(inst)
    assert isinstance(out, Kernelized)
    kg = out.instance.graph
    assert kg.n < g.n
    assert branch_and_bound(kg, 5)[0] == branch_and_bound(g, 5)[0] == 2
    assert len(out.vertex_map) == kg.n


def test_requires_connected_two_layer_input():
    g = LayeredGraph.build(2, [1, 2, 1, 2], [(1, 2), (3, 4)])
    with pytest.raises(InvariantError):
        kernelize2(Instance(g, 0))
    with pytest.raises(InvariantError):
        kernelize2(Instance(LayeredGraph.build(3, [1, 2, 3], [(1, 2), (2, 3)]), 0))


def test_decision_equivalence_on_random_corpus():
    changed = 0
    for inst in _corpus(1, 150):
        out = kernelize2(inst)
        assert _kernel_decision(out) == _decision(inst)
        if isinstance(out, Kernelized) and out.instance.graph.n < inst.graph.n:
            changed += 1
    assert changed > 0


def test_shrinkage_and_idempotence():
    for inst in _corpus(2, 120):
        out = kernelize2(inst)
        if not isinstance(out, Kernelized):
            continue
        kg = out.instance.graph
        assert kg.n <= inst.graph.n
        assert kg.total_multiplicity() <= inst.graph.total_multiplicity()
        assert len(kg.edges) <= len(inst.graph.edges)
        again = kernelize2(out.instance)
        assert isinstance(again, Kernelized)
        assert again.instance.graph == kg


@pytest.mark.parametrize("rungs", [6, 7, 8, 11])
def test_ladders_keep_their_minimum(rungs):
    g = _ladder(rungs)
    for k in (2, 3):
        out = kernelize2(Instance(g, k))
        assert _kernel_decision(out) == _decision(Instance(g, k))
