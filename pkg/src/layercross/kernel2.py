"""Quadratic kernel for connected 2-layer instances.

Steps: the edge-surplus test, the small-instance shortcut, the block
measure, and contraction of runs of contractible bridges. A bridge is
order-inducing when both sides have more than ``k - ell`` edges. It is
contractible when each endpoint has exactly one other non-leaf edge and
that edge is an order-inducing bridge.

Contracting an edge would merge two layers, so a run ``x1 .. xt`` of
contractible bridges is shortened instead. The interior vertices and their
pendants are removed. If ``t`` is even, ``x1`` and ``xt`` sit on different
layers and are joined directly. If ``t`` is odd, ``x2`` survives bare and is
joined to ``xt``. Either way the run becomes one or two uncrossed edges
between the same two sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import networkx as nx

from .core import Instance, InvariantError
from .graphs import WorkGraph


class Decided(Enum):
    YES = "yes"
    NO = "no"


@dataclass(frozen=True)
class Kernelized:
    """A reduced instance. ``vertex_map[i - 1]`` is the input id of kernel
    vertex ``i``; ``trace`` lists the rule applications (3-layer kernel)."""

    instance: Instance
    vertex_map: tuple[int, ...]
    trace: tuple = field(default=())


def _nx_graph(work: WorkGraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(work.layer)
    g.add_edges_from((u, v) for u, v, _ in work.edge_list())
    return g


def is_caterpillar(work: WorkGraph) -> bool:
    from .planarity import caterpillar_orders

    return caterpillar_orders(work) is not None


def block_measure_times3(work: WorkGraph) -> int:
    """``3 * ell``: the sum of ``|E(B)| - 1`` over blocks with a cycle."""
    total = 0
    for block in nx.biconnected_component_edges(_nx_graph(work)):
        size = len(block)
        if size > 1:
            total += size - 1
    return total


def _side_edge_counts(work: WorkGraph, g: nx.Graph, u: int, v: int) -> tuple[int, int]:
    g.remove_edge(u, v)
    side = nx.node_connected_component(g, u)
    g.add_edge(u, v)
    inside = sum(1 for x in side for y in work.adj[x] if y in side) // 2
    return inside, work.edge_count() - 1 - inside


def contractible_runs(work: WorkGraph, k: int, ell3: int) -> list[list[int]]:
    """Maximal vertex paths whose consecutive pairs are contractible bridges."""
    g = _nx_graph(work)
    order_inducing: set[frozenset[int]] = set()
    for u, v in nx.bridges(g):
        a, b = _side_edge_counts(work, g, u, v)
        # more than k - ell edges on both sides, scaled by 3
        if 3 * a > 3 * k - ell3 and 3 * b > 3 * k - ell3:
            order_inducing.add(frozenset((u, v)))
    pendant = {v for v in work.layer if work.degree(v) == 1}

    def non_leaf(v: int) -> list[frozenset[int]]:
        return [frozenset((v, u)) for u in work.adj[v] if u not in pendant and v not in pendant]

    contractible: set[frozenset[int]] = set()
    for e in order_inducing:
        ok = True
        for z in e:
            others = [f for f in non_leaf(z) if f != e]
            if len(others) != 1 or others[0] not in order_inducing:
                ok = False
        if ok:
            contractible.add(e)
    nbr: dict[int, list[int]] = {}
    for e in contractible:
        u, v = sorted(e)
        nbr.setdefault(u, []).append(v)
        nbr.setdefault(v, []).append(u)
    runs = []
    seen: set[int] = set()
    for start in sorted(nbr):
        if start in seen or len(nbr[start]) != 1:
            continue
        path = [start]
        seen.add(start)
        while True:
            nxt = [u for u in nbr[path[-1]] if u not in seen]
            if not nxt:
                break
            path.append(nxt[0])
            seen.add(nxt[0])
        runs.append(path)
    return runs


def _shorten(work: WorkGraph, run: list[int]) -> bool:
    t = len(run)
    if t <= 2:
        return False
    changed = False
    keep_mid = run[1] if t % 2 == 1 else None
    for x in run[1:-1]:
        for u in list(work.adj[x]):
            if work.degree(u) == 1:
                work.remove_vertex(u)
                changed = True
    for x in run[1:-1]:
        if x != keep_mid:
            work.remove_vertex(x)
            changed = True
    if keep_mid is None:
        work.add_edge(run[0], run[-1])
    elif run[-1] not in work.adj[keep_mid]:
        work.add_edge(keep_mid, run[-1])
    return changed


def kernelize2(instance: Instance) -> Kernelized | Decided:
    """Kernel for a connected 2-layer instance, or a decided answer."""
    graph = instance.graph
    if graph.h != 2:
        raise InvariantError("kernelize2 needs a 2-layer instance")
    work = WorkGraph.from_layered(graph)
    if not work.is_connected():
        raise InvariantError("kernelize2 needs a connected graph; split components first")
    k = instance.k
    identity = Kernelized(instance, tuple(graph.vertices()))
    if work.edge_count() >= len(work) + k:
        return Decided.NO
    if is_caterpillar(work):
        return Decided.YES
    if len(work) <= k * k:
        return identity
    changed = False
    while True:
        ell3 = block_measure_times3(work)
        if ell3 > 3 * k:
            return Decided.NO
        step = False
        for run in contractible_runs(work, k, ell3):
            step |= _shorten(work, run)
        if not step:
            break
        changed = True
    if not changed:
        return identity
    reduced, old = work.to_layered()
    return Kernelized(Instance(reduced, k, instance.k_star), tuple(old))
