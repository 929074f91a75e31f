"""Generators and slow oracles shared by the test modules."""

from __future__ import annotations

import math
import random
from itertools import combinations, permutations, product

from layercross.core import Drawing, LayeredGraph
from layercross.subexp2 import Entry, ExtendedInstance, count_entries


def random_connected_2layer(rng: random.Random, n1: int, n2: int, extra: int,
                            mults=(1, 1, 1, 2)) -> LayeredGraph:
    """Random spanning tree across the two layers plus ``extra`` random edges."""
    layer = [1] * n1 + [2] * n2
    top = list(range(1, n1 + 1))
    bottom = list(range(n1 + 1, n1 + n2 + 1))
    order = [rng.choice(top)]
    pending = [v for v in top + bottom if v != order[0]]
    rng.shuffle(pending)
    edges = set()
    while pending:
        # pick a pending vertex that has an opposite-layer vertex already in the tree
        for idx, v in enumerate(pending):
            cand = [u for u in order if layer[u - 1] != layer[v - 1]]
            if cand:
                u = rng.choice(cand)
                edges.add((min(u, v), max(u, v)))
                order.append(v)
                del pending[idx]
                break
    for _ in range(extra):
        edges.add((rng.choice(top), rng.choice(bottom)))
    return LayeredGraph.build(2, layer, [(u, v, rng.choice(mults)) for u, v in sorted(edges)])


def random_layered(rng: random.Random, h: int, max_per_layer: int, density: float,
                   mults=(1,)) -> LayeredGraph:
    """Random h-layer graph; each consecutive pair is joined with probability ``density``."""
    sizes = [rng.randint(1, max_per_layer) for _ in range(h)]
    layer = [i + 1 for i, s in enumerate(sizes) for _ in range(s)]
    ids = {}
    start = 1
    for i, s in enumerate(sizes, start=1):
        ids[i] = list(range(start, start + s))
        start += s
    edges = []
    for i in range(1, h):
        for u in ids[i]:
            for v in ids[i + 1]:
                if rng.random() < density:
                    edges.append((u, v, rng.choice(mults)))
    return LayeredGraph.build(h, layer, edges)


def random_tree_2layer(rng: random.Random, n: int) -> LayeredGraph:
    """Random tree on ``n`` vertices, 2-coloured into the two layers."""
    parent = [None] + [rng.randrange(i) for i in range(1, n)]
    depth = [0] * n
    for v in range(1, n):
        depth[v] = depth[parent[v]] + 1
    layer = [1 + d % 2 for d in depth]
    edges = [(parent[v] + 1, v + 1) for v in range(1, n)]
    return LayeredGraph.build(2, layer, edges)


def all_drawings(graph: LayeredGraph):
    for orders in product(*(permutations(members) for members in graph.layers())):
        yield Drawing.of(orders)


def pairwise_count(graph: LayeredGraph, drawing: Drawing) -> int:
    """Crossings by expanding every edge into unit copies and testing all pairs."""
    pos = drawing.positions()
    units = []
    for u, v, mult in graph.edges:
        if graph.layer(u) > graph.layer(v):
            u, v = v, u
        units.extend([(graph.layer(u), u, v)] * mult)
    total = 0
    for (g1, a1, b1), (g2, a2, b2) in combinations(units, 2):
        if g1 == g2 and (pos[a1] - pos[a2]) * (pos[b1] - pos[b2]) < 0:
            total += 1
    return total


def complete_bipartite(m: int, n: int) -> LayeredGraph:
    layer = [1] * m + [2] * n
    edges = [(u, m + v) for u in range(1, m + 1) for v in range(1, n + 1)]
    return LayeredGraph.build(2, layer, edges)


# -------------------------------------------------------- extended instances


def extended_brute(ei: ExtendedInstance) -> int | None:
    """Minimum over every drawing that respects the placement rules; None if none does."""
    pred = ei.predecessors()
    best = None
    sides = [ei.side(1), ei.side(2)]

    def valid(order):
        seen = set()
        for v in order:
            if not pred[v] <= seen:
                return False
            seen.add(v)
        return True

    perms = [[p for p in permutations(s) if valid(p)] for s in sides]
    for top in perms[0]:
        for bottom in perms[1]:
            pos = {v: i for i, v in enumerate(top)}
            pos.update({v: i for i, v in enumerate(bottom)})
            c = count_entries(ei, pos)
            if best is None or c < best:
                best = c
    return best


def random_extended(rng: random.Random, n1: int, n2: int, k: int, k_star: int | None = None,
                    flags: bool = True, shields: bool = True, chains: bool = True) -> ExtendedInstance:
    """Connected normal extended instance with optional flags, shields and chains.

    Boundary endpoints are the first and last vertex ids of each layer. A flag
    is only placed where the rules allow it, and weighted entries keep the
    load cap.
    """
    k_star = max(k, 1) if k_star is None else k_star
    top = list(range(1, n1 + 1))
    bottom = list(range(n1 + 1, n1 + n2 + 1))
    layer = {v: 1 for v in top} | {v: 2 for v in bottom}
    lb, rb = (top[0], bottom[0]), (top[-1], bottom[-1])
    pairs = set()
    # connect with a random tree, the boundary edges count as connections
    comp = {lb[0], lb[1], rb[0], rb[1]}
    rest = [v for v in layer if v not in comp]
    rng.shuffle(rest)
    if rb[0] != lb[0] and rb[1] != lb[1]:
        pairs.add(rng.choice([(lb[0], rb[1]), (rb[0], lb[1])]))
    for v in rest:
        cand = [u for u in comp if layer[u] != layer[v]]
        u = rng.choice(cand)
        pairs.add((u, v) if layer[u] == 1 else (v, u))
        comp.add(v)
    for _ in range(rng.randint(0, 3)):
        pairs.add((rng.choice(top), rng.choice(bottom)))
    entries = []
    cap = 2 * math.sqrt(k_star)
    load = {}
    for a, b in sorted(pairs):
        fa = fb = 0
        if flags:
            if a == lb[0] and a != rb[0] and rng.random() < 0.3:
                fa = -1
            elif a == rb[0] and a != lb[0] and rng.random() < 0.3:
                fa = 1
            if b == lb[1] and b != rb[1] and rng.random() < 0.3:
                fb = -1
            elif b == rb[1] and b != lb[1] and rng.random() < 0.3:
                fb = 1
        mult = rng.choice([1, 1, 2])
        weighted = False
        anchors = [v for v, f in ((a, fa), (b, fb)) if f]
        if anchors and all(load.get(v, 0) + mult <= cap for v in anchors) and rng.random() < 0.5:
            weighted = True
            for v in anchors:
                load[v] = load.get(v, 0) + mult
        entries.append(Entry(len(entries), a, b, mult, weighted, fa, fb))
    shield = set()
    if shields and len(entries) > 1:
        for _ in range(rng.randint(0, 2)):
            e, f = rng.sample(range(len(entries)), 2)
            shield.add(frozenset((e, f)))
    chain_sets = ((), ())
    if chains:
        built = []
        for side in (top, bottom):
            inner = side[1:-1]
            cs = []
            if len(inner) >= 2 and rng.random() < 0.5:
                cs.append(tuple(rng.sample(inner, 2)))
            built.append(tuple(cs))
        chain_sets = (built[0], built[1])
    return ExtendedInstance(layer, tuple(entries), lb, rb, k, k_star, chain_sets, frozenset(shield))


# ------------------------------------------------------- disjoint factors


def interval_families(s: str, k: int):
    """Independent oracle: search families of disjoint intervals left to
    right, each one a factor whose first symbol is new to the family.
    Returns 0-based inclusive spans or None."""
    n = len(s)

    def grow(start: int, used: frozenset, fam: list):
        if len(fam) == k:
            return list(fam)
        for a in range(start, n):
            if s[a] in used:
                continue
            for b in range(a + 1, n):
                if s[b] == s[a]:
                    fam.append((a, b))
                    found = grow(b + 1, used | {s[a]}, fam)
                    if found is not None:
                        return found
                    fam.pop()
        return None

    return grow(0, frozenset(), [])
