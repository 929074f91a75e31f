"""Brute-force check that a drawing admits a balanced separator.

Used on tiny instances to test the structural claim behind the recursion.
The drawing is first framed by two boundary edges: fresh layer-2 vertices
just outside each end of layer 2, joined to the first and last layer-1
vertex. Both boundary edges are eligible separator elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from ..core import Drawing, LayeredGraph


@dataclass(frozen=True)
class SeparatorWitness:
    lsep: tuple[int, int]
    rsep: tuple[int, int]
    left_crossings: int
    right_crossings: int
    mid_sizes: tuple[int, int]
    middle_weight: int
    crossing_weight: int


def _framed(graph: LayeredGraph, drawing: Drawing):
    pos = drawing.positions()
    top, bottom = drawing.orders
    lo, hi = graph.n + 1, graph.n + 2
    pos[lo], pos[hi] = -1, len(bottom)
    edges = []
    for u, v, m in graph.edges:
        a, b = (u, v) if graph.layer(u) == 1 else (v, u)
        edges.append((a, b, m))
    bounds = [(top[0], lo, 0), (top[-1], hi, 0)]
    return pos, edges, bounds


def _cross(pos, e, f) -> bool:
    return (pos[e[0]] - pos[f[0]]) * (pos[e[1]] - pos[f[1]]) < 0


def _left_of(pos, e, f) -> bool:
    """e lies left of f: no end to the right, and not the same pair."""
    return pos[e[0]] <= pos[f[0]] and pos[e[1]] <= pos[f[1]] and (e[0], e[1]) != (f[0], f[1])


def find_separator(graph: LayeredGraph, drawing: Drawing, k: int) -> SeparatorWitness | None:
    """First pair of non-crossing light edges meeting every separator clause.

    Light means crossed by edges of total multiplicity at most sqrt(k).
    Multiplicities weight every count.
    """
    pos, edges, bounds = _framed(graph, drawing)
    items = edges + bounds
    root = math.sqrt(k)
    pairs = [(e, f) for e, f in combinations(edges, 2) if _cross(pos, e, f)]

    def crossed_by(s):
        return [e for e in edges if _cross(pos, e, s)]

    light = [s for s in items if sum(e[2] for e in crossed_by(s)) <= root]
    for ls in light:
        for rs in light:
            if ls is rs or not _left_of(pos, ls, rs) or _cross(pos, ls, rs):
                continue
            left = sum(e[2] * f[2] for e, f in pairs if _left_of(pos, e, ls) and _left_of(pos, f, ls))
            right = sum(e[2] * f[2] for e, f in pairs if _left_of(pos, rs, e) and _left_of(pos, rs, f))
            if left > k / 2 or right > k / 2:
                continue
            mids = []
            for i in (0, 1):
                lo_, hi_ = pos[ls[i]], pos[rs[i]]
                side = drawing.orders[i]
                mids.append({v for v in side if lo_ <= pos[v] <= hi_})
            if any(len(m) >= 4 * root + 2 for m in mids):
                continue
            seps = {(ls[0], ls[1]), (rs[0], rs[1])}
            middle = sum(e[2] for e in edges if e[0] in mids[0] and e[1] in mids[1] and (e[0], e[1]) not in seps)
            if middle > 2 * root:
                continue
            cross = {(e[0], e[1]): e[2] for s in (ls, rs) for e in crossed_by(s)}
            if sum(cross.values()) > 2 * root:
                continue
            return SeparatorWitness((ls[0], ls[1]), (rs[0], rs[1]), left, right,
                                    (len(mids[0]), len(mids[1])), middle, sum(cross.values()))
    return None
