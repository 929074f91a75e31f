"""Exact solver for extended instances.

A branch and bound in the style of :mod:`layercross.brute`, adapted to side
flags, shields and precedence constraints. A vertex may be appended to its
layer only after all of its required predecessors. A crossing is charged as
soon as the order of its two entries is known on both layers, so the running
cost is exact.
"""

from __future__ import annotations

import sys

from ..brute import DEFAULT_NODE_LIMIT, ResourceLimitError
from ..core import Drawing, LayeredGraph
from ..planarity import OrderConstraints, crossing_free_with_orders
from .extended import NORMAL, Entry, ExtendedInstance, entry_cross, pair_weight


class _ExtSearch:
    def __init__(self, ei: ExtendedInstance, node_limit: int):
        self.ei = ei
        self.layers = [ei.side(1), ei.side(2)]
        self.pred = ei.predecessors()
        self.at: dict[int, list[Entry]] = {v: [] for v in ei.layer}
        for e in ei.entries:
            self.at[e.a].append(e)
            self.at[e.b].append(e)
        self.constant = 0
        for idx, e in enumerate(ei.entries):
            for f in ei.entries[idx + 1:]:
                if e.a == f.a and e.b == f.b and entry_cross(e, f, {e.a: 0, e.b: 0}):
                    self.constant += pair_weight(ei, e, f)
        self.twin_before = self._twins()
        self.node_limit = node_limit
        self.nodes = 0

    def _twins(self) -> dict[int, int]:
        ei = self.ei
        busy = set(ei.boundary_endpoints())
        for i in (0, 1):
            for chain in ei.chains[i]:
                busy.update(chain)
        busy |= ei.ext_left | ei.ext_right
        shielded = {eid for pair in ei.shield for eid in pair}
        groups: dict[tuple, list[int]] = {}
        for v in sorted(ei.layer):
            if v in busy:
                continue
            inc = self.at[v]
            if any(e.fa or e.fb or e.eid in shielded for e in inc):
                continue
            sig = tuple(sorted((e.b if e.a == v else e.a, e.mult) for e in inc))
            groups.setdefault((ei.layer[v], sig), []).append(v)
        out = {}
        for members in groups.values():
            for a, b in zip(members, members[1:]):
                out[b] = a
        return out

    def _ahead(self, f: Entry, e: Entry, j: int) -> bool | None:
        """Whether f's end precedes e's end on layer ``j``; None if unknown."""
        x, y = e.end(j), f.end(j)
        if x == y:
            return f.flag(j) < e.flag(j)
        px, py = self.pos.get(x), self.pos.get(y)
        if py is None:
            return None if px is None else False
        return px is None or py < px

    def _charge(self, v: int, i: int) -> int:
        j = 3 - i
        cost = 0
        ei = self.ei
        for w in self.remaining[i - 1]:
            if w == v:
                continue
            for e in self.at[v]:
                for f in self.at[w]:
                    if self._ahead(f, e, j):
                        cost += pair_weight(ei, e, f)
        return cost

    def solve(self, bound: int) -> tuple[int, Drawing] | None:
        if self.constant > bound:
            return None
        self.best_cost = bound + 1
        self.best = None
        self.pos: dict[int, int] = {}
        self.placed = [[], []]
        self.remaining = [list(self.layers[0]), list(self.layers[1])]
        total = len(self.ei.layer)
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * total + 100))
        self._search(self.constant, total)
        if self.best is None:
            return None
        return self.best_cost, Drawing.of(self.best)

    def _search(self, cost: int, left: int) -> None:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise ResourceLimitError(f"extended search exceeded {self.node_limit} nodes")
        if left == 0:
            if cost < self.best_cost:
                self.best_cost = cost
                self.best = [list(p) for p in self.placed]
            return
        fill = [len(self.placed[i]) / len(self.layers[i]) if self.remaining[i] else 2.0 for i in (0, 1)]
        i = 1 if fill[0] <= fill[1] else 2
        rem = self.remaining[i - 1]
        for idx in range(len(rem)):
            v = rem[idx]
            if not self.pred[v] <= self.pos.keys():
                continue
            twin = self.twin_before.get(v)
            if twin is not None and twin not in self.pos:
                continue
            extra = self._charge(v, i)
            if cost + extra >= self.best_cost:
                continue
            del rem[idx]
            self.pos[v] = len(self.placed[i - 1])
            self.placed[i - 1].append(v)
            self._search(cost + extra, left - 1)
            self.placed[i - 1].pop()
            del self.pos[v]
            rem.insert(idx, v)
            if self.best_cost == self.constant:
                return


def _plain(ei: ExtendedInstance) -> bool:
    return (ei.mode == NORMAL and not ei.shield and not any(e.fa or e.fb for e in ei.entries)
            and ei.leftbound[0] != ei.rightbound[0] and ei.leftbound[1] != ei.rightbound[1])


def _crossing_free(ei: ExtendedInstance) -> Drawing | None:
    """Zero-crossing drawing through the planarity module."""
    ids = sorted(ei.layer)
    new = {v: i for i, v in enumerate(ids, start=1)}
    edges = [(new[e.a], new[e.b], e.mult) for e in ei.entries]
    edges += [(new[a], new[b]) for a, b in (ei.leftbound, ei.rightbound)]
    graph = LayeredGraph.build(2, [ei.layer[v] for v in ids], edges)
    chains = [[[new[v] for v in c] for c in ei.chains[i]] for i in (0, 1)]
    pairs = {i: (new[ei.leftbound[i - 1]], new[ei.rightbound[i - 1]]) for i in (1, 2)}
    drawing = crossing_free_with_orders(graph, OrderConstraints.of(chains, pairs))
    if drawing is None:
        return None
    return Drawing.of([[ids[v - 1] for v in order] for order in drawing.orders])


def base_min(ei: ExtendedInstance, cap: int | None = None, node_limit: int = DEFAULT_NODE_LIMIT) -> tuple[int, Drawing] | None:
    """Optimal drawing of ``ei`` if its cost is at most ``cap`` (default k)."""
    cap = ei.k if cap is None else cap
    if cap < 0:
        return None
    return _ExtSearch(ei, node_limit).solve(cap)


def base_case(ei: ExtendedInstance, node_limit: int = DEFAULT_NODE_LIMIT) -> Drawing | None:
    """A drawing with at most ``ei.k`` crossings, or None."""
    if ei.k == 0 and _plain(ei):
        return _crossing_free(ei)
    found = base_min(ei, ei.k, node_limit)
    return None if found is None else found[1]
