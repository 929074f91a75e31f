"""Crossing-free drawings on two and three layers.

Two layers: a component draws without crossings iff it is a caterpillar.
Three layers: search over the middle order. A middle order works iff on
each side, the neighbourhood spans of the side vertices can be lined up so
that consecutive spans touch in at most one point. The search grows the
middle order left to right and keeps at most one side vertex "open" per
side, which prunes hard. Failed placed-sets are memoised when no order
constraints are involved.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .core import Drawing, InvariantError, LayeredGraph
from .graphs import WorkGraph

Orders = dict[int, list[int]]


@dataclass(frozen=True)
class OrderConstraints:
    """Per-layer chains (each a total order on a vertex subset) and optional
    ``(s, t)`` pairs requiring ``s`` first and ``t`` last in their layer."""

    chains: tuple[tuple[tuple[int, ...], ...], ...] = ()
    pairs: Mapping[int, tuple[int, int]] = field(default_factory=dict)

    @classmethod
    def of(cls, chains: Iterable[Iterable[Iterable[int]]] = (), pairs: Mapping[int, tuple[int, int]] | None = None):
        return cls(tuple(tuple(tuple(c) for c in layer) for layer in chains), dict(pairs or {}))

    @classmethod
    def empty(cls) -> "OrderConstraints":
        return cls()

    def is_empty(self) -> bool:
        return not self.pairs and not any(len(c) > 1 for layer in self.chains for c in layer)

    def layer_chains(self, i: int) -> tuple[tuple[int, ...], ...]:
        return self.chains[i - 1] if i - 1 < len(self.chains) else ()

    def relations(self, i: int, layer_vertices: Iterable[int]) -> set[tuple[int, int]]:
        """Direct precedence pairs ``(a, b)``, meaning a before b, on layer ``i``."""
        rel: set[tuple[int, int]] = set()
        for chain in self.layer_chains(i):
            rel.update(zip(chain, chain[1:]))
        if i in self.pairs:
            s, t = self.pairs[i]
            for v in layer_vertices:
                if v != s:
                    rel.add((s, v))
                if v != t:
                    rel.add((v, t))
        return rel

    def validate_against(self, layer_of: Mapping[int, int], h: int) -> None:
        """Raise if a chain leaves its layer, repeats a vertex or the
        combined relation is cyclic."""
        if len(self.chains) > h:
            raise InvariantError("more chain layers than graph layers")
        for i in range(1, h + 1):
            for chain in self.layer_chains(i):
                if len(set(chain)) != len(chain):
                    raise InvariantError(f"chain on layer {i} repeats a vertex")
                for v in chain:
                    if layer_of.get(v) != i:
                        raise InvariantError(f"chain vertex {v} is not in layer {i}")
        for i, (s, t) in self.pairs.items():
            if s == t:
                raise InvariantError(f"pair on layer {i} uses one vertex twice")
            if layer_of.get(s) != i or layer_of.get(t) != i:
                raise InvariantError(f"pair ({s}, {t}) is not inside layer {i}")
        for i in range(1, h + 1):
            members = [v for v, lay in layer_of.items() if lay == i]
            if _topo_order(members, self.relations(i, members)) is None:
                raise InvariantError(f"order constraints on layer {i} are cyclic")


def _topo_order(vertices: Iterable[int], rel: Iterable[tuple[int, int]], key=None) -> list[int] | None:
    """Kahn's algorithm with smallest-key tie breaking; None on a cycle."""
    verts = list(vertices)
    key = key or (lambda v: v)
    succ: dict[int, list[int]] = {v: [] for v in verts}
    indeg = {v: 0 for v in verts}
    for a, b in set(rel):
        succ[a].append(b)
        indeg[b] += 1
    heap = [(key(v), v) for v in verts if indeg[v] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, v = heapq.heappop(heap)
        out.append(v)
        for b in succ[v]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, (key(b), b))
    return out if len(out) == len(verts) else None


def _closure(vertices: Iterable[int], rel: Iterable[tuple[int, int]]) -> dict[int, set[int]]:
    """``before[v]``: every vertex that must precede ``v``."""
    preds: dict[int, set[int]] = {v: set() for v in vertices}
    for a, b in rel:
        preds[b].add(a)
    before: dict[int, set[int]] = {}

    def visit(v: int) -> set[int]:
        if v in before:
            return before[v]
        before[v] = set()
        acc: set[int] = set()
        stack = list(preds[v])
        while stack:
            a = stack.pop()
            if a not in acc:
                acc.add(a)
                stack.extend(preds[a])
        before[v] = acc
        return acc

    for v in preds:
        visit(v)
    return before


# ------------------------------------------------------------- caterpillars


def caterpillar_orders(work: WorkGraph, vertices: Iterable[int] | None = None) -> Orders | None:
    """Canonical crossing-free orders for a two-layer vertex set, or None.

    Backbones run in path order starting from the end with the smaller id;
    pendants sit next to their backbone vertex in ascending id order.
    Components go left to right by smallest id.
    """
    verts = set(work.layer if vertices is None else vertices)
    layers = sorted({work.layer[v] for v in verts})
    if len(layers) > 2 or (len(layers) == 2 and layers[1] - layers[0] != 1):
        raise InvariantError("caterpillar test needs two consecutive layers")
    sub = work if vertices is None else work.induced(verts)
    orders: Orders = {lay: [] for lay in layers}
    for comp in sub.components():
        part = _caterpillar_component(sub, comp)
        if part is None:
            return None
        for lay, seq in part.items():
            orders[lay].extend(seq)
    return orders


def _caterpillar_component(work: WorkGraph, comp: list[int]) -> Orders | None:
    layer = work.layer
    if len(comp) == 1:
        return {layer[comp[0]]: [comp[0]]}
    edges = sum(len(work.adj[v]) for v in comp) // 2
    if edges != len(comp) - 1:
        return None
    spine = [v for v in comp if len(work.adj[v]) >= 2]
    out: Orders = {}
    if not spine:
        for v in comp:
            out.setdefault(layer[v], []).append(v)
        return out
    spine_set = set(spine)
    spine_nb = {v: sorted(u for u in work.adj[v] if u in spine_set) for v in spine}
    if any(len(nb) > 2 for nb in spine_nb.values()):
        return None
    ends = sorted(v for v in spine if len(spine_nb[v]) <= 1)
    path = [ends[0]]
    prev = None
    while True:
        nxt = [u for u in spine_nb[path[-1]] if u != prev]
        if not nxt:
            break
        prev = path[-1]
        path.append(nxt[0])
    for v in path:
        out.setdefault(layer[v], []).append(v)
        pendants = sorted(u for u in work.adj[v] if u not in spine_set)
        for u in pendants:
            out.setdefault(layer[u], []).append(u)
    return out


def is_caterpillar_forest(graph: LayeredGraph) -> Drawing | None:
    """Canonical 0-crossing drawing if every component is a caterpillar."""
    if graph.h != 2:
        raise InvariantError("caterpillar test needs a 2-layer graph")
    orders = caterpillar_orders(WorkGraph.from_layered(graph))
    if orders is None:
        return None
    return Drawing.of(orders.get(i, []) for i in (1, 2))


# ------------------------------------------------------------ middle search


class _MiddleSearch:
    """Grow the middle order; see the module docstring for the rule."""

    def __init__(self, work: WorkGraph, verts: list[int], mid: int, before: dict[int, dict[int, set[int]]] | None):
        self.layer = work.layer
        self.mid = mid
        vs = set(verts)
        self.mids = sorted(v for v in verts if work.layer[v] == mid)
        self.sides = sorted({work.layer[v] for v in verts} - {mid})
        self.side_deg = {v: len(work.adj[v]) for v in verts if work.layer[v] != mid}
        self.side_members = {s: sorted(v for v in verts if work.layer[v] == s) for s in self.sides}
        self.nb = {w: {s: [x for x in work.adj[w] if x in vs and work.layer[x] == s] for s in self.sides} for w in self.mids}
        self.side_nb = {x: [w for w in work.adj[x] if w in vs] for x in self.side_deg}
        self.before = before
        self.constrained = before is not None
        self.failed: set[frozenset[int]] = set()
        # twins may be placed in id order without loss when unconstrained
        self.twin_prev: dict[int, int] = {}
        if not self.constrained:
            seen: dict[frozenset[int], int] = {}
            for w in self.mids:
                key = frozenset(work.adj[w])
                if key in seen:
                    self.twin_prev[w] = seen[key]
                seen[key] = w

    def run(self) -> Orders | None:
        self.cnt = {x: 0 for x in self.side_deg}
        self.started: dict[int, list[int]] = {s: [] for s in self.sides}
        self.open: dict[int, int | None] = {s: None for s in self.sides}
        self.order: list[int] = []
        self.placed: set[int] = set()
        return self._dfs()

    def _step(self, w: int):
        """Apply ``w`` if legal; return an undo record or None."""
        changes = []
        for s in self.sides:
            nw = self.nb[w][s]
            u = self.open[s]
            if u is not None and u not in nw:
                if nw:
                    return None
                changes.append((s, u, []))
                continue
            if u is not None:
                new = [x for x in nw if x != u]
                if self.cnt[u] + 1 < self.side_deg[u] and new:
                    return None
            else:
                new = list(nw)
            new_open = [x for x in new if self.side_deg[x] > 1]
            if len(new_open) > 1:
                return None
            if self.constrained and not self._facts_ok(s, u, new):
                return None
            nxt = u if (u is not None and self.cnt[u] + 1 < self.side_deg[u]) else (new_open[0] if new_open else None)
            changes.append((s, nxt, new))
        undo = []
        for s, nxt, new in changes:
            undo.append((s, self.open[s], len(self.started[s])))
            self.open[s] = nxt
            self.started[s].extend(new)
        for s in self.sides:
            for x in self.nb[w][s]:
                self.cnt[x] += 1
        self.order.append(w)
        self.placed.add(w)
        return undo

    def _undo(self, w: int, undo) -> None:
        self.order.pop()
        self.placed.discard(w)
        for s in self.sides:
            for x in self.nb[w][s]:
                self.cnt[x] -= 1
        for s, prev_open, n_started in undo:
            self.open[s] = prev_open
            del self.started[s][n_started:]

    def _facts_ok(self, s: int, u: int | None, new: list[int]) -> bool:
        before = self.before[s]
        for x in new:
            for y in before[x]:
                if self.side_deg.get(y, 0) > 0 and self.cnt[y] == 0 and y not in new:
                    return False
            for p in self.started[s]:
                if x in before[p]:
                    return False
        singles = [x for x in new if self.side_deg[x] == 1]
        longs = [x for x in new if self.side_deg[x] > 1]
        for a in singles:
            for b in longs:
                if b in before[a]:
                    return False
        return True

    def _dfs(self) -> Orders | None:
        if len(self.order) == len(self.mids):
            return self._finish()
        key = frozenset(self.placed)
        if not self.constrained and key in self.failed:
            return None
        for w in self.mids:
            if w in self.placed:
                continue
            if w in self.twin_prev and self.twin_prev[w] not in self.placed:
                continue
            if self.constrained and not self.before[self.mid][w] <= self.placed:
                continue
            undo = self._step(w)
            if undo is None:
                continue
            result = self._dfs()
            if result is not None:
                return result
            self._undo(w, undo)
        if not self.constrained:
            self.failed.add(key)
        return None

    def _finish(self) -> Orders | None:
        pos = {w: i for i, w in enumerate(self.order)}
        out: Orders = {self.mid: list(self.order)}
        for s in self.sides:
            members = self.side_members[s]
            span = {}
            for x in members:
                ps = [pos[w] for w in self.side_nb[x]]
                if ps:
                    span[x] = (min(ps), max(ps))
            linked = sorted(span, key=lambda x: (span[x], x))
            rel: set[tuple[int, int]] = set()
            for a, b in zip(linked, linked[1:]):
                if span[a][1] > span[b][0]:
                    return None
            # consecutive groups of identical one-point spans are free
            groups: list[list[int]] = []
            for x in linked:
                if groups and span[x] == span[groups[-1][0]] and span[x][0] == span[x][1]:
                    groups[-1].append(x)
                else:
                    groups.append([x])
            for g1, g2 in zip(groups, groups[1:]):
                for a in g1:
                    for b in g2:
                        rel.add((a, b))
            if self.constrained:
                for b, preds in self.before[s].items():
                    if b in self.side_deg:
                        rel.update((a, b) for a in preds if a in self.side_deg)
            rank = {x: i for i, x in enumerate(linked)}
            order = _topo_order(members, rel, key=lambda v: (rank.get(v, -1), v))
            if order is None:
                return None
            out[s] = order
        return out


def _middle_layer(layers: set[int]) -> int:
    lo, hi = min(layers), max(layers)
    return hi if hi - lo == 1 else lo + 1


def _component_groups(work: WorkGraph, verts: Iterable[int], rels: dict[int, set[tuple[int, int]]]) -> list[list[int]]:
    """Components of ``verts``, merged when a constraint links them."""
    sub = work.induced(verts)
    comps = sub.components()
    owner = {v: i for i, comp in enumerate(comps) for v in comp}
    parent = list(range(len(comps)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for rel in rels.values():
        for a, b in rel:
            ra, rb = find(owner[a]), find(owner[b])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    merged: dict[int, list[int]] = {}
    for i, comp in enumerate(comps):
        merged.setdefault(find(i), []).extend(comp)
    return sorted((sorted(g) for g in merged.values()), key=lambda g: g[0])


def free_orders(work: WorkGraph, vertices: Iterable[int] | None = None,
                constraints: OrderConstraints | None = None) -> Orders | None:
    """Crossing-free orders of the vertex set (at most three consecutive
    layers), honouring ``constraints`` when given; None if impossible."""
    verts = sorted(work.layer if vertices is None else vertices)
    if not verts:
        return {}
    sub = work if vertices is None else work.induced(verts)
    layers = {sub.layer[v] for v in verts}
    if max(layers) - min(layers) > 2:
        raise InvariantError("crossing-free search supports at most three layers")
    orders: Orders = {lay: [] for lay in sorted(layers)}
    cons = constraints if constraints is not None and not constraints.is_empty() else None
    if cons is None:
        for comp in sub.components():
            part = _free_component(sub, comp)
            if part is None:
                return None
            for lay, seq in part.items():
                orders[lay].extend(seq)
        return orders
    rels = {i: cons.relations(i, [v for v in verts if sub.layer[v] == i]) for i in sorted(layers)}
    for group in _component_groups(sub, verts, rels):
        gset = set(group)
        before = {}
        for i in sorted(layers):
            members = [v for v in group if sub.layer[v] == i]
            rel = {(a, b) for a, b in rels[i] if a in gset and b in gset}
            before[i] = _closure(members, rel)
            if _topo_order(members, rel) is None:
                return None
        glayers = {sub.layer[v] for v in group}
        mid = _middle_layer(glayers) if len(glayers) > 1 else next(iter(glayers))
        if len(glayers) == 1:
            part = {mid: _topo_order(group, [(a, b) for a, b in rels[mid] if a in gset and b in gset])}
        else:
            for lay in layers - glayers:
                before.pop(lay, None)
            part = _MiddleSearch(sub, group, mid, before).run()
        if part is None:
            return None
        for lay, seq in part.items():
            orders[lay].extend(seq)
    return orders


def _free_component(work: WorkGraph, comp: list[int]) -> Orders | None:
    layers = {work.layer[v] for v in comp}
    if len(layers) == 1:
        return {next(iter(layers)): list(comp)}
    if len(layers) == 2:
        return _caterpillar_component(work, comp)
    return _MiddleSearch(work, comp, _middle_layer(layers), None).run()


def _to_drawing(h: int, orders: Orders) -> Drawing:
    return Drawing.of(orders.get(i, []) for i in range(1, h + 1))


def crossing_free(graph: LayeredGraph) -> Drawing | None:
    """A 0-crossing drawing of a graph with at most three layers, or None."""
    if graph.h > 3:
        raise InvariantError("crossing-free testing is limited to h <= 3")
    orders = free_orders(WorkGraph.from_layered(graph))
    return None if orders is None else _to_drawing(graph.h, orders)


def crossing_free_with_orders(graph: LayeredGraph, constraints: OrderConstraints) -> Drawing | None:
    """A 0-crossing drawing compatible with every chain and pair, or None.

    Raises :class:`InvariantError` on cyclic or malformed constraints.
    """
    if graph.h > 3:
        raise InvariantError("crossing-free testing is limited to h <= 3")
    work = WorkGraph.from_layered(graph)
    constraints.validate_against(work.layer, graph.h)
    orders = free_orders(work, constraints=constraints)
    return None if orders is None else _to_drawing(graph.h, orders)


def endpoint_orders(work: WorkGraph, pairs: Mapping[int, tuple[int, int]]) -> Orders | None:
    """Crossing-free orders of a connected work graph with ``s_i`` first and
    ``t_i`` last on every layer, via the augmented graph G'."""
    layers = sorted({work.layer[v] for v in work.layer})
    if sorted(pairs) != layers:
        raise InvariantError("an (s, t) pair is required for every occupied layer")
    if layers != list(range(layers[0], layers[-1] + 1)):
        raise InvariantError("occupied layers must be consecutive")
    for i, (s, t) in pairs.items():
        if s == t:
            raise InvariantError(f"pair on layer {i} needs two distinct vertices")
        for v in (s, t):
            if work.layer.get(v) != i:
                raise InvariantError(f"pair vertex {v} is not in layer {i}")
    if not work.is_connected():
        raise InvariantError("endpoint-constrained test needs a connected graph")
    adj = work.adj
    for i in layers[1:]:
        for end in (0, 1):
            a, b = pairs[i - 1][end], pairs[i][end]
            a_other = any(work.layer[x] == i and x != b for x in adj[a])
            b_other = any(work.layer[x] == i - 1 and x != a for x in adj[b])
            if a_other and b_other:
                return None
    aug = work.copy()
    fresh = aug.next_id()
    prime: dict[tuple[int, int], int] = {}
    for end in (0, 1):
        for i in layers:
            prime[end, i] = fresh
            aug.add_vertex(fresh, i)
            fresh += 1
        for i in layers[1:]:
            a, b = pairs[i - 1][end], pairs[i][end]
            if b not in aug.adj[a]:
                aug.add_edge(a, b)
            aug.add_edge(prime[end, i - 1], prime[end, i])
            if any(work.layer[x] == i and x != b for x in adj[a]):
                aug.add_edge(prime[end, i - 1], b)
            else:
                aug.add_edge(prime[end, i], a)
    orders = free_orders(aug)
    if orders is None:
        return None
    first = layers[0]
    s0, t0 = pairs[first]
    if orders[first].index(s0) > orders[first].index(t0):
        orders = {i: seq[::-1] for i, seq in orders.items()}
    extra = set(prime.values())
    result = {i: [v for v in seq if v not in extra] for i, seq in orders.items()}
    for i, (s, t) in pairs.items():
        if result[i][0] != s or result[i][-1] != t:
            raise AssertionError("augmented drawing violates an endpoint pair")
    return result


def crossing_free_with_endpoints(graph: LayeredGraph, pairs: Mapping[int, tuple[int, int]]) -> Drawing | None:
    """0-crossing drawing with ``s_i`` leftmost and ``t_i`` rightmost on every
    layer ``i``, or None. Requires a connected graph and a pair per layer."""
    if graph.h > 3:
        raise InvariantError("crossing-free testing is limited to h <= 3")
    work = WorkGraph.from_layered(graph)
    for i in range(1, graph.h + 1):
        if i in pairs and len(graph.layer_vertices(i)) < 2:
            raise InvariantError(f"layer {i} has fewer than two vertices")
    for i, (s, t) in pairs.items():
        if not (1 <= s <= graph.n and 1 <= t <= graph.n):
            raise InvariantError(f"pair on layer {i} names an unknown vertex")
    orders = endpoint_orders(work, pairs)
    return None if orders is None else _to_drawing(graph.h, orders)
