"""Extended 2-layer instances: boundary edges, weighted edges, stacked orders.

An entry is one edge record ``(a, b)`` with ``a`` on layer 1 and ``b`` on
layer 2. Several entries may join the same pair, for instance a regular edge
and a weighted edge added later.

Each end of an entry carries a side flag. A flag of -1 or +1 places that end
just left or just right of its vertex. Flags only occur at boundary
endpoints: -1 at leftbound and +1 at rightbound. A flagged end stands for an
edge that continues past the boundary into a part of the drawing that was
split off. Boundary edges are never entries and never counted.

``shield`` lists entry pairs whose crossing is already paid for elsewhere.
Such pairs count zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

from ..core import Drawing, InvariantError

NORMAL = "normal"
ELABORATE = "elaborate"


@dataclass(frozen=True)
class Entry:
    eid: int
    a: int
    b: int
    mult: int = 1
    weighted: bool = False
    fa: int = 0
    fb: int = 0

    def end(self, i: int) -> int:
        return self.a if i == 1 else self.b

    def flag(self, i: int) -> int:
        return self.fa if i == 1 else self.fb

    @property
    def pair(self) -> tuple[int, int]:
        return (self.a, self.b)

    def anchors(self) -> tuple[int, ...]:
        return tuple(v for v, f in ((self.a, self.fa), (self.b, self.fb)) if f)


def lambda_cap(k_star: int) -> int:
    """Upper bound on chains per layer: ``4 log2 k*`` (at least 4)."""
    return 4 * max(1, math.ceil(math.log2(max(k_star, 2))))


@dataclass(frozen=True)
class ExtendedInstance:
    layer: Mapping[int, int]
    entries: tuple[Entry, ...]
    leftbound: tuple[int, int]
    rightbound: tuple[int, int]
    k: int
    k_star: int
    chains: tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]] = ((), ())
    shield: frozenset = frozenset()
    mode: str = NORMAL
    ext_left: frozenset = frozenset()
    ext_right: frozenset = frozenset()
    depth: int = 0
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    # ------------------------------------------------------------ basics

    def side(self, i: int) -> list[int]:
        return sorted(v for v, lay in self.layer.items() if lay == i)

    def vertices(self) -> list[int]:
        return sorted(self.layer)

    def bound_end(self, which: str, i: int) -> int:
        edge = self.leftbound if which == "left" else self.rightbound
        return edge[i - 1]

    def boundary_endpoints(self) -> set[int]:
        return set(self.leftbound) | set(self.rightbound)

    def lam(self) -> int:
        return max(len(self.chains[0]), len(self.chains[1]))

    def with_k(self, k: int) -> "ExtendedInstance":
        return ExtendedInstance(self.layer, self.entries, self.leftbound, self.rightbound, k, self.k_star,
                                self.chains, self.shield, self.mode, self.ext_left, self.ext_right, self.depth)

    def adjacency(self) -> dict[int, set[int]]:
        """Neighbour sets over entries and boundary edges."""
        if "adj" not in self._cache:
            adj: dict[int, set[int]] = {v: set() for v in self.layer}
            for e in self.entries:
                adj[e.a].add(e.b)
                adj[e.b].add(e.a)
            for a, b in (self.leftbound, self.rightbound):
                adj[a].add(b)
                adj[b].add(a)
            self._cache["adj"] = adj
        return self._cache["adj"]

    def shielded(self, e: Entry, f: Entry) -> bool:
        return frozenset((e.eid, f.eid)) in self.shield

    def weighted_load(self) -> dict[int, int]:
        """Weighted multiplicity attached at each flagged boundary endpoint."""
        load: dict[int, int] = {}
        for e in self.entries:
            if e.weighted:
                for v in e.anchors():
                    load[v] = load.get(v, 0) + e.mult
        return load

    # --------------------------------------------------------- invariants

    def violations(self) -> list[str]:
        """Every broken structural rule, as text; empty when well formed."""
        out: list[str] = []
        if set(self.layer.values()) - {1, 2}:
            out.append("layers must be 1 and 2")
        for name, (a, b) in (("leftbound", self.leftbound), ("rightbound", self.rightbound)):
            if self.layer.get(a) != 1 or self.layer.get(b) != 2:
                out.append(f"{name} must join layer 1 to layer 2")
        ids = [e.eid for e in self.entries]
        if len(set(ids)) != len(ids):
            out.append("entry ids repeat")
        bl, br = set(self.leftbound), set(self.rightbound)
        for e in self.entries:
            if self.layer.get(e.a) != 1 or self.layer.get(e.b) != 2:
                out.append(f"entry {e.eid} must join layer 1 to layer 2")
            if e.mult < 1:
                out.append(f"entry {e.eid} has multiplicity below 1")
            for v, f in ((e.a, e.fa), (e.b, e.fb)):
                if f == -1 and v not in bl:
                    out.append(f"entry {e.eid} is flagged left at a non-leftbound vertex")
                if f == 1 and v not in br:
                    out.append(f"entry {e.eid} is flagged right at a non-rightbound vertex")
            if e.weighted and not e.anchors():
                out.append(f"weighted entry {e.eid} is not attached to a boundary endpoint")
        known = set(ids)
        for pair in self.shield:
            if not pair <= known or len(pair) != 2:
                out.append("shield names an unknown entry")
                break
        cap = 2 * math.sqrt(self.k_star)
        for v, load in self.weighted_load().items():
            if load > cap + 1e-9:
                out.append(f"weighted load {load} at vertex {v} exceeds 2*sqrt(k*)")
        if self.lam() > lambda_cap(self.k_star):
            out.append("too many chains")
        for i in (1, 2):
            for chain in self.chains[i - 1]:
                if len(set(chain)) != len(chain) or any(self.layer.get(v) != i for v in chain):
                    out.append(f"malformed chain on layer {i}")
        if self.mode == NORMAL:
            if self.ext_left or self.ext_right:
                out.append("normal instances have no extended boundary")
            if not self._connected(set()):
                out.append("normal instances must be connected")
        elif self.mode == ELABORATE:
            ext = self.ext_left | self.ext_right
            if self.ext_left & self.ext_right:
                out.append("extended boundary blocks overlap")
            if any(self.layer.get(v) != 1 for v in ext):
                out.append("extended boundary must lie on layer 1")
            if self.leftbound[0] not in self.ext_left or self.rightbound[0] not in self.ext_right:
                out.append("boundary endpoints must belong to their extended boundary block")
            if len(ext) > 3 * math.sqrt(self.k_star) + 2:
                out.append("extended boundary too large")
            if not self._connected(ext | self.boundary_endpoints()):
                out.append("a vertex is unreachable from the extended boundary")
        else:
            out.append(f"unknown mode {self.mode!r}")
        try:
            self.relations()
        except InvariantError as exc:
            out.append(str(exc))
        return out

    def _connected(self, roots: set[int]) -> bool:
        adj = self.adjacency()
        if not self.layer:
            return True
        start = set(roots) or {next(iter(self.layer))}
        seen = set(start)
        stack = list(start)
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.layer)

    # -------------------------------------------------------- constraints

    def relations(self) -> dict[int, set[tuple[int, int]]]:
        """Direct precedence pairs per layer from chains, boundaries and the
        extended boundary blocks. Raises on a cycle."""
        if "rel" in self._cache:
            return self._cache["rel"]
        rel: dict[int, set[tuple[int, int]]] = {1: set(), 2: set()}
        for i in (1, 2):
            members = self.side(i)
            for chain in self.chains[i - 1]:
                rel[i].update(zip(chain, chain[1:]))
            lo, hi = self.leftbound[i - 1], self.rightbound[i - 1]
            for v in members:
                if v != lo:
                    rel[i].add((lo, v))
                if v != hi:
                    rel[i].add((v, hi))
        if self.mode == ELABORATE:
            rest = [v for v in self.side(1) if v not in self.ext_left and v not in self.ext_right]
            for a in self.ext_left:
                rel[1].update((a, v) for v in rest)
                rel[1].update((a, v) for v in self.ext_right)
            for b in self.ext_right:
                rel[1].update((v, b) for v in rest)
        for i in (1, 2):
            if _has_cycle(self.side(i), rel[i]):
                raise InvariantError(f"order constraints on layer {i} are cyclic")
        self._cache["rel"] = rel
        return rel

    def predecessors(self) -> dict[int, set[int]]:
        """Transitive predecessor sets of every vertex."""
        if "pred" not in self._cache:
            from ..planarity import _closure

            pred: dict[int, set[int]] = {}
            rel = self.relations()
            for i in (1, 2):
                pred.update(_closure(self.side(i), rel[i]))
            self._cache["pred"] = pred
        return self._cache["pred"]

    def check_drawing(self, drawing: Drawing) -> None:
        """Raise :class:`InvariantError` unless ``drawing`` obeys every
        placement rule of this instance."""
        if drawing.h != 2:
            raise InvariantError("extended drawings have two layers")
        for i in (1, 2):
            if sorted(drawing.orders[i - 1]) != self.side(i):
                raise InvariantError(f"order of layer {i} is not a permutation of its vertices")
        pos = drawing.positions()
        for i in (1, 2):
            for a, b in self.relations()[i]:
                if pos[a] > pos[b]:
                    raise InvariantError(f"{a} must precede {b} on layer {i}")

    # ----------------------------------------------------------- counting

    def count(self, drawing: Drawing, among: Iterable[int] | None = None) -> int:
        """Weighted crossing count; ``among`` restricts to those entry ids."""
        pos = drawing.positions() if isinstance(drawing, Drawing) else drawing
        return count_entries(self, pos, among)


def _has_cycle(vertices: list[int], rel: set[tuple[int, int]]) -> bool:
    from ..planarity import _topo_order

    return _topo_order(vertices, rel) is None


def _cmp(x: tuple[int, int], y: tuple[int, int]) -> int:
    return (x > y) - (x < y)


def entry_cross(e: Entry, f: Entry, pos: Mapping[int, int]) -> bool:
    """Geometric crossing test honouring side flags."""
    s1 = _cmp((pos[e.a], e.fa), (pos[f.a], f.fa))
    s2 = _cmp((pos[e.b], e.fb), (pos[f.b], f.fb))
    return s1 * s2 < 0


def pair_weight(ei: ExtendedInstance, e: Entry, f: Entry) -> int:
    return 0 if ei.shielded(e, f) else e.mult * f.mult


def count_entries(ei: ExtendedInstance, pos: Mapping[int, int], among: Iterable[int] | None = None) -> int:
    if among is None:
        chosen = ei.entries
    else:
        keep = set(among)
        chosen = tuple(e for e in ei.entries if e.eid in keep)
    total = 0
    for e, f in combinations(chosen, 2):
        if entry_cross(e, f, pos):
            total += pair_weight(ei, e, f)
    return total


# ---------------------------------------------------------------- lifting


def from_graph(layer: Mapping[int, int], edges: Iterable[tuple[int, int, int]], left1: int, right1: int,
               k: int, k_star: int) -> ExtendedInstance:
    """Normal extended instance with fresh layer-2 boundary vertices."""
    layer = dict(layer)
    fresh = max(layer) + 1
    l2, r2 = fresh, fresh + 1
    layer[l2] = 2
    layer[r2] = 2
    entries = []
    for eid, (u, v, m) in enumerate(edges):
        a, b = (u, v) if layer[u] == 1 else (v, u)
        entries.append(Entry(eid, a, b, m))
    return ExtendedInstance(layer, tuple(entries), (left1, l2), (right1, r2), k, k_star)
