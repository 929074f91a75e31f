"""Polynomial kernel for 3-layer instances.

The rules, in schedule order:

* ``comp``: drop a component that draws without crossings.
* ``pend``: a middle vertex keeps at most k+1 pendants per side.
* ``degtwo``: at most k+1 middle vertices share the same two neighbours
  ``u`` in layer 1 and ``v`` in layer 3.
* ``nice``: trims the caterpillar components hanging off an outer-layer
  cut vertex.
* ``matchA``/``matchB``: 4-separations. A two-layer caterpillar is cut off
  by two edges and carries a matching of 4k+3 edges.
* ``pathsA``/``pathsB``: 5-separations. The same, with every matched
  middle vertex tied to one apex in the third layer.
* ``pathsC``: 6-separations. A three-layer piece is cut off by two
  2-paths and carries 4k+3 disjoint 2-paths.
* ``final``: a size bound that answers no.

Each separation rule shrinks its piece to a thin strip around the middle
of the matching or path family. Candidate separations are checked by one
generic routine:

1. The inside is a component of ``G - S`` that lies in the allowed layers
   and touches both halves of the separator.
2. The piece must have a crossing-free drawing with the separator at the
   extremes.
3. Greedy leftmost chains pick the family.

Any candidate that passes is a valid application, so the search strategy
only affects how small the kernel gets, never its correctness.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import networkx as nx

from .core import Instance, InvariantError, LayeredGraph
from .graphs import WorkGraph
from .kernel2 import Decided, Kernelized
from .planarity import caterpillar_orders, endpoint_orders, free_orders

RULES = ("comp", "pend", "degtwo", "nice", "matchA", "matchB", "pathsA", "pathsB", "pathsC", "final")
FIXPOINT_MAX_VERTICES = 60
LONG_CYCLE_STEPS = 200_000


class NotApplicable:
    """Singleton marker: the rule's precondition holds nowhere."""

    def __repr__(self) -> str:
        return "NotApplicable"


NOT_APPLICABLE = NotApplicable()


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    deleted: tuple[int, ...]
    added: tuple[tuple[int, int], ...]
    locus: tuple[int, ...]


@dataclass(frozen=True)
class Changed:
    """Result of one rule application; ids in ``application`` refer to the
    input instance and ``vertex_map`` maps new ids back to input ids."""

    instance: Instance
    application: RuleApplication
    vertex_map: tuple[int, ...]


def size_bounds(k: int) -> tuple[int, int]:
    """Vertex and edge limits of the final rule."""
    core = (k + 2) ** 8
    return 2**15 * core, 2**16 * core + k


@dataclass(frozen=True)
class Separation:
    """A verified separation-rule candidate and the edit it implies."""

    rule: str
    separator: tuple[int, ...]
    inside: frozenset[int]
    family: tuple[tuple[int, ...], ...]
    deleted: frozenset[int]
    stripped: tuple[int, ...]
    added: tuple[tuple[int, int], ...]


# ------------------------------------------------------------ simple rules


def _pendants(work: WorkGraph, u: int, side: int) -> list[int]:
    return sorted(x for x in work.adj[u] if work.layer[x] == side and work.degree(x) == 1)


def _find_comp(work: WorkGraph):
    for comp in work.components():
        if free_orders(work, comp) is not None:
            return RuleApplication("comp", tuple(comp), (), (comp[0],))
    return None


def _find_pend(work: WorkGraph, k: int):
    for u in work.layer_vertices(2):
        for side in (1, 3):
            pend = _pendants(work, u, side)
            if len(pend) > k + 1:
                return RuleApplication("pend", (pend[0],), (), (u,))
    return None


def _degtwo_groups(work: WorkGraph) -> dict[tuple[int, int], list[int]]:
    groups: dict[tuple[int, int], list[int]] = {}
    for w in work.layer_vertices(2):
        nb = work.adj[w]
        if len(nb) == 2:
            a, b = sorted(nb, key=lambda x: work.layer[x])
            if work.layer[a] == 1 and work.layer[b] == 3:
                groups.setdefault((a, b), []).append(w)
    return groups


def _find_degtwo(work: WorkGraph, k: int):
    for (u, v), members in sorted(_degtwo_groups(work).items()):
        if len(members) > k + 1:
            return RuleApplication("degtwo", (min(members),), (), (u, v))
    return None


def nice_components(work: WorkGraph, u: int) -> list[list[int]]:
    """Nice components of ``G - u`` that touch ``u``."""
    lay = work.layer[u]
    allowed = {2, 3} if lay == 1 else {1, 2}
    out = []
    for comp in work.components(banned=[u]):
        if not any(x in work.adj[u] for x in comp):
            continue
        if any(work.layer[x] not in allowed for x in comp):
            continue
        if caterpillar_orders(work, comp) is not None:
            out.append(comp)
    return out


def _find_nice(work: WorkGraph, k: int):
    for u in sorted(v for v in work.layer if work.layer[v] in (1, 3)):
        if work.degree(u) < 2 * k + 2:
            continue
        nice = nice_components(work, u)
        if len(nice) >= 2 * k + 2:
            singles = [c for c in nice if len(c) == 1]
            pick = singles[0] if singles else nice[0]
            return RuleApplication("nice", tuple(pick), (), (u,))
    return None


# ------------------------------------------------------------- long cycles


def find_long_cycle(work: WorkGraph, k: int, step_limit: int = LONG_CYCLE_STEPS) -> list[int] | None:
    """A cycle with at least 2k+4 vertices inside two adjacent layers.

    Searches each block of ``G[V1 + V2]`` and ``G[V2 + V3]`` by bounded
    backtracking. A returned cycle is genuine; None may mean the budget ran
    out.
    """
    need = 2 * k + 4
    for pair in ((1, 2), (2, 3)):
        verts = [v for v in work.layer if work.layer[v] in pair]
        sub = work.induced(verts)
        g = nx.Graph()
        g.add_edges_from((u, v) for u, v, _ in sub.edge_list())
        for block in nx.biconnected_components(g):
            if len(block) < need:
                continue
            cycle = _long_cycle_in_block(sub, sorted(block), need, step_limit)
            if cycle is not None:
                return cycle
    return None


def _long_cycle_in_block(work: WorkGraph, block: list[int], need: int, step_limit: int) -> list[int] | None:
    inside = set(block)
    start = block[0]
    path = [start]
    on_path = {start}
    steps = 0

    def extend() -> list[int] | None:
        nonlocal steps
        steps += 1
        if steps > step_limit:
            return None
        tail = path[-1]
        for x in sorted(work.adj[tail]):
            if x not in inside:
                continue
            if x == start and len(path) >= need:
                return list(path)
            if x in on_path:
                continue
            path.append(x)
            on_path.add(x)
            found = extend()
            if found is not None:
                return found
            path.pop()
            on_path.discard(x)
            if steps > step_limit:
                return None
        return None

    return extend()


# ------------------------------------------------------ separation checking


def _greedy_chain(items: list[tuple[int, ...]], count: int, start: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Longest-prefix greedy: strictly increasing in every coordinate."""
    chain = [start]
    for item in sorted(items):
        if len(chain) == count:
            break
        if all(a > b for a, b in zip(item, chain[-1])):
            chain.append(item)
    return chain


def _family(pos_items: list[tuple[tuple[int, ...], tuple[int, ...]]], first: tuple[int, ...], last: tuple[int, ...], k: int):
    """Choose 4k+3 members: 2k+2 from the left, 2k+1 from the right.

    ``pos_items`` pairs each member's position vector with its vertices.
    Returns vertex tuples in left-to-right order, or None.
    """
    by_pos = dict(pos_items)
    positions = [p for p, _ in pos_items]
    left = _greedy_chain([p for p in positions if p != first], 2 * k + 2, first)
    flipped = [tuple(-c for c in p) for p in positions if p != last]
    right = _greedy_chain(flipped, 2 * k + 1, tuple(-c for c in last))
    right = [tuple(-c for c in p) for p in right]
    if len(left) < 2 * k + 2 or len(right) < 2 * k + 1:
        return None
    if not all(a < b for a, b in zip(left[-1], right[-1])):
        return None
    return tuple(by_pos[p] for p in left + right[::-1])


def _insides(work: WorkGraph, sep: Iterable[int], half1: set[int], half2: set[int], allowed: set[int]):
    """Components of ``G - S`` within ``allowed`` layers touching both halves."""
    out = []
    for comp in work.components(banned=sep):
        if any(work.layer[x] not in allowed for x in comp):
            continue
        touch1 = any(y in half1 for x in comp for y in work.adj[x])
        touch2 = any(y in half2 for x in comp for y in work.adj[x])
        if touch1 and touch2:
            out.append(comp)
    return out


def check_two_layer_separation(
    work: WorkGraph, k: int, rule: str, e1: tuple[int, int], e2: tuple[int, int], apex: int | None = None
) -> Separation | None:
    """Verify a 4- or 5-separation with separator edges ``e1``, ``e2``.

    Edges are ``(outer, inner)``-free: each is given as (vertex of the lower
    layer, vertex of the upper layer) of the rule's two layers.
    """
    lo, hi = (1, 2) if rule in ("matchA", "pathsA") else (2, 3)
    (u1, v1), (u2, v2) = e1, e2
    sep = [u1, v1, u2, v2]
    if len(set(sep)) != 4:
        return None
    if any(work.layer[x] != lo for x in (u1, u2)) or any(work.layer[x] != hi for x in (v1, v2)):
        return None
    if v1 not in work.adj[u1] or v2 not in work.adj[u2]:
        return None
    mid = 2
    if apex is not None:
        if apex in sep or work.layer[apex] != (3 if rule == "pathsA" else 1):
            return None
        hub1, hub2 = (v1, v2) if rule == "pathsA" else (u1, u2)
        if hub1 not in work.adj[apex] or hub2 not in work.adj[apex]:
            return None
        sep = sep + [apex]
    for inside in _insides(work, sep, {u1, v1}, {u2, v2}, {lo, hi}):
        piece = set(inside) | {u1, v1, u2, v2}
        sub = work.induced(piece)
        if not sub.is_connected():
            continue
        if sum(1 for x in piece if work.layer[x] == lo) < 4 * k + 3:
            continue
        if sum(1 for x in piece if work.layer[x] == hi) < 4 * k + 3:
            continue
        orders = endpoint_orders(sub, {lo: (u1, u2), hi: (v1, v2)})
        if orders is None:
            continue
        pos = {x: i for seq in orders.values() for i, x in enumerate(seq)}
        edges = []
        for a, b, _ in sub.edge_list():
            if work.layer[a] == hi:
                a, b = b, a
            if apex is not None:
                hub = b if rule == "pathsA" else a
                if hub not in work.adj[apex]:
                    continue
            edges.append(((pos[a], pos[b]), (a, b)))
        family = _family(edges, (pos[u1], pos[v1]), (pos[u2], pos[v2]), k)
        if family is None:
            continue
        return _two_layer_edit(sub, rule, tuple(sep), frozenset(piece), family, pos, lo, hi, k)
    return None


def _two_layer_edit(sub, rule, sep, piece, family, pos, lo, hi, k) -> Separation:
    x = [None] + [f[0] for f in family]
    y = [None] + [f[1] for f in family]
    a, b, c = 2 * k + 1, 2 * k + 2, 2 * k + 3
    del_lo = {w for w in piece if sub.layer[w] == lo and pos[x[a]] < pos[w] < pos[x[c]]}
    del_hi = {w for w in piece if sub.layer[w] == hi and pos[y[a]] < pos[w] < pos[y[c]]}
    stripped: list[int] = []
    added: list[tuple[int, int]] = []
    if rule.startswith("match"):
        if any(pos[n] > pos[y[a]] for n in sub.adj[x[a]]):
            z1 = x[a]
        else:
            z1 = y[a]
        if any(pos[n] < pos[y[c]] for n in sub.adj[x[c]]):
            z2 = x[c]
        else:
            z2 = y[c]
        if sub.layer[z1] != sub.layer[z2]:
            added.append((z1, z2))
        elif sub.layer[z1] == lo:
            del_hi.discard(y[b])
            stripped.append(y[b])
            added += [(y[b], z1), (y[b], z2)]
        else:
            del_lo.discard(x[b])
            stripped.append(x[b])
            added += [(x[b], z1), (x[b], z2)]
    elif rule == "pathsA":
        del_hi.discard(y[b])
        stripped.append(y[b])
        added += [(x[a], y[b]), (x[c], y[b])]
    else:
        del_lo.discard(x[b])
        stripped.append(x[b])
        added += [(x[b], y[a]), (x[b], y[c])]
    return Separation(rule, sep, piece, family, frozenset(del_lo | del_hi), tuple(stripped), tuple(added))


def check_path_separation(work: WorkGraph, k: int, p1: tuple[int, int, int], p2: tuple[int, int, int]) -> Separation | None:
    """Verify a 6-separation by the 2-paths ``p1`` and ``p2`` (layers 1-2-3)."""
    sep = list(p1) + list(p2)
    if len(set(sep)) != 6:
        return None
    for p in (p1, p2):
        if [work.layer[x] for x in p] != [1, 2, 3]:
            return None
        if p[1] not in work.adj[p[0]] or p[2] not in work.adj[p[1]]:
            return None
    for inside in _insides(work, sep, set(p1), set(p2), {1, 2, 3}):
        piece = set(inside) | set(sep)
        counts = [sum(1 for x in piece if work.layer[x] == i) for i in (1, 2, 3)]
        if min(counts) < 4 * k + 3:
            continue
        sub = work.induced(piece)
        orders = endpoint_orders(sub, {1: (p1[0], p2[0]), 2: (p1[1], p2[1]), 3: (p1[2], p2[2])})
        if orders is None:
            continue
        pos = {x: i for seq in orders.values() for i, x in enumerate(seq)}
        paths = []
        for y in orders[2]:
            xs = [n for n in sub.adj[y] if sub.layer[n] == 1]
            zs = [n for n in sub.adj[y] if sub.layer[n] == 3]
            for xx in xs:
                for zz in zs:
                    paths.append(((pos[xx], pos[y], pos[zz]), (xx, y, zz)))
        family = _family(paths, tuple(pos[v] for v in p1), tuple(pos[v] for v in p2), k)
        if family is None:
            continue
        x = [None] + [f[0] for f in family]
        y = [None] + [f[1] for f in family]
        z = [None] + [f[2] for f in family]
        a, b, c = 2 * k + 1, 2 * k + 2, 2 * k + 3
        deleted = set()
        for seq, ends in ((x, orders[1]), (y, orders[2]), (z, orders[3])):
            lo_pos, hi_pos = pos[seq[a]], pos[seq[c]]
            deleted |= {w for w in ends if lo_pos < pos[w] < hi_pos}
        deleted.discard(y[b])
        return Separation("pathsC", tuple(sep), frozenset(piece), family, frozenset(deleted),
                          (y[b],), ((x[a], y[b]), (x[c], y[b])))
    return None


def _apply_separation(work: WorkGraph, sep: Separation) -> RuleApplication:
    work.remove_vertices(sep.deleted)
    for v in sep.stripped:
        for u in list(work.adj[v]):
            work.remove_edge(v, u)
    for u, v in sep.added:
        if v not in work.adj[u]:
            work.add_edge(u, v)
    return RuleApplication(sep.rule, tuple(sorted(sep.deleted)), tuple(sep.added), sep.separator)


# ---------------------------------------------------- candidate generators


def _gap_edges(work: WorkGraph, lo: int) -> list[tuple[int, int]]:
    out = []
    for a, b, _ in work.edge_list():
        if work.layer[a] == lo + 1:
            a, b = b, a
        if work.layer[a] == lo and work.layer[b] == lo + 1:
            out.append((a, b))
    return sorted(out)


def _two_paths(work: WorkGraph) -> list[tuple[int, int, int]]:
    out = []
    for y in work.layer_vertices(2):
        xs = sorted(n for n in work.adj[y] if work.layer[n] == 1)
        zs = sorted(n for n in work.adj[y] if work.layer[n] == 3)
        out.extend((x, y, z) for x in xs for z in zs)
    return out


def backbones(work: WorkGraph, lo: int, k: int, apex_layer: int | None = None) -> list[list[int]] | Decided:
    """Extended backbone paths in ``G[V_lo + V_lo+1]``, or Decided.NO when a
    long backbone closes into a cycle.

    A backbone vertex has exactly two non-pendant neighbours in the
    two-layer subgraph. Without an apex layer, middle-layer backbone
    vertices must have no neighbour in the third layer.
    """
    pair = (lo, lo + 1)
    third = 3 if lo == 1 else 1
    sub_vertices = [v for v in work.layer if work.layer[v] in pair]
    inner: set[int] = set()
    for v in sub_vertices:
        if work.layer[v] == 2 and apex_layer is None and any(work.layer[x] == third for x in work.adj[v]):
            continue
        strong = [x for x in work.adj[v] if work.layer[x] in pair and work.degree(x) > 1]
        if len(strong) == 2:
            inner.add(v)
    sub = work.induced(inner)
    out = []
    for comp in sub.components():
        if len(comp) < 4 * k + 1:
            continue
        ends = [v for v in comp if sub.degree(v) < 2]
        if not ends:
            return Decided.NO
        start = min(ends)
        path, prev = [start], None
        while True:
            nxt = [x for x in sub.adj[path[-1]] if x != prev]
            if not nxt:
                break
            prev = path[-1]
            path.append(nxt[0])
        ext = []
        for end, neighbour in ((path[0], path[1] if len(path) > 1 else None), (path[-1], path[-2] if len(path) > 1 else None)):
            outer = [x for x in work.adj[end] if work.layer[x] in pair and work.degree(x) > 1 and x not in inner]
            ext.append(outer)
        first = ext[0][:1]
        last = [x for x in ext[1] if x not in first][:1] if len(path) > 1 else ext[0][1:2]
        if ext[0] and ext[1] and len(path) > 1 and ext[0] == ext[1] and len(ext[0]) == 1:
            return Decided.NO
        out.append(first + path + last)
    return out


def _region_edges(work: WorkGraph, path: list[int], lo: int) -> list[tuple[int, int]]:
    region = set(path)
    for v in path:
        region.update(work.adj[v])
    return [e for e in _gap_edges(work, lo) if e[0] in region and e[1] in region]


def _rule_layers(rule: str) -> tuple[int, int | None]:
    return {
        "matchA": (1, None),
        "matchB": (2, None),
        "pathsA": (1, 3),
        "pathsB": (2, 1),
    }[rule]


def _edge_pair_candidates(work: WorkGraph, rule: str, k: int, scheduled: bool):
    lo, apex_layer = _rule_layers(rule)
    if scheduled:
        found = backbones(work, lo, k, apex_layer)
        if found is Decided.NO:
            yield Decided.NO
            return
        pools = [_region_edges(work, path, lo) for path in found]
    else:
        pools = [_gap_edges(work, lo)]
    seen = set()
    for pool in pools:
        for e1, e2 in combinations(pool, 2):
            if len({*e1, *e2}) != 4 or (e1, e2) in seen:
                continue
            seen.add((e1, e2))
            if apex_layer is None:
                yield e1, e2, None
            else:
                hub1, hub2 = (e1[1], e2[1]) if rule == "pathsA" else (e1[0], e2[0])
                for w in sorted(set(work.adj[hub1]) & set(work.adj[hub2])):
                    if work.layer[w] == apex_layer:
                        yield e1, e2, w


def find_separations(work: WorkGraph, k: int, rule: str, scheduled: bool = True, first_only: bool = False):
    """Verified candidates for one separation rule, or Decided.NO."""
    need = {"pathsC": 3 * (4 * k + 3)}.get(rule, 2 * (4 * k + 3))
    if len(work) < need:
        return []
    found: list[Separation] = []
    if rule == "pathsC":
        paths = _two_paths(work)
        comp_of = {}
        for i, comp in enumerate(work.components()):
            for v in comp:
                comp_of[v] = i
        for p1, p2 in combinations(paths, 2):
            if scheduled and comp_of[p1[1]] != comp_of[p2[1]]:
                continue
            sep = check_path_separation(work, k, p1, p2)
            if sep is not None:
                found.append(sep)
                if first_only:
                    break
        return found
    for cand in _edge_pair_candidates(work, rule, k, scheduled):
        if cand is Decided.NO:
            return Decided.NO
        e1, e2, w = cand
        sep = check_two_layer_separation(work, k, rule, e1, e2, w)
        if sep is not None:
            found.append(sep)
            if first_only:
                break
    return found


def _best(found: list[Separation]) -> Separation | None:
    if not found:
        return None
    return max(found, key=lambda s: (len(s.deleted), [-x for x in s.separator]))


def find_backbone_separations(instance: Instance, variant: str) -> list[Separation] | Decided:
    """Scheduled-mode candidates for ``4sep``, ``5sep`` or ``6sep``.

    Returns Decided.NO when a cycle with at least 2k+4 vertices shows up in
    two adjacent layers.
    """
    rules = {"4sep": ("matchA", "matchB"), "5sep": ("pathsA", "pathsB"), "6sep": ("pathsC",)}[variant]
    work = WorkGraph.from_layered(instance.graph)
    if find_long_cycle(work, instance.k) is not None:
        return Decided.NO
    out: list[Separation] = []
    for rule in rules:
        found = find_separations(work, instance.k, rule, scheduled=True)
        if found is Decided.NO:
            return Decided.NO
        out.extend(found)
    return out


# -------------------------------------------------------------- interface


def _one_step(work: WorkGraph, k: int, rule: str, scheduled: bool = True):
    """Apply ``rule`` once in place; RuleApplication, None or Decided."""
    if rule == "comp":
        app = _find_comp(work)
    elif rule == "pend":
        app = _find_pend(work, k)
    elif rule == "degtwo":
        app = _find_degtwo(work, k)
    elif rule == "nice":
        app = _find_nice(work, k)
    elif rule in ("matchA", "matchB", "pathsA", "pathsB", "pathsC"):
        found = find_separations(work, k, rule, scheduled=scheduled)
        if found is Decided.NO:
            return Decided.NO
        best = _best(found)
        return None if best is None else _apply_separation(work, best)
    else:
        raise InvariantError(f"unknown rule {rule!r}")
    if app is not None:
        work.remove_vertices(app.deleted)
    return app


def _final_exceeded(n: int, m: int, k: int) -> bool:
    max_v, max_e = size_bounds(k)
    return n > max_v or m > max_e


def apply_rule(rule_id: str, instance: Instance):
    """Apply one rule once: Changed, NOT_APPLICABLE or a Decided answer."""
    graph = instance.graph
    if graph.h != 3:
        raise InvariantError("kernel3 rules need a 3-layer instance")
    if rule_id == "final":
        return Decided.NO if _final_exceeded(graph.n, graph.m, instance.k) else NOT_APPLICABLE
    work = WorkGraph.from_layered(graph)
    result = _one_step(work, instance.k, rule_id)
    if result is Decided.NO:
        return Decided.NO
    if result is None:
        return NOT_APPLICABLE
    reduced, old = work.to_layered()
    return Changed(Instance(reduced, instance.k, instance.k_star), result, tuple(old))


def _exhaust(work: WorkGraph, k: int, rules: Iterable[str], trace: list[RuleApplication], scheduled: bool):
    rules = tuple(rules)
    while True:
        progressed = False
        for rule in rules:
            while True:
                result = _one_step(work, k, rule, scheduled)
                if result is Decided.NO:
                    return Decided.NO
                if result is None:
                    break
                trace.append(result)
                progressed = True
        if not progressed or len(rules) == 1:
            return None


def kernelize3(instance: Instance, mode: str = "scheduled") -> Kernelized | Decided:
    """Reduce a 3-layer instance; Kernelized, Decided.YES or Decided.NO."""
    graph = instance.graph
    if graph.h != 3:
        raise InvariantError("kernelize3 needs a 3-layer instance")
    if mode not in ("scheduled", "fixpoint"):
        raise InvariantError(f"unknown mode {mode!r}")
    k = instance.k
    work = WorkGraph.from_layered(graph)
    if free_orders(work) is not None:
        return Decided.YES
    if k == 0:
        return Decided.NO
    trace: list[RuleApplication] = []
    if mode == "scheduled":
        phases = [
            ("comp",), ("pend",), ("degtwo",), ("nice",),
            ("matchA", "matchB"), ("degtwo",),
            ("pathsA", "pathsB"), ("degtwo",),
        ]
        for phase in phases:
            if phase[0] in ("matchA", "pathsA") and find_long_cycle(work, k) is not None:
                return Decided.NO
            if _exhaust(work, k, phase, trace, True) is Decided.NO:
                return Decided.NO
        while True:
            result = _one_step(work, k, "pathsC", True)
            if result is Decided.NO:
                return Decided.NO
            if result is None:
                break
            trace.append(result)
            if _exhaust(work, k, ("pend", "degtwo", "nice"), trace, True) is Decided.NO:
                return Decided.NO
        if _exhaust(work, k, ("pend", "degtwo", "nice"), trace, True) is Decided.NO:
            return Decided.NO
    else:
        if len(work) > FIXPOINT_MAX_VERTICES:
            raise InvariantError(f"fixpoint mode is a test oracle for graphs up to {FIXPOINT_MAX_VERTICES} vertices")
        while True:
            for rule in RULES[:-1]:
                result = _one_step(work, k, rule, False)
                if result is Decided.NO:
                    return Decided.NO
                if result is not None:
                    trace.append(result)
                    break
            else:
                break
    if _final_exceeded(len(work), work.edge_count(), k):
        return Decided.NO
    reduced, old = work.to_layered()
    return Kernelized(Instance(reduced, k, instance.k_star), tuple(old), tuple(trace))


def pendant_profile(graph: LayeredGraph) -> tuple[int, int]:
    """Largest pendant count per side of a middle vertex, and largest
    ``|Q(u, v)|``; used to audit the pendant cap."""
    work = WorkGraph.from_layered(graph)
    pend = max((len(_pendants(work, u, s)) for u in work.layer_vertices(2) for s in (1, 3)), default=0)
    q = max((len(m) for m in _degtwo_groups(work).values()), default=0)
    return pend, q
