"""Exhaustive exact solvers, used directly on tiny inputs and as oracles.

``brute_min`` covers every drawing. It factorises the count by gap: for
each pair of neighbouring layers a table holds the crossings of every pair
of layer permutations, and a backward pass over the layers finds the
optimum together with the lexicographically first optimal drawing (layer 1
most significant, last layer fastest).
"""

from __future__ import annotations

import sys
from itertools import permutations
from math import factorial, prod

import numpy as np

from .core import Drawing, Instance, InvariantError, LayeredGraph, count_crossings
from .planarity import OrderConstraints, _closure

DEFAULT_LIMIT = 10**7
DEFAULT_NODE_LIMIT = 2_000_000


class ResourceLimitError(RuntimeError):
    """A configured enumeration or search budget was exhausted."""


class UnsatisfiableConstraints(ValueError):
    """No drawing is compatible with the given order constraints."""


def _layer_perms(vertices: list[int], before: dict[int, set[int]] | None) -> list[tuple[int, ...]]:
    if not before or not any(before.values()):
        return list(permutations(vertices))
    out = []
    for perm in permutations(vertices):
        seen: set[int] = set()
        for v in perm:
            if not before[v] <= seen:
                break
            seen.add(v)
        else:
            out.append(perm)
    return out


def _constraint_closures(graph: LayeredGraph, constraints: OrderConstraints | None):
    if constraints is None or constraints.is_empty():
        return [None] * graph.h
    layer_of = {v: graph.layer(v) for v in graph.vertices()}
    constraints.validate_against(layer_of, graph.h)
    out = []
    for i, members in enumerate(graph.layers(), start=1):
        out.append(_closure(members, constraints.relations(i, members)))
    return out


def drawing_count(graph: LayeredGraph) -> int:
    return prod(factorial(len(layer)) for layer in graph.layers())


def _gap_table(graph: LayeredGraph, g: int, perms_a, perms_b) -> np.ndarray:
    """Crossings between layers g and g+1 for every pair of permutations."""
    layers = graph.layers()
    a_list, b_list = layers[g - 1], layers[g]
    ia = {v: i for i, v in enumerate(a_list)}
    ib = {v: i for i, v in enumerate(b_list)}
    na, nb = len(a_list), len(b_list)
    w = np.zeros((na, nb), dtype=np.int64)
    for u, v, mult in graph.edges:
        if u in ia and v in ib:
            w[ia[u], ib[v]] += mult
        elif v in ia and u in ib:
            w[ia[v], ib[u]] += mult
    if na == 0 or nb == 0 or not w.any():
        return np.zeros((len(perms_a), len(perms_b)), dtype=np.int64)

    def before_matrix(perms, index, size):
        mat = np.zeros((len(perms), size, size), dtype=np.int64)
        for p, perm in enumerate(perms):
            rank = np.empty(size, dtype=np.int64)
            for r, v in enumerate(perm):
                rank[index[v]] = r
            mat[p] = rank[:, None] < rank[None, :]
        return mat.reshape(len(perms), size * size)

    xa = before_matrix(perms_a, ia, na)
    xb = before_matrix(perms_b, ib, nb)
    # pair (i before j on layer g) with (y before x on layer g+1) for edges ix, jy
    kern = np.einsum("ix,jy->ijyx", w, w).reshape(na * na, nb * nb)
    return xa @ kern @ xb.T


def brute_min(
    graph: LayeredGraph,
    constraints: OrderConstraints | None = None,
    cap: int | None = None,
    limit: int = DEFAULT_LIMIT,
) -> tuple[int, Drawing]:
    """Minimum crossings over all constraint-compatible drawings.

    Returns ``(minimum, witness)`` where the witness is the lexicographically
    first optimal drawing. ``cap`` is accepted for interface symmetry with
    :func:`brute_decide`; the table pass is exact either way.
    """
    del cap
    closures = _constraint_closures(graph, constraints)
    layers = graph.layers()
    size = drawing_count(graph)
    if size > limit:
        raise ResourceLimitError(f"{size} drawings exceed the enumeration limit {limit}")
    perms = [_layer_perms(members, closures[i]) for i, members in enumerate(layers)]
    if any(not p for p in perms):
        raise UnsatisfiableConstraints("no drawing satisfies the order constraints")
    tables = [_gap_table(graph, g, perms[g - 1], perms[g]) for g in range(1, graph.h)]
    best = [np.zeros(len(perms[-1]), dtype=np.int64)]
    for table in reversed(tables):
        best.append((table + best[-1][None, :]).min(axis=1))
    best.reverse()
    choice = [int(np.argmin(best[0]))]
    for g, table in enumerate(tables):
        row = table[choice[-1]] + best[g + 1]
        choice.append(int(np.flatnonzero(row == best[g][choice[-1]])[0]))
    drawing = Drawing.of(perms[i][c] for i, c in enumerate(choice))
    return int(best[0][choice[0]]), drawing


def brute_min_enumerate(graph: LayeredGraph, constraints: OrderConstraints | None = None) -> tuple[int, Drawing]:
    """Straight enumeration in lexicographic order; slow reference for tests."""
    closures = _constraint_closures(graph, constraints)
    perms = [_layer_perms(members, closures[i]) for i, members in enumerate(graph.layers())]
    if any(not p for p in perms):
        raise UnsatisfiableConstraints("no drawing satisfies the order constraints")
    best = None
    from itertools import product

    for combo in product(*perms):
        drawing = Drawing.of(combo)
        total = count_crossings(graph, drawing).total
        if best is None or total < best[0]:
            best = (total, drawing)
    return best


def brute_decide(instance: Instance, constraints: OrderConstraints | None = None) -> Drawing | None:
    """A drawing with at most ``k`` crossings, or None."""
    total, drawing = brute_min(instance.graph, constraints, cap=instance.k)
    return drawing if total <= instance.k else None


# -------------------------------------------------------- branch and bound


class _BranchAndBound:
    """Append vertices to the right end of their layer, choosing the least
    filled layer next, and prune when the crossings fixed so far reach the
    best known cost.

    A placed vertex precedes every unplaced vertex of its layer, so the order
    of two same-layer vertices is known once either is placed. A crossing is
    charged as soon as the orders on both of its layers are known, which
    makes the running cost exact rather than a loose lower bound. Twins
    (same neighbourhood with the same multiplicities) are placed in id order.
    """

    def __init__(self, graph: LayeredGraph, node_limit: int):
        self.graph = graph
        self.layers = graph.layers()
        adj = graph.adjacency()
        self.near = {
            v: ([(u, m) for u, m in adj[v].items() if graph.layer(u) == graph.layer(v) + 1],
                [(u, m) for u, m in adj[v].items() if graph.layer(u) == graph.layer(v) - 1])
            for v in graph.vertices()
        }
        groups: dict[tuple, list[int]] = {}
        for v in graph.vertices():
            groups.setdefault((graph.layer(v), tuple(sorted(adj[v].items()))), []).append(v)
        self.twin_before = {}
        for members in groups.values():
            for a, b in zip(members, members[1:]):
                self.twin_before[b] = a
        self.node_limit = node_limit
        self.nodes = 0

    def solve(self, bound: int) -> tuple[int, Drawing] | None:
        """Optimal drawing if its cost is at most ``bound``."""
        self.best_cost = bound + 1
        self.best: list[list[int]] | None = None
        self.placed: list[list[int]] = [[] for _ in self.layers]
        self.pos: dict[int, int] = {}
        self.remaining = [sorted(layer) for layer in self.layers]
        total = sum(len(x) for x in self.layers)
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * total + 100))
        self._search(0, total)
        if self.best is None:
            return None
        return self.best_cost, Drawing.of(self.best)

    def _charge(self, v: int, i: int) -> int:
        """Crossings fixed by putting ``v`` before the unplaced rest of layer i."""
        cost = 0
        pos = self.pos
        later = [w for w in self.remaining[i] if w != v]
        for side in (0, 1):
            for x, mx in self.near[v][side]:
                px = pos.get(x)
                for w in later:
                    for y, my in self.near[w][side]:
                        if y == x:
                            continue
                        py = pos.get(y)
                        # v precedes w, so the edges cross when y precedes x
                        if py is not None and (px is None or py < px):
                            cost += mx * my
        return cost

    def _next_layer(self) -> int:
        best = None
        for i, rem in enumerate(self.remaining):
            if rem:
                frac = len(self.placed[i]) / len(self.layers[i])
                if best is None or frac < best[0]:
                    best = (frac, i)
        return best[1]

    def _search(self, cost: int, left: int) -> None:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise ResourceLimitError(f"branch-and-bound exceeded {self.node_limit} nodes")
        if left == 0:
            if cost < self.best_cost:
                self.best_cost = cost
                self.best = [list(p) for p in self.placed]
            return
        i = self._next_layer()
        rem = self.remaining[i]
        for idx in range(len(rem)):
            v = rem[idx]
            twin = self.twin_before.get(v)
            if twin is not None and twin not in self.pos:
                continue
            extra = self._charge(v, i)
            if cost + extra >= self.best_cost:
                continue
            del rem[idx]
            self.pos[v] = len(self.placed[i])
            self.placed[i].append(v)
            self._search(cost + extra, left - 1)
            self.placed[i].pop()
            del self.pos[v]
            rem.insert(idx, v)
            if self.best_cost == 0:
                return


def branch_and_bound(graph: LayeredGraph, bound: int, node_limit: int = DEFAULT_NODE_LIMIT) -> tuple[int, Drawing] | None:
    """Optimal drawing when its crossing count is at most ``bound``."""
    return _BranchAndBound(graph, node_limit).solve(bound)


def solve3_exact(instance: Instance, node_limit: int = DEFAULT_NODE_LIMIT) -> tuple[int, Drawing] | None:
    """Exact 3-layer decision: kernelize, then branch-and-bound.

    Returns ``(minimum, drawing)`` of the input graph when the minimum is at
    most ``k``, else None. The kernel settles the decision; the witness
    comes from a bounded search on the input itself.
    """
    from .kernel2 import Decided, Kernelized
    from .kernel3 import kernelize3

    graph = instance.graph
    if graph.h != 3:
        raise InvariantError("solve3_exact needs a 3-layer instance")
    result = kernelize3(instance)
    if result is Decided.NO:
        return None
    if isinstance(result, Kernelized):
        kern = result.instance
        if branch_and_bound(kern.graph, kern.k, node_limit) is None:
            return None
    found = branch_and_bound(graph, instance.k, node_limit)
    if found is None:
        raise RuntimeError("kernel reported a yes-instance the input search refutes")
    return found
