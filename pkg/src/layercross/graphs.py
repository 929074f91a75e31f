"""Mutable adjacency-map graphs used inside the kernels and solvers."""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .core import LayeredGraph


class WorkGraph:
    """Layered multigraph with arbitrary positive vertex ids.

    ``adj[v][u]`` is the multiplicity of edge ``uv``.
    """

    __slots__ = ("h", "layer", "adj")

    def __init__(self, h: int, layer: dict[int, int] | None = None, adj: dict[int, dict[int, int]] | None = None):
        self.h = h
        self.layer: dict[int, int] = layer if layer is not None else {}
        self.adj: dict[int, dict[int, int]] = adj if adj is not None else {v: {} for v in self.layer}

    @classmethod
    def from_layered(cls, graph: LayeredGraph) -> "WorkGraph":
        work = cls(graph.h, {v: lay for v, lay in enumerate(graph.layer_of, start=1)})
        for u, v, mult in graph.edges:
            work.adj[u][v] = mult
            work.adj[v][u] = mult
        return work

    def to_layered(self) -> tuple[LayeredGraph, list[int]]:
        """Relabel to ids ``1..n`` in ascending old-id order.

        Returns the graph and ``old``, where ``old[i - 1]`` is the old id of
        new vertex ``i``.
        """
        old = sorted(self.layer)
        new = {v: i for i, v in enumerate(old, start=1)}
        edges = [(new[u], new[v], m) for u, v, m in self.edge_list()]
        graph = LayeredGraph.build(self.h, [self.layer[v] for v in old], edges, check=False)
        return graph, old

    def copy(self) -> "WorkGraph":
        return WorkGraph(self.h, dict(self.layer), {v: dict(nb) for v, nb in self.adj.items()})

    def __contains__(self, v: int) -> bool:
        return v in self.layer

    def __len__(self) -> int:
        return len(self.layer)

    def vertices(self) -> list[int]:
        return sorted(self.layer)

    def layer_vertices(self, i: int) -> list[int]:
        return sorted(v for v, lay in self.layer.items() if lay == i)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    def edge_list(self) -> list[tuple[int, int, int]]:
        return sorted((u, v, m) for u, nb in self.adj.items() for v, m in nb.items() if u < v)

    def edge_count(self) -> int:
        return sum(len(nb) for nb in self.adj.values()) // 2

    def next_id(self) -> int:
        return max(self.layer, default=0) + 1

    def add_vertex(self, v: int, layer: int) -> None:
        self.layer[v] = layer
        self.adj.setdefault(v, {})

    def remove_vertex(self, v: int) -> None:
        for u in self.adj.pop(v):
            del self.adj[u][v]
        del self.layer[v]

    def remove_vertices(self, vs: Iterable[int]) -> None:
        for v in vs:
            if v in self.layer:
                self.remove_vertex(v)

    def add_edge(self, u: int, v: int, mult: int = 1) -> None:
        self.adj[u][v] = self.adj[u].get(v, 0) + mult
        self.adj[v][u] = self.adj[u][v]

    def remove_edge(self, u: int, v: int) -> None:
        del self.adj[u][v]
        del self.adj[v][u]

    def induced(self, vs: Iterable[int]) -> "WorkGraph":
        keep = set(vs)
        return WorkGraph(
            self.h,
            {v: self.layer[v] for v in keep},
            {v: {u: m for u, m in self.adj[v].items() if u in keep} for v in keep},
        )

    def component_of(self, start: int, banned: frozenset[int] | set[int] = frozenset()) -> list[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in self.adj[v]:
                if u not in seen and u not in banned:
                    seen.add(u)
                    queue.append(u)
        return sorted(seen)

    def components(self, banned: Iterable[int] = ()) -> list[list[int]]:
        """Components of the graph minus ``banned``, ordered by smallest id."""
        ban = set(banned)
        seen: set[int] = set()
        out = []
        for v in sorted(self.layer):
            if v in seen or v in ban:
                continue
            comp = self.component_of(v, ban)
            seen.update(comp)
            out.append(comp)
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1
