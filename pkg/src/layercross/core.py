"""Layered graphs, drawings, crossing counts and the text codecs.

A layered graph has its vertices on ``h`` horizontal lines. Edges only join
consecutive lines, and a drawing is one left-to-right order per line. Two
edges of the same gap cross when their endpoint orders disagree. Each crossing
pair contributes the product of the two multiplicities.

Vertex ids are ``1..n`` and ``layer_of[v - 1]`` is the layer of ``v``.
Multi-edges are stored once with a multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

MIN_LAYERS = 2
MAX_LAYERS = 5


class InvariantError(ValueError):
    """A graph, drawing or instance breaks one of its structural rules."""


class ParseError(ValueError):
    """Malformed input text; ``line`` is 1-based (0 when not tied to a line)."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class LayeredGraph:
    """Immutable h-layer graph.

    ``edges`` holds ``(u, v, mult)`` triples with ``u < v``, sorted, and
    without duplicate endpoint pairs. Use :meth:`build` to normalise raw
    input; the plain constructor trusts its arguments.
    """

    h: int
    layer_of: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]

    @classmethod
    def build(
        cls,
        h: int,
        layer_of: Sequence[int] | Mapping[int, int],
        edges: Iterable[Sequence[int]],
        *,
        check: bool = True,
    ) -> "LayeredGraph":
        """Normalise edges and merge parallel copies into multiplicities.

        ``layer_of`` is either a sequence indexed by ``v - 1`` or a mapping
        from every id ``1..n`` to its layer.
        """
        if isinstance(layer_of, Mapping):
            n = len(layer_of)
            try:
                layers = tuple(int(layer_of[v]) for v in range(1, n + 1))
            except KeyError as exc:
                raise InvariantError(f"vertex ids must be 1..{n}; missing {exc.args[0]}") from None
        else:
            layers = tuple(int(x) for x in layer_of)
        merged: dict[tuple[int, int], int] = {}
        for e in edges:
            u, v = int(e[0]), int(e[1])
            mult = int(e[2]) if len(e) > 2 else 1
            key = _edge_key(u, v)
            merged[key] = merged.get(key, 0) + mult
        graph = cls(h, layers, tuple((u, v, m) for (u, v), m in sorted(merged.items())))
        if check:
            problem = validate(graph)
            if problem is not None:
                raise InvariantError(problem)
        return graph

    @property
    def n(self) -> int:
        return len(self.layer_of)

    @property
    def m(self) -> int:
        return len(self.edges)

    def layer(self, v: int) -> int:
        return self.layer_of[v - 1]

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def layer_vertices(self, i: int) -> list[int]:
        return [v for v, lay in enumerate(self.layer_of, start=1) if lay == i]

    def layers(self) -> list[list[int]]:
        """Vertex lists of layers ``1..h`` in ascending id order."""
        out: list[list[int]] = [[] for _ in range(self.h)]
        for v, lay in enumerate(self.layer_of, start=1):
            out[lay - 1].append(v)
        return out

    def adjacency(self) -> dict[int, dict[int, int]]:
        adj: dict[int, dict[int, int]] = {v: {} for v in self.vertices()}
        for u, v, mult in self.edges:
            adj[u][v] = mult
            adj[v][u] = mult
        return adj

    def total_multiplicity(self) -> int:
        return sum(m for _, _, m in self.edges)


def validate(graph: LayeredGraph, *, allow_empty_layers: bool = True) -> str | None:
    """Return a description of the first violated invariant, or ``None``.

    Empty layers are allowed by default because generators build graphs
    piecewise; pass ``allow_empty_layers=False`` for the strict rule.
    """
    if not MIN_LAYERS <= graph.h <= MAX_LAYERS:
        return f"layer count {graph.h} outside {MIN_LAYERS}..{MAX_LAYERS}"
    n = graph.n
    for v, lay in enumerate(graph.layer_of, start=1):
        if not 1 <= lay <= graph.h:
            return f"vertex {v} has layer {lay} outside 1..{graph.h}"
    if not allow_empty_layers:
        present = set(graph.layer_of)
        for i in range(1, graph.h + 1):
            if i not in present:
                return f"layer {i} is empty"
    seen: set[tuple[int, int]] = set()
    for u, v, mult in graph.edges:
        if not (1 <= u <= n and 1 <= v <= n):
            return f"edge {u}-{v} names an unknown vertex"
        if u == v:
            return f"self-loop at vertex {u}"
        if mult < 1:
            return f"edge {u}-{v} has multiplicity {mult}"
        key = _edge_key(u, v)
        if key in seen:
            return f"edge {u}-{v} listed twice; merge it into a multiplicity"
        seen.add(key)
        if abs(graph.layer_of[u - 1] - graph.layer_of[v - 1]) != 1:
            return f"edge {u}-{v} joins non-consecutive layers"
    return None


@dataclass(frozen=True)
class Drawing:
    """One left-to-right order per layer; ``orders[i - 1]`` is layer ``i``."""

    orders: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, orders: Iterable[Iterable[int]]) -> "Drawing":
        return cls(tuple(tuple(int(v) for v in o) for o in orders))

    @property
    def h(self) -> int:
        return len(self.orders)

    def positions(self) -> dict[int, int]:
        pos: dict[int, int] = {}
        for order in self.orders:
            for j, v in enumerate(order):
                pos[v] = j
        return pos

    def reversed(self) -> "Drawing":
        return Drawing(tuple(tuple(reversed(o)) for o in self.orders))


def check_drawing(graph: LayeredGraph, drawing: Drawing) -> None:
    """Raise :class:`InvariantError` unless each order permutes its layer."""
    if drawing.h != graph.h:
        raise InvariantError(f"drawing has {drawing.h} layers, graph has {graph.h}")
    for i, (order, expected) in enumerate(zip(drawing.orders, graph.layers()), start=1):
        if len(order) != len(expected) or sorted(order) != expected:
            raise InvariantError(f"order of layer {i} is not a permutation of its vertices")


@dataclass(frozen=True)
class Instance:
    graph: LayeredGraph
    k: int
    k_star: int | None = None

    def __post_init__(self) -> None:
        if self.k < 0:
            raise InvariantError("budget k must be non-negative")
        if self.k_star is None:
            object.__setattr__(self, "k_star", self.k)
        elif self.k > self.k_star:
            raise InvariantError("budget k exceeds the original parameter k_star")


@dataclass(frozen=True)
class CrossingReport:
    total: int
    per_gap: tuple[int, ...]
    pairs: tuple[tuple[tuple[int, int], tuple[int, int]], ...] | None = field(default=None)


class _Fenwick:
    __slots__ = ("tree",)

    def __init__(self, size: int):
        self.tree = [0] * (size + 1)

    def add(self, i: int, delta: int) -> None:
        i += 1
        tree = self.tree
        while i < len(tree):
            tree[i] += delta
            i += i & -i

    def prefix(self, i: int) -> int:
        """Sum over indices ``< i``."""
        total = 0
        tree = self.tree
        while i > 0:
            total += tree[i]
            i -= i & -i
        return total


def _gap_edges(graph: LayeredGraph, pos: Mapping[int, int]) -> list[list[tuple[int, int, int]]]:
    """Per gap, the edges as (lower position, upper position, mult)."""
    gaps: list[list[tuple[int, int, int]]] = [[] for _ in range(graph.h - 1)]
    lay = graph.layer_of
    for u, v, mult in graph.edges:
        if lay[u - 1] > lay[v - 1]:
            u, v = v, u
        gaps[lay[u - 1] - 1].append((pos[u], pos[v], mult))
    return gaps


def _count_gap(items: list[tuple[int, int, int]], upper_size: int) -> int:
    """Weighted count of pairs with a1 < a2 and b1 > b2."""
    items.sort()
    fen = _Fenwick(upper_size)
    inserted = 0
    total = 0
    i = 0
    while i < len(items):
        j = i
        a = items[i][0]
        while j < len(items) and items[j][0] == a:
            j += 1
        for _, b, mult in items[i:j]:
            total += mult * (inserted - fen.prefix(b + 1))
        for _, b, mult in items[i:j]:
            fen.add(b, mult)
            inserted += mult
        i = j
    return total


def _crossing_pairs(graph: LayeredGraph, pos: Mapping[int, int]):
    lay = graph.layer_of
    by_gap: dict[int, list[tuple[int, int]]] = {}
    for u, v, _ in graph.edges:
        if lay[u - 1] > lay[v - 1]:
            u, v = v, u
        by_gap.setdefault(lay[u - 1], []).append((u, v))
    pairs = []
    for gap in sorted(by_gap):
        for (a1, b1), (a2, b2) in combinations(by_gap[gap], 2):
            if (pos[a1] - pos[a2]) * (pos[b1] - pos[b2]) < 0:
                pairs.append(((a1, b1), (a2, b2)))
    return tuple(pairs)


def count_crossings(graph: LayeredGraph, drawing: Drawing, *, with_pairs: bool = False) -> CrossingReport:
    """Weighted crossing count by per-gap inversion counting.

    ``with_pairs`` also lists the crossing edge pairs (quadratic).
    """
    check_drawing(graph, drawing)
    pos = drawing.positions()
    sizes = [len(o) for o in drawing.orders]
    per_gap = tuple(
        _count_gap(items, sizes[g + 1]) for g, items in enumerate(_gap_edges(graph, pos))
    )
    pairs = _crossing_pairs(graph, pos) if with_pairs else None
    return CrossingReport(sum(per_gap), per_gap, pairs)


def count_crossings_pairwise(graph: LayeredGraph, drawing: Drawing) -> CrossingReport:
    """Quadratic reference counter: checks every pair of edges."""
    check_drawing(graph, drawing)
    pos = drawing.positions()
    lay = graph.layer_of
    per_gap = [0] * (graph.h - 1)
    oriented = []
    for u, v, mult in graph.edges:
        if lay[u - 1] > lay[v - 1]:
            u, v = v, u
        oriented.append((lay[u - 1], u, v, mult))
    for (g1, a1, b1, m1), (g2, a2, b2, m2) in combinations(oriented, 2):
        if g1 == g2 and (pos[a1] - pos[a2]) * (pos[b1] - pos[b2]) < 0:
            per_gap[g1 - 1] += m1 * m2
    return CrossingReport(sum(per_gap), tuple(per_gap))


def count_crossings_weighted(
    graph: LayeredGraph,
    drawing: Drawing,
    boundary_exceptions: Iterable[int],
    weighted_edges: Iterable[int] = (),
) -> CrossingReport:
    """Crossing count where excepted boundary edges shield weighted edges.

    Edge ids index ``graph.edges``. A weighted edge incident to one endpoint
    of an excepted boundary edge and a weighted edge incident to its other
    endpoint contribute nothing to each other, even when they cross.
    """
    weighted = set(weighted_edges)
    exceptions = sorted(set(boundary_exceptions))
    for eid in list(weighted) + exceptions:
        if not 0 <= eid < graph.m:
            raise InvariantError(f"edge id {eid} out of range")
    for eid in exceptions:
        if eid in weighted:
            raise InvariantError(f"edge id {eid} is weighted, not a boundary edge")
    base = count_crossings(graph, drawing)
    if not exceptions or not weighted:
        return base
    pos = drawing.positions()
    lay = graph.layer_of
    at: dict[int, list[int]] = {}
    for eid in weighted:
        u, v, _ = graph.edges[eid]
        at.setdefault(u, []).append(eid)
        at.setdefault(v, []).append(eid)
    shielded: set[tuple[int, int]] = set()
    for bid in exceptions:
        x, y, _ = graph.edges[bid]
        for e1 in at.get(x, ()):
            for e2 in at.get(y, ()):
                if e1 != e2:
                    shielded.add(_edge_key(e1, e2))
    per_gap = list(base.per_gap)
    for e1, e2 in shielded:
        a1, b1, m1 = graph.edges[e1]
        a2, b2, m2 = graph.edges[e2]
        if lay[a1 - 1] > lay[b1 - 1]:
            a1, b1 = b1, a1
        if lay[a2 - 1] > lay[b2 - 1]:
            a2, b2 = b2, a2
        if lay[a1 - 1] != lay[a2 - 1]:
            continue
        if (pos[a1] - pos[a2]) * (pos[b1] - pos[b2]) < 0:
            per_gap[lay[a1 - 1] - 1] -= m1 * m2
    return CrossingReport(sum(per_gap), tuple(per_gap))


# ----------------------------------------------------------------- codecs


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        yield lineno, tok


def _ints(tokens: Sequence[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def decode_instance(text: str) -> Instance:
    """Parse the ``.lgr`` format into an :class:`Instance`."""
    header = None
    layer_of: dict[int, int] = {}
    edges: list[tuple[int, int, int]] = []
    for lineno, tok in _data_lines(text):
        kind = tok[0]
        if header is None:
            if kind != "p" or len(tok) != 6 or tok[1] != "lgr":
                raise ParseError("first line must be 'p lgr <h> <n> <m> <k>'", lineno)
            header = _ints(tok[2:], lineno)
            continue
        if kind == "p":
            raise ParseError("duplicate problem line", lineno)
        if kind == "n":
            if len(tok) != 3:
                raise ParseError("vertex line must be 'n <id> <layer>'", lineno)
            v, lay = _ints(tok[1:], lineno)
            if v in layer_of:
                raise ParseError(f"vertex {v} declared twice", lineno)
            layer_of[v] = lay
        elif kind == "e":
            if len(tok) not in (3, 4):
                raise ParseError("edge line must be 'e <u> <v> [<mult>]'", lineno)
            vals = _ints(tok[1:], lineno)
            u, v = vals[0], vals[1]
            mult = vals[2] if len(vals) == 3 else 1
            for w in (u, v):
                if w not in layer_of:
                    raise ParseError(f"edge uses undeclared vertex {w}", lineno)
            if abs(layer_of[u] - layer_of[v]) != 1:
                raise ParseError(f"edge {u}-{v} joins non-consecutive layers", lineno)
            if mult < 1:
                raise ParseError("multiplicity must be positive", lineno)
            edges.append((u, v, mult))
        else:
            raise ParseError(f"unknown line type {kind!r}", lineno)
    if header is None:
        raise ParseError("missing 'p lgr' line")
    h, n, m, k = header
    if sorted(layer_of) != list(range(1, n + 1)):
        raise ParseError(f"vertex ids must be exactly 1..{n}")
    if len(edges) != m:
        raise ParseError(f"header announces {m} edges, found {len(edges)}")
    if k < 0:
        raise ParseError("budget must be non-negative")
    try:
        graph = LayeredGraph.build(h, layer_of, edges)
    except InvariantError as exc:
        raise ParseError(str(exc)) from None
    return Instance(graph, k)


def encode_instance(instance: Instance) -> str:
    g = instance.graph
    lines = [f"p lgr {g.h} {g.n} {g.m} {instance.k}"]
    lines.extend(f"n {v} {lay}" for v, lay in enumerate(g.layer_of, start=1))
    for u, v, mult in g.edges:
        lines.append(f"e {u} {v}" if mult == 1 else f"e {u} {v} {mult}")
    return "\n".join(lines) + "\n"


def decode_drawing(text: str) -> Drawing:
    """Parse the ``.ord`` format; layers may appear in any order."""
    header = None
    orders: dict[int, list[int]] = {}
    for lineno, tok in _data_lines(text):
        if header is None:
            if tok[0] != "p" or len(tok) != 4 or tok[1] != "ord":
                raise ParseError("first line must be 'p ord <h> <n>'", lineno)
            header = _ints(tok[2:], lineno)
            continue
        if tok[0] != "o" or len(tok) < 2:
            raise ParseError("order line must be 'o <layer> <id> ...'", lineno)
        vals = _ints(tok[1:], lineno)
        if vals[0] in orders:
            raise ParseError(f"layer {vals[0]} listed twice", lineno)
        orders[vals[0]] = vals[1:]
    if header is None:
        raise ParseError("missing 'p ord' line")
    h, n = header
    if sorted(orders) != list(range(1, h + 1)):
        raise ParseError(f"expected one order line for each layer 1..{h}")
    drawing = Drawing.of(orders[i] for i in range(1, h + 1))
    if sum(len(o) for o in drawing.orders) != n:
        raise ParseError(f"header announces {n} vertices")
    return drawing


def encode_drawing(drawing: Drawing) -> str:
    n = sum(len(o) for o in drawing.orders)
    lines = [f"p ord {drawing.h} {n}"]
    for i, order in enumerate(drawing.orders, start=1):
        lines.append(" ".join(["o", str(i), *map(str, order)]))
    return "\n".join(lines) + "\n"


def decode_constraints(text: str, h: int):
    """Parse ``chain``/``pair`` lines into :class:`OrderConstraints`."""
    from .planarity import OrderConstraints

    chains: list[list[list[int]]] = [[] for _ in range(h)]
    pairs: dict[int, tuple[int, int]] = {}
    for lineno, tok in _data_lines(text):
        if tok[0] == "chain":
            vals = _ints(tok[1:], lineno)
            if not vals or not 1 <= vals[0] <= h:
                raise ParseError("chain line must be 'chain <layer> <id> ...'", lineno)
            chains[vals[0] - 1].append(vals[1:])
        elif tok[0] == "pair":
            vals = _ints(tok[1:], lineno)
            if len(vals) != 3 or not 1 <= vals[0] <= h:
                raise ParseError("pair line must be 'pair <layer> <s> <t>'", lineno)
            if vals[0] in pairs:
                raise ParseError(f"second pair for layer {vals[0]}", lineno)
            pairs[vals[0]] = (vals[1], vals[2])
        else:
            raise ParseError(f"unknown constraint line {tok[0]!r}", lineno)
    return OrderConstraints.of(chains, pairs)
