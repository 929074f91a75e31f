"""Lower-bound gadgets built from Disjoint Factors instances.

Everything here is deterministic: vertex ids follow construction order and
each builder returns the graph together with a drawing and a table of named
port vertices.

Symbols are encoded as balanced binary strings ``0 + core + 1`` of length
``2 * ell``. Zeros become Z gadgets and ones become U gadgets; their hatted
partners carry ``p`` pendants per heavy vertex. Inside a restrictive drawing
each hatted zero costs 4 crossings, each hatted one 6, and each connector
between consecutive hatted gadgets 2, which adds up to ``14 * ell - 2``.
"""

from __future__ import annotations

import string as _string
from dataclasses import dataclass, field
from itertools import combinations
from math import ceil, comb, log2

from .core import Drawing, Instance, InvariantError, LayeredGraph

DF_LENGTH_LIMIT = 400
DF_SYMBOL_LIMIT = 16


def ell_for(k: int) -> int:
    if k < 1:
        raise InvariantError("alphabet size must be at least 1")
    return ceil(log2(k)) + 1 if k > 1 else 1


def encode_alphabet(k: int) -> list[str]:
    """``k`` balanced codes of length ``2 * ell``, in lexicographic order.

    Cores are the balanced strings of length ``2 * (ell - 1)``; the leading 0
    and trailing 1 keep every reversal away from the code set.
    """
    half = ell_for(k) - 1
    cores = []
    for ones in combinations(range(2 * half), half):
        cores.append("".join("1" if i in ones else "0" for i in range(2 * half)))
    cores.sort()
    if len(cores) < k:
        raise InvariantError("not enough balanced cores")
    return ["0" + c + "1" for c in cores[:k]]


@dataclass(frozen=True)
class GadgetParams:
    k: int
    ell: int
    p: int
    encodings: tuple[str, ...]

    @classmethod
    def make(cls, k: int, p: int | None = None) -> "GadgetParams":
        if p is None:
            p = 40 * k**3
        if p < 1:
            raise InvariantError("p must be positive")
        return cls(k, ell_for(k), p, tuple(encode_alphabet(k)))


@dataclass(frozen=True)
class Gadget:
    graph: LayeredGraph
    drawing: Drawing
    ports: dict = field(default_factory=dict)


class _Builder:
    """Accumulates vertices, edges and per-layer canonical orders."""

    def __init__(self, h: int):
        self.h = h
        self.layer: list[int] = []
        self.edges: list[tuple[int, int]] = []
        self.order: list[list[int]] = [[] for _ in range(h)]

    def add(self, layer: int, place: bool = True) -> int:
        self.layer.append(layer)
        v = len(self.layer)
        if place:
            self.order[layer - 1].append(v)
        return v

    def place(self, v: int) -> None:
        self.order[self.layer[v - 1] - 1].append(v)

    def join(self, u: int, v: int) -> None:
        self.edges.append((min(u, v), max(u, v)))

    def pendants(self, z: int, layer: int, count: int) -> list[int]:
        out = []
        for _ in range(count):
            q = self.add(layer)
            self.join(z, q)
            out.append(q)
        return out

    def graph(self) -> LayeredGraph:
        return LayeredGraph.build(self.h, self.layer, [(u, v, 1) for u, v in self.edges])

    def drawing(self) -> Drawing:
        return Drawing.of(self.order)


# ----------------------------------------------------------- basic pieces

_PATH_LAYERS = [3, 2, 1, 2, 3, 2, 1, 2, 3, 2, 1, 2, 3]


def _path_gadget(b: _Builder, bit: str, u: int | None = None, w1: int | None = None) -> dict:
    """Z (bit 0) or U (bit 1): the path w0..w12; U adds ``w`` on w5, w7.

    ``u`` and ``w1`` reuse existing vertices for w0 and w1. Vertices are
    appended to the canonical orders in path order.
    """
    w = []
    for i, lay in enumerate(_PATH_LAYERS):
        if i == 0 and u is not None:
            w.append(u)
        elif i == 1 and w1 is not None:
            w.append(w1)
        else:
            w.append(b.add(lay, place=False))
    for x, y in zip(w, w[1:]):
        b.join(x, y)
    extra = None
    if bit == "1":
        extra = b.add(3, place=False)
        b.join(extra, w[5])
        b.join(extra, w[7])
    for i, v in enumerate(w):
        if (i == 0 and u is not None) or (i == 1 and w1 is not None):
            continue
        b.place(v)
        if i == 4 and extra is not None:
            b.place(extra)
    return {"w": w, "extra": extra}


def _hat_gadget(b: _Builder, bit: str, p: int) -> dict:
    """Zhat (bit 0) or Uhat (bit 1): the path w0..w4 with pendant sets."""
    w = [b.add(lay, place=False) for lay in (3, 2, 3, 2, 3)]
    for x, y in zip(w, w[1:]):
        b.join(x, y)
    heavy3 = (0, 2, 4) if bit == "0" else (0, 4)
    pend: dict[int, list[int]] = {}
    for i in (1, 3):
        pend[i] = [b.add(1, place=False) for _ in range(p)]
    for i in heavy3:
        pend[i] = [b.add(2, place=False) for _ in range(p)]
    for i, group in pend.items():
        for q in group:
            b.join(w[i], q)
    # canonical order: each pendant group sits next to its owner
    for i in range(5):
        b.place(w[i])
        for q in pend.get(i, ()):
            b.place(q)
    return {"w": w, "pend": pend}


def _fill(b: _Builder, p: int, c: int | None = None) -> dict:
    """F: ``a`` in V1, ``b`` in V3, and ``p`` common middle neighbours X."""
    a = b.add(1)
    bb = b.add(3)
    xs = [c] if c is not None else []
    while len(xs) < p:
        xs.append(b.add(2))
    for x in xs:
        b.join(a, x)
        b.join(bb, x)
    return {"a": a, "b": bb, "X": xs}


def build_gadget(kind: str, params: GadgetParams) -> Gadget:
    """One basic gadget on three layers with its crossing-free drawing."""
    b = _Builder(3)
    p = params.p
    if kind in ("Z", "U"):
        info = _path_gadget(b, "0" if kind == "Z" else "1")
        ports = {"u": info["w"][0], "v": info["w"][12]}
        if info["extra"] is not None:
            ports["w"] = info["extra"]
    elif kind in ("Zhat", "Uhat"):
        info = _hat_gadget(b, "0" if kind == "Zhat" else "1", p)
        ports = {"x": info["w"][0], "y": info["w"][4]}
    elif kind == "F":
        xs = [b.add(1), b.add(3)]
        a, bb = xs
        members = [b.add(2, place=False) for _ in range(p)]
        for x in members:
            b.join(a, x)
            b.join(bb, x)
            b.place(x)
        ports = {"a": a, "b": bb, "c": members[0]}
        if p > 1:
            ports["d"] = members[1]
    elif kind == "C":
        x = b.add(3)
        z = b.add(2)
        y = b.add(3)
        b.join(x, z)
        b.join(z, y)
        b.pendants(z, 1, p)
        ports = {"x": x, "y": y, "z": z}
    else:
        raise InvariantError(f"unknown gadget kind {kind!r}")
    return Gadget(b.graph(), b.drawing(), ports)


# ------------------------------------------------------- symbol gadgets


def _code(i: int, params: GadgetParams) -> str:
    if not 1 <= i <= params.k:
        raise InvariantError(f"symbol index {i} outside 1..{params.k}")
    return params.encodings[i - 1]


def _emit_S(b: _Builder, code: str, p: int, c: int | None = None) -> dict:
    """Append a copy of S for ``code``; ``c`` reuses a vertex as F's c."""
    if p < 2:
        raise InvariantError("S needs p >= 2 so that F has distinct c and d")
    first = _fill(b, p, c)
    # d = X[1] in construction order; put it last in X so it faces the path
    xs = first["X"]
    row = b.order[1]
    row.remove(xs[1])
    row.append(xs[1])
    parts = []
    u, w1 = first["b"], xs[1]
    for bit in code:
        info = _path_gadget(b, bit, u, w1)
        parts.append(info)
        u, w1 = info["w"][12], None
    last = parts[-1]["w"]
    a2 = b.add(1, place=False)
    xs2 = [last[11]]
    while len(xs2) < p:
        xs2.append(b.add(2, place=False))
    for x in xs2:
        b.join(a2, x)
        b.join(last[12], x)
    # X' after c', with d' = xs2[1] rightmost; a' closes layer 1
    rest = xs2[2:]
    for x in rest + xs2[1:2]:
        b.place(x)
    b.place(a2)
    ports = {
        "a": first["a"], "b": first["b"], "c": xs[0], "d": xs[1],
        "a'": a2, "b'": last[12], "c'": last[11], "d'": xs2[1],
    }
    return {"ports": ports, "parts": parts}


def _emit_Shat(b: _Builder, code: str, p: int) -> dict:
    hats, connectors = [], []
    prev = None
    for bit in code:
        if prev is not None:
            z = b.add(2)
            pend = [b.add(1) for _ in range(p)]
            for q in pend:
                b.join(z, q)
            connectors.append({"z": z, "pend": pend})
        info = _hat_gadget(b, bit, p)
        if prev is not None:
            b.join(prev["w"][4], connectors[-1]["z"])
            b.join(connectors[-1]["z"], info["w"][0])
        hats.append(info)
        prev = info
    return {"hats": hats, "connectors": connectors}


def _members(hats, connectors) -> set[int]:
    out: set[int] = set()
    for info in hats:
        out.update(info["w"])
        for group in info["pend"].values():
            out.update(group)
    for con in connectors:
        out.add(con["z"])
        out.update(con["pend"])
    return out


def build_S(i: int, params: GadgetParams) -> Gadget:
    b = _Builder(3)
    info = _emit_S(b, _code(i, params), params.p)
    return Gadget(b.graph(), b.drawing(), info["ports"])


def build_Shat(i: int, params: GadgetParams) -> Gadget:
    b = _Builder(3)
    info = _emit_Shat(b, _code(i, params), params.p)
    ports = {"x": info["hats"][0]["w"][0], "y": info["hats"][-1]["w"][4]}
    return Gadget(b.graph(), b.drawing(), ports)


def _interleave(order: list[list[int]], parts: list[dict], hat: dict) -> None:
    """Thread a hatted copy into the canonical order of an S copy.

    Hatted path vertices go into the gaps of the matching path gadget and
    every pendant group lands in the slot that keeps its edges uncrossed.
    """
    after: dict[int, list[int]] = {}

    def put(anchor: int, vs) -> None:
        after.setdefault(anchor, []).extend(vs)

    for j, (part, info) in enumerate(zip(parts, hat["hats"])):
        sw, hw, pend = part["w"], info["w"], info["pend"]
        put(sw[0], [hw[0]])
        put(sw[4], [hw[2]])
        put(sw[8], [hw[4]])
        put(sw[3], [hw[1]])
        put(sw[7], [hw[3]])
        put(sw[2], pend[1])
        put(sw[6], pend[3])
        put(sw[1], pend[0])
        put(sw[9], pend[4])
        if 2 in pend:
            put(sw[5], pend[2])
        if j > 0:
            con = hat["connectors"][j - 1]
            prev = parts[j - 1]["w"]
            put(prev[11], [con["z"]])
            put(prev[10], con["pend"])
    moved = {v for vs in after.values() for v in vs}
    for row in order:
        out = []
        for v in row:
            if v in moved:
                continue
            out.append(v)
            out.extend(after.get(v, ()))
        row[:] = out


def restrictive_drawing(i: int, params: GadgetParams) -> tuple[LayeredGraph, Drawing, int]:
    """``S_i`` plus ``Shat_i`` drawn restrictively; the count is ``14 ell - 2``."""
    from .core import count_crossings

    b = _Builder(3)
    code = _code(i, params)
    s_info = _emit_S(b, code, params.p)
    h_info = _emit_Shat(b, code, params.p)
    _interleave(b.order, s_info["parts"], h_info)
    graph, drawing = b.graph(), b.drawing()
    return graph, drawing, count_crossings(graph, drawing).total


# -------------------------------------------------- Disjoint Factors side


@dataclass(frozen=True)
class DFInstance:
    s: str
    k: int
    alphabet: str = ""

    def symbols(self) -> str:
        return self.alphabet or _string.ascii_lowercase[: self.k]

    def __post_init__(self):
        syms = self.symbols()
        if len(syms) != self.k or len(set(syms)) != self.k:
            raise InvariantError("alphabet must have exactly k distinct symbols")
        bad = set(self.s) - set(syms)
        if bad:
            raise InvariantError(f"symbols {sorted(bad)} are outside the alphabet")

    def index(self, symbol: str) -> int:
        return self.symbols().index(symbol) + 1


Witness = list[tuple[int, int]]


def check_witness(inst: DFInstance, witness) -> Witness:
    """Validate 1-based inclusive factor intervals; returns them sorted."""
    spans = sorted((int(a), int(b)) for a, b in witness)
    if len(spans) != inst.k:
        raise InvariantError(f"need {inst.k} factors, got {len(spans)}")
    firsts = set()
    for a, b in spans:
        if not 1 <= a < b <= len(inst.s):
            raise InvariantError(f"factor ({a}, {b}) is not a nontrivial substring")
        if inst.s[a - 1] != inst.s[b - 1]:
            raise InvariantError(f"factor ({a}, {b}) has different end symbols")
        firsts.add(inst.s[a - 1])
    if len(firsts) != inst.k:
        raise InvariantError("factor first symbols are not distinct")
    for (_, b1), (a2, _) in zip(spans, spans[1:]):
        if a2 <= b1:
            raise InvariantError("factors overlap")
    return spans


def df_solve(inst: DFInstance, limit: int = DF_LENGTH_LIMIT) -> Witness | None:
    """Exact Disjoint Factors by a prefix DP over used-symbol masks.

    ``reach[i]`` maps each mask achievable within the first ``i`` letters to
    a back-pointer. Returns factor intervals (1-based, inclusive) or None.
    """
    n = len(inst.s)
    if n > limit or inst.k > DF_SYMBOL_LIMIT:
        raise InvariantError(f"df_solve handles |s| <= {limit} and k <= {DF_SYMBOL_LIMIT}")
    full = (1 << inst.k) - 1
    bit = [1 << (inst.index(c) - 1) for c in inst.s]
    reach: list[dict[int, tuple]] = [{0: ()}]
    for i in range(1, n + 1):
        cur = {m: ("skip",) for m in reach[i - 1]}
        end = i - 1
        for start in range(end):
            if bit[start] != bit[end]:
                continue
            for m in reach[start]:
                if not m & bit[end]:
                    cur.setdefault(m | bit[end], ("take", start))
        reach.append(cur)
        if full in cur:
            break
    i = len(reach) - 1
    if full not in reach[i]:
        return None
    out, m = [], full
    while m:
        step = reach[i][m]
        if step[0] == "skip":
            i -= 1
            continue
        start = step[1]
        out.append((start + 1, i))
        m &= ~bit[i - 1]
        i = start
    return sorted(out)


# ------------------------------------------------ four and five layers


def _emit_R(b: _Builder, inst: DFInstance, params: GadgetParams) -> list[dict]:
    segments = []
    prev_d = None
    for ch in inst.s:
        code = params.encodings[inst.index(ch) - 1]
        # the shared vertex is already last in layer 2, right where c belongs
        info = _emit_S(b, code, params.p, c=prev_d)
        segments.append(info)
        prev_d = info["ports"]["d'"]
    return segments


def build_R(inst: DFInstance, params: GadgetParams) -> Gadget:
    b = _Builder(4)
    segments = _emit_R(b, inst, params)
    ports = {"b1": segments[0]["ports"]["b"], "bn'": segments[-1]["ports"]["b'"],
             "a1": segments[0]["ports"]["a"], "an'": segments[-1]["ports"]["a'"]}
    return Gadget(b.graph(), b.drawing(), ports)


def _emit_Rhat(b: _Builder, params: GadgetParams) -> tuple[list[list[dict]], list[int]]:
    copies, apex = [], []
    for t in range(1, params.k + 1):
        code = params.encodings[t - 1]
        pair = [_emit_Shat(b, code, params.p) for _ in range(2)]
        v = b.add(4)
        for info in pair:
            for hat in info["hats"]:
                for x in (hat["w"][0], hat["w"][2], hat["w"][4]):
                    b.join(v, x)
        copies.append(pair)
        apex.append(v)
    return copies, apex


def build_Rhat(params: GadgetParams) -> Gadget:
    b = _Builder(4)
    _, apex = _emit_Rhat(b, params)
    return Gadget(b.graph(), b.drawing(), {f"v{t}": v for t, v in enumerate(apex, start=1)})


def _yes_layout(b: _Builder, inst: DFInstance, params: GadgetParams, witness) -> dict:
    """Build R and Rhat into ``b`` and arrange the restrictive yes drawing."""
    spans = check_witness(inst, witness)
    segments = _emit_R(b, inst, params)
    copies, apex = _emit_Rhat(b, params)
    hat_vertices = set()
    for pair in copies:
        for info in pair:
            hat_vertices |= _members(info["hats"], info["connectors"])
    for row in b.order[:3]:
        row[:] = [v for v in row if v not in hat_vertices]
    by_start = sorted(spans)
    v_order = []
    for a, c in by_start:
        t = inst.index(inst.s[a - 1])
        _interleave(b.order, segments[a - 1]["parts"], copies[t - 1][0])
        _interleave(b.order, segments[c - 1]["parts"], copies[t - 1][1])
        v_order.append(apex[t - 1])
    b.order[3] = v_order
    return {"segments": segments, "apex": apex, "order": v_order}


def yes_drawing(inst: DFInstance, params: GadgetParams, witness) -> tuple[LayeredGraph, Drawing, int]:
    """R plus Rhat with the restrictive drawing of a yes-instance."""
    from .core import count_crossings

    b = _Builder(4)
    _yes_layout(b, inst, params, witness)
    graph, drawing = b.graph(), b.drawing()
    return graph, drawing, count_crossings(graph, drawing).total


def nokern4_budget(k: int, ell: int) -> int:
    return 2 * k * (14 * ell - 2) + k * (k - 1) // 2 + k * (k - 1) * (12 * ell + 1)


def eth5_budget(k: int, ell: int) -> int:
    return 2 * k * (14 * ell - 2)


def build_nokern4(inst: DFInstance, params: GadgetParams, witness=None) -> tuple[Instance, Drawing | None]:
    """The 4-layer instance and, given a witness, a drawing within budget."""
    b = _Builder(4)
    if witness is not None:
        layout = _yes_layout(b, inst, params, witness)
        segments, apex = layout["segments"], layout["apex"]
    else:
        segments = _emit_R(b, inst, params)
        _, apex = _emit_Rhat(b, params)
    b1, bn = segments[0]["ports"]["b"], segments[-1]["ports"]["b'"]
    left = [b.add(4, place=False) for _ in range(params.p)]
    right = [b.add(4, place=False) for _ in range(params.p)]
    for y in left:
        b.join(y, b1)
    for y in right:
        b.join(y, bn)
    for v in apex:
        b.join(v, b1)
        b.join(v, bn)
    k_prime = nokern4_budget(params.k, params.ell)
    drawing = None
    if witness is not None:
        b.order[3] = left + layout["order"] + right
        drawing = b.drawing()
    else:
        b.order[3] = left + apex + right
    return Instance(b.graph(), k_prime), drawing


def build_eth5(inst: DFInstance, params: GadgetParams, witness=None) -> tuple[Instance, Drawing | None]:
    """The 5-layer instance with budget ``2k(14 ell - 2)``."""
    b = _Builder(5)
    if witness is not None:
        layout = _yes_layout(b, inst, params, witness)
        segments, apex = layout["segments"], layout["apex"]
    else:
        segments = _emit_R(b, inst, params)
        _, apex = _emit_Rhat(b, params)
    b1, bn = segments[0]["ports"]["b"], segments[-1]["ports"]["b'"]
    x = b.add(5)
    x2 = b.add(5)
    left = [b.add(4, place=False) for _ in range(params.p)]
    right = [b.add(4, place=False) for _ in range(params.p)]
    for y in left:
        b.join(y, x)
        b.join(y, b1)
    for y in right:
        b.join(y, x2)
        b.join(y, bn)
    z = b.add(5, place=False)
    y, y2 = left[0], right[0]
    b.join(z, y)
    b.join(z, y2)
    for v in apex:
        b.join(z, v)
    b.order[4] = [x, z, x2]
    middle = layout["order"] if witness is not None else apex
    b.order[3] = left[1:] + [y] + middle + [y2] + right[1:]
    drawing = b.drawing() if witness is not None else None
    return Instance(b.graph(), eth5_budget(params.k, params.ell)), drawing


# ---------------------------------------------------------- audits


def gap_paths(graph: LayeredGraph) -> tuple[int, int]:
    """Counts of layer-3 gap paths and no-gap paths.

    A gap path is an induced path ``w1..w5`` with both ends in layer 3, the
    centre in layer 1, and ``w2`` or ``w4`` of degree two. A no-gap path is
    an induced path alternating layers 3, 2, 3, 2, 3.
    """
    adj = graph.adjacency()
    lay = graph.layer
    gap = nogap = 0
    for w3 in graph.vertices():
        mids = sorted(adj[w3])
        for w2, w4 in combinations(mids, 2):
            for w1 in adj[w2]:
                for w5 in adj[w4]:
                    path = (w1, w2, w3, w4, w5)
                    if len(set(path)) != 5 or not _induced(adj, path):
                        continue
                    pattern = tuple(lay(v) for v in path)
                    if pattern == (3, 2, 1, 2, 3) and (len(adj[w2]) == 2 or len(adj[w4]) == 2):
                        gap += 1
                    elif pattern == (3, 2, 3, 2, 3):
                        nogap += 1
    return gap, nogap


def _induced(adj, path) -> bool:
    for i, j in combinations(range(5), 2):
        if j - i > 1 and path[j] in adj[path[i]]:
            return False
    return True


def hat_profile(graph: LayeredGraph, p: int) -> tuple[int, int]:
    """Layer-3 vertices with ``p`` pendants, and layer-3 vertices of degree 2."""
    adj = graph.adjacency()
    big = small = 0
    for v in graph.vertices():
        if graph.layer(v) != 3:
            continue
        pend = sum(1 for u in adj[v] if len(adj[u]) == 1)
        if pend >= p:
            big += 1
        elif len(adj[v]) == 2:
            small += 1
    return big, small


def balanced_count(half: int) -> int:
    return comb(2 * half, half)
