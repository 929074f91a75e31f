"""Divide and conquer over separator guesses, and the 2-layer driver."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from typing import Iterator

from ..brute import DEFAULT_NODE_LIMIT
from ..core import Drawing, Instance, InvariantError
from ..graphs import WorkGraph
from ..kernel2 import Decided, kernelize2
from ..planarity import crossing_free
from .base import base_case, base_min
from .extended import NORMAL, Entry, ExtendedInstance, from_graph, lambda_cap
from .guesses import SeparatorGuess, enumerate_guesses, split_entries

SMALL_LAYER = 6


def _default_c() -> float:
    raw = os.environ.get("LAYERCROSS_BASE_C")
    if raw is None:
        return 4.0
    try:
        return float(raw)
    except ValueError:
        raise InvariantError(f"LAYERCROSS_BASE_C must be a number, got {raw!r}") from None


@dataclass
class Config:
    """Knobs of the recursion. ``c`` sets the base-case threshold
    ``k <= c * sqrt(k*)``; ``small_layer`` sends instances with a short layer
    to the base case; ``caps`` applies the size caps on guesses."""

    c: float = field(default_factory=_default_c)
    small_layer: int = SMALL_LAYER
    caps: bool = True
    node_limit: int = DEFAULT_NODE_LIMIT
    stats: dict = field(default_factory=lambda: {"base": 0, "recursive": 0, "guesses": 0, "splits": 0})


def depth_cap(k_star: int) -> int:
    return math.ceil(math.log2(max(k_star, 1))) + 2


def _use_base(ei: ExtendedInstance, cfg: Config) -> bool:
    return (ei.mode != NORMAL
            or ei.k <= cfg.c * math.sqrt(ei.k_star)
            or min(len(ei.side(1)), len(ei.side(2))) <= cfg.small_layer
            or ei.depth >= depth_cap(ei.k_star))


# ------------------------------------------------------- sub-instances


def _signs(x: int, fx: int, y: int, fy: int, first: int, last: int) -> set[int]:
    """Possible order signs of end x against end y on a layer whose first and
    last vertices are fixed."""
    if x == y:
        return {(fx > fy) - (fx < fy)}
    if x == last or y == first:
        return {1}
    if x == first or y == last:
        return {-1}
    return {-1, 1}


def _may_cross(rep: Entry, e: Entry, ends) -> bool:
    s1 = _signs(e.a, e.fa, rep.a, rep.fa, ends[0][0], ends[1][0])
    s2 = _signs(e.b, e.fb, rep.b, rep.fb, ends[0][1], ends[1][1])
    return any(p * q < 0 for p in s1 for q in s2)


def _project(ei: ExtendedInstance, guess: SeparatorGuess, keep: set[int], k_entries, bound, flag: int,
             next_id: int, ends) -> tuple[list[Entry], set[frozenset]]:
    """Stand-ins for K entries with one end in ``keep``: the far end moves to
    the separator endpoint on the other layer, just outside it. ``ends`` are
    the boundary pairs of the side instance."""
    groups: dict[tuple, list[Entry]] = {}
    own = [e for e in ei.entries if e.a in keep and e.b in keep]
    for f in k_entries:
        if f.a in keep:
            a, fa, b, fb = f.a, f.fa, bound[1], flag
        elif f.b in keep:
            a, fa, b, fb = bound[0], flag, f.b, f.fb
        else:
            continue
        partners = frozenset(e.eid for e in own if ei.shielded(e, f))
        groups.setdefault((a, b, fa, fb, partners), []).append(f)
    out, shield = [], set()
    for (a, b, fa, fb, partners), members in sorted(groups.items(), key=lambda kv: kv[0][:4] + (sorted(kv[0][4]),)):
        rep = Entry(next_id, a, b, sum(f.mult for f in members), True, fa, fb)
        # a stand-in nothing can cross only inflates the load at the separator
        if not any(_may_cross(rep, e, ends) for e in own if e.eid not in guess.k_set):
            continue
        next_id += 1
        out.append(rep)
        shield.update(frozenset((rep.eid, p)) for p in partners)
    for x in out:
        for y in out:
            if x.eid < y.eid:
                shield.add(frozenset((x.eid, y.eid)))
    return out, shield


def _side_instance(ei: ExtendedInstance, guess: SeparatorGuess, which: str, next_id: int) -> ExtendedInstance:
    if which == "left":
        keep = {v for v, s in guess.side.items() if s in ("L", "LR")}
        lb, rb, flag = ei.leftbound, guess.lsep, 1
        bound = guess.lsep
    else:
        keep = {v for v, s in guess.side.items() if s in ("R", "LR")}
        lb, rb, flag = guess.rsep, ei.rightbound, -1
        bound = guess.rsep
    k_entries = [e for e in ei.entries if e.eid in guess.k_set]
    own = tuple(e for e in ei.entries if e.a in keep and e.b in keep and e.eid not in guess.k_set)
    reps, rep_shield = _project(ei, guess, keep, k_entries, bound, flag, next_id, (lb, rb))
    own_ids = {e.eid for e in own}
    shield = {pair for pair in ei.shield if pair <= own_ids} | rep_shield
    chains = []
    for i in (0, 1):
        layer_chains = []
        for chain in ei.chains[i]:
            sub = tuple(v for v in chain if v in keep)
            if len(sub) > 1:
                layer_chains.append(sub)
        z = tuple(v for v in guess.zeta[i] if v in keep)
        if len(z) > 1:
            layer_chains.append(z)
        chains.append(tuple(layer_chains))
    sub = ExtendedInstance({v: ei.layer[v] for v in keep}, own + tuple(reps), lb, rb, 0, ei.k_star,
                           tuple(chains), frozenset(shield), NORMAL, depth=ei.depth + 1)
    if sub.lam() > lambda_cap(ei.k_star):
        raise InvariantError("chain count exceeds the allowed bound")
    return sub


def build_subinstances(ei: ExtendedInstance, guess: SeparatorGuess, check: bool = False
                       ) -> tuple[ExtendedInstance, ExtendedInstance] | None:
    """Left and right instances of a guess, or None when a side is not
    connected or piles more weight on a boundary endpoint than the load cap
    allows. With ``check`` the full invariant audit runs on both."""
    first = max((e.eid for e in ei.entries), default=-1) + 1
    left = _side_instance(ei, guess, "left", first)
    right = _side_instance(ei, guess, "right", first + len(ei.entries))
    cap = 2 * math.sqrt(ei.k_star) + 1e-9
    for sub in (left, right):
        if not sub._connected(set()):
            return None
        if any(load > cap for load in sub.weighted_load().values()):
            return None
        if check:
            problems = sub.violations()
            if problems:
                raise InvariantError("; ".join(problems))
    return left, right


def combine_drawings(ei: ExtendedInstance, guess: SeparatorGuess, left: Drawing, right: Drawing,
                     left_cost: int | None = None, right_cost: int | None = None) -> Drawing:
    """Glue the two sides around the middle block and check the count."""
    orders = []
    for i in (0, 1):
        lo, hi = list(left.orders[i]), list(right.orders[i])
        p, q = guess.lsep[i], guess.rsep[i]
        if not lo or lo[-1] != p or not hi or hi[0] != q:
            raise InvariantError("sub-drawing does not end at its separator")
        middle = [v for v in guess.zeta[i] if guess.side[v] == "M"]
        orders.append(lo + middle + (hi[1:] if p == q else hi))
    drawing = Drawing.of(orders)
    ei.check_drawing(drawing)
    if left_cost is not None and right_cost is not None:
        total = ei.count(drawing)
        if total != guess.k_current + left_cost + right_cost:
            raise InvariantError(
                f"combined count {total} differs from {guess.k_current} + {left_cost} + {right_cost}")
    return drawing


# ------------------------------------------------------------- solving


class _Memo:
    def __init__(self):
        self.table: dict[tuple, tuple[int, tuple[int, Drawing] | None]] = {}

    @staticmethod
    def key(ei: ExtendedInstance) -> tuple:
        """Instance identity up to entry ids."""
        entries = sorted(ei.entries, key=lambda e: (e.a, e.b, e.mult, e.weighted, e.fa, e.fb, e.eid))
        index = {e.eid: i for i, e in enumerate(entries)}
        shield = sorted(tuple(sorted(index[x] for x in p)) for p in ei.shield)
        return (tuple(sorted(ei.layer.items())), tuple((e.a, e.b, e.mult, e.weighted, e.fa, e.fb) for e in entries),
                tuple(shield), ei.leftbound, ei.rightbound, ei.chains, ei.mode, ei.ext_left, ei.ext_right)


def solve_extended(ei: ExtendedInstance, cfg: Config | None = None, _memo: _Memo | None = None) -> Drawing | None:
    """A drawing of ``ei`` with at most ``ei.k`` crossings, or None."""
    cfg = cfg or Config()
    memo = _memo or _Memo()
    if _use_base(ei, cfg):
        cfg.stats["base"] += 1
        return base_case(ei, cfg.node_limit)
    cfg.stats["recursive"] += 1
    for guess in enumerate_guesses(ei, cfg.caps):
        cfg.stats["guesses"] += 1
        rest = ei.k - guess.k_current
        parts = build_subinstances(ei, guess)
        if parts is None:
            continue
        left, right = parts
        lres = solve_min(left, rest, cfg, memo)
        if lres is None:
            continue
        rres = solve_min(right, rest - lres[0], cfg, memo)
        if rres is None:
            continue
        cfg.stats["splits"] += 1
        guess = replace(guess, k_left=lres[0], k_right=ei.k - guess.k_current - lres[0])
        return combine_drawings(ei, guess, lres[1], rres[1], lres[0], rres[0])
    return None


def solve_min(ei: ExtendedInstance, cap: int, cfg: Config | None = None, _memo: _Memo | None = None
              ) -> tuple[int, Drawing] | None:
    """Least cost of ``ei`` when it is at most ``cap``, with a witness.

    Budgets are tried upwards; below the base-case threshold one exact
    search covers all of them at once.
    """
    cfg = cfg or Config()
    memo = _memo or _Memo()
    if cap < 0:
        return None
    key = memo.key(ei)
    hit = memo.table.get(key)
    if hit is not None:
        checked, found = hit
        if found is not None and found[0] <= cap:
            return found
        if found is None and checked >= cap:
            return None
    low = ei.with_k(cap)
    if _use_base(low, cfg):
        cfg.stats["base"] += 1
        found = base_min(low, cap, cfg.node_limit)
    else:
        found = None
        start = 0
        while start <= cap and _use_base(ei.with_k(start), cfg):
            start += 1
        if start > 0:
            cfg.stats["base"] += 1
            found = base_min(ei.with_k(start - 1), start - 1, cfg.node_limit)
        b = start
        while found is None and b <= cap:
            drawing = solve_extended(ei.with_k(b), cfg, memo)
            if drawing is not None:
                found = (ei.count(drawing), drawing)
            b += 1
    memo.table[key] = (cap, found)
    return found


# ---------------------------------------------------------------- driver


def lift_to_extended(instance: Instance) -> Iterator[ExtendedInstance]:
    """Normal extended instances for every budget ``0..k`` and every ordered
    choice of first and last layer-1 vertex, with fresh layer-2 boundary
    vertices ``n + 1`` and ``n + 2``."""
    graph = instance.graph
    if graph.h != 2:
        raise InvariantError("lifting needs a 2-layer instance")
    layer = {v: graph.layer(v) for v in graph.vertices()}
    top = graph.layer_vertices(1)
    if len(top) == 1:
        ends = [(top[0], top[0])]
    else:
        ends = [(a, b) for a in top for b in top if a != b]
    for budget in range(instance.k + 1):
        for a, b in ends:
            yield from_graph(layer, graph.edges, a, b, budget, instance.k_star)


def _strip(drawing: Drawing, extra: set[int]) -> list[list[int]]:
    return [[v for v in order if v not in extra] for order in drawing.orders]


def component_min(instance: Instance, cfg: Config | None = None) -> tuple[int, list[list[int]]] | None:
    """Least crossings of a connected 2-layer graph, if at most ``k``."""
    cfg = cfg or Config()
    graph = instance.graph
    memo = _Memo()
    extra = {graph.n + 1, graph.n + 2}
    lifts: dict[int, list[ExtendedInstance]] = {}
    for ei in lift_to_extended(instance):
        lifts.setdefault(ei.k, []).append(ei)
    if not lifts:
        return None
    probe = lifts[instance.k][0]
    if _use_base(probe, cfg):
        best = None
        cap = instance.k
        for ei in lifts[instance.k]:
            found = base_min(ei, cap, cfg.node_limit)
            cfg.stats["base"] += 1
            if found is not None and (best is None or found[0] < best[0]):
                best = found
                cap = found[0] - 1
        return None if best is None else (best[0], _strip(best[1], extra))
    for budget in range(instance.k + 1):
        for ei in lifts[budget]:
            drawing = solve_extended(ei, cfg, memo)
            if drawing is not None:
                return ei.count(drawing), _strip(drawing, extra)
    return None


def solve2(instance: Instance, cfg: Config | None = None) -> Drawing | None:
    """A drawing with at most ``k`` crossings, or None."""
    found = solve2_min(instance, cfg)
    return None if found is None else found[1]


def solve2_min(instance: Instance, cfg: Config | None = None) -> tuple[int, Drawing] | None:
    """Least crossing count with a witness, when it is at most ``k``."""
    cfg = cfg or Config()
    graph = instance.graph
    if graph.h != 2:
        raise InvariantError("solve2 needs a 2-layer instance")
    work = WorkGraph.from_layered(graph)
    left = instance.k
    orders: list[list[int]] = [[], []]
    total = 0
    for comp in work.components():
        sub = work.induced(comp)
        if sub.edge_count() == 0:
            for v in comp:
                orders[sub.layer[v] - 1].append(v)
            continue
        layered, old = sub.to_layered()
        inst = Instance(layered, left, instance.k_star)
        verdict = kernelize2(inst)
        if verdict is Decided.NO:
            return None
        if verdict is Decided.YES:
            cost, local = 0, [list(o) for o in crossing_free(layered).orders]
        else:
            found = component_min(inst, cfg)
            if found is None:
                return None
            cost, local = found
        for i in (0, 1):
            orders[i].extend(old[v - 1] for v in local[i])
        total += cost
        left -= cost
    drawing = Drawing.of(orders)
    return total, drawing
