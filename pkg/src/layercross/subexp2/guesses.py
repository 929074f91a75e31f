"""Separator guesses for extended instances.

A guess fixes two non-crossing edges ``lsep`` (endpoints p1, p2) and
``rsep`` (endpoints q1, q2) and assigns every vertex a side:

``L``   strictly left of p_i, or p_i itself,
``M``   strictly between p_i and q_i,
``R``   strictly right of q_i, or q_i itself,
``LR``  the vertex p_i = q_i when both separators share it.

An entry whose ends both carry ``L`` belongs to the left part; both ``R``,
to the right part. Every other entry is a *K entry*: a crossing edge when it
leaves the closed strip between the separators, a middle edge otherwise.
The guess also orders every endpoint of a K entry (``zeta``), which fixes
all crossings among K entries.

Enumeration follows the usual chain of guesses: separators, middle sets,
labels of vertices next to the middle, extra crossing edges, sides of the
remaining components (pendants of a shared separator vertex by blueprint),
then the endpoint order. Each stage drops inconsistent branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping, Sequence

from .extended import Entry, ExtendedInstance, entry_cross

L, M, R, LR = "L", "M", "R", "LR"
_RANK_SIDE = {L: 0, M: 2, R: 4}


@dataclass(frozen=True)
class PendantBlueprint:
    """Total pendant multiplicity and its split between the two sides."""

    left: int
    right: int

    @property
    def total(self) -> int:
        return self.left + self.right


@dataclass(frozen=True)
class PendantGuess:
    left: tuple[int, ...]
    right: tuple[int, ...]


def pendant_knapsack(pendants: Mapping[int, int] | Sequence[tuple[int, int]],
                     blueprint: PendantBlueprint) -> PendantGuess | None:
    """Split pendants so the left multiplicities sum to ``blueprint.left``.

    Subset-sum table over the total multiplicity; None when infeasible.
    """
    items = sorted(pendants.items() if isinstance(pendants, Mapping) else pendants)
    total = sum(m for _, m in items)
    if blueprint.left < 0 or blueprint.right < 0 or blueprint.total != total:
        return None
    target = blueprint.left
    # first[s]: index of the item that first reached sum s
    first: list[int | None] = [None] * (target + 1)
    reach = [False] * (target + 1)
    reach[0] = True
    for idx, (_, m) in enumerate(items):
        for s in range(target, m - 1, -1):
            if not reach[s] and reach[s - m]:
                reach[s] = True
                first[s] = idx
    if not reach[target]:
        return None
    left = []
    s = target
    while s:
        idx = first[s]
        left.append(items[idx][0])
        s -= items[idx][1]
    chosen = set(left)
    return PendantGuess(tuple(sorted(left)), tuple(pid for pid, _ in items if pid not in chosen))


@dataclass(frozen=True)
class Caps:
    mid: float
    crossing: float
    middle: float
    sep: float
    updown: float

    @classmethod
    def of(cls, ei: ExtendedInstance, enabled: bool = True) -> "Caps":
        if not enabled:
            inf = math.inf
            return cls(inf, inf, inf, inf, inf)
        root = math.sqrt(effective_budget(ei))
        return cls(4 * root + 2, 2 * root, 2 * root, root, 8 * root)


def effective_budget(ei: ExtendedInstance) -> int:
    """``k`` plus the weight of shielded pairs, which may cross for free."""
    by_id = {e.eid: e for e in ei.entries}
    free = 0
    for pair in ei.shield:
        a, b = tuple(pair)
        free += by_id[a].mult * by_id[b].mult
    return ei.k + free


@dataclass(frozen=True)
class SeparatorGuess:
    lsep: tuple[int, int]
    rsep: tuple[int, int]
    mid: tuple[frozenset, frozenset]
    side: Mapping[int, str]
    crossing: frozenset
    middle: frozenset
    cross_l: frozenset
    cross_r: frozenset
    zeta: tuple[tuple[int, ...], tuple[int, ...]]
    k_current: int
    blueprint: PendantBlueprint | None = None
    pendants: PendantGuess | None = None
    k_left: int | None = None
    k_right: int | None = None
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def k_set(self) -> frozenset:
        return self.crossing | self.middle

    def labels(self, v: int) -> frozenset:
        s = self.side[v]
        return frozenset((L, R)) if s == LR else frozenset(s)


# --------------------------------------------------------------- helpers


def _sep_entry(pair: tuple[int, int]) -> Entry:
    return Entry(-1, pair[0], pair[1])


def separator_candidates(ei: ExtendedInstance) -> list[tuple[int, int]]:
    pairs = {e.pair for e in ei.entries} | {ei.leftbound, ei.rightbound}
    return sorted(pairs)


def _linear_extensions(items: Sequence[int], pred: Mapping[int, set[int]]) -> Iterator[tuple[int, ...]]:
    items = sorted(items)
    rest = set(items)
    prefix: list[int] = []

    def rec():
        if not rest:
            yield tuple(prefix)
            return
        for v in sorted(rest):
            if pred.get(v, set()) & rest:
                continue
            rest.discard(v)
            prefix.append(v)
            yield from rec()
            prefix.pop()
            rest.add(v)

    yield from rec()


def _rank(ei: ExtendedInstance, side: Mapping[int, str], lsep, rsep, v: int) -> int:
    i = ei.layer[v] - 1
    if v == lsep[i] and v == rsep[i]:
        return 2
    if v == lsep[i]:
        return 1
    if v == rsep[i]:
        return 3
    return _RANK_SIDE[side[v]]


def _has_left(s: str) -> bool:
    return s in (L, LR)


def _has_right(s: str) -> bool:
    return s in (R, LR)


def split_entries(ei: ExtendedInstance, side: Mapping[int, str]):
    """Left entries, right entries and K entries under a side assignment."""
    left, right, k_set = [], [], []
    for e in ei.entries:
        sa, sb = side[e.a], side[e.b]
        if _has_left(sa) and _has_left(sb):
            left.append(e)
        elif _has_right(sa) and _has_right(sb):
            right.append(e)
        else:
            k_set.append(e)
    return left, right, k_set


def _across(ei: ExtendedInstance, lsep, rsep, e: Entry, f: Entry) -> bool:
    """Crossing of a left entry e with a right entry f; positions of their
    ends only tie at a shared separator vertex."""
    signs = []
    for i in (1, 2):
        x, y = e.end(i), f.end(i)
        shared = lsep[i - 1] if lsep[i - 1] == rsep[i - 1] else None
        if x == y == shared:
            signs.append((e.flag(i) > f.flag(i)) - (e.flag(i) < f.flag(i)))
        else:
            signs.append(-1)
    return signs[0] * signs[1] < 0


def current_cost(ei: ExtendedInstance, lsep, rsep, left, right, k_set, zeta) -> int:
    """Crossings fixed by the guess: among K entries, and between the parts."""
    pos = {v: j for order in zeta for j, v in enumerate(order)}
    total = 0
    for a, b in combinations(k_set, 2):
        if entry_cross(a, b, pos) and not ei.shielded(a, b):
            total += a.mult * b.mult
    shared = any(lsep[i] == rsep[i] for i in (0, 1))
    if shared:
        for e in left:
            for f in right:
                if not ei.shielded(e, f) and _across(ei, lsep, rsep, e, f):
                    total += e.mult * f.mult
    return total


# ----------------------------------------------------------- enumeration


def enumerate_guesses(ei: ExtendedInstance, caps: bool = True) -> Iterator[SeparatorGuess]:
    """Every consistent guess, in a fixed deterministic order."""
    cap = Caps.of(ei, caps)
    cands = separator_candidates(ei)
    for lsep in cands:
        if lsep == ei.rightbound:
            continue
        for rsep in cands:
            if rsep == lsep or rsep == ei.leftbound:
                continue
            if any(lsep[i] == ei.rightbound[i] != rsep[i] or rsep[i] == ei.leftbound[i] != lsep[i] for i in (0, 1)):
                continue
            if lsep[0] == rsep[0] and lsep[1] == rsep[1]:
                continue
            yield from _with_seps(ei, cap, lsep, rsep)


def _mid_choices(ei: ExtendedInstance, cap: Caps, lsep, rsep) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    fixed = {*lsep, *rsep} | ei.boundary_endpoints()
    pools = []
    for i in (1, 2):
        if lsep[i - 1] == rsep[i - 1]:
            pools.append([])
        else:
            pools.append([v for v in ei.side(i) if v not in fixed])
    for size in range(len(pools[0]) + len(pools[1]) + 1):
        for s1 in range(size + 1):
            s2 = size - s1
            if s1 > cap.mid or s2 > cap.mid or s1 > len(pools[0]) or s2 > len(pools[1]):
                continue
            for m1 in combinations(pools[0], s1):
                for m2 in combinations(pools[1], s2):
                    yield m1, m2


def _with_seps(ei: ExtendedInstance, cap: Caps, lsep, rsep) -> Iterator[SeparatorGuess]:
    sep_ends = {*lsep, *rsep}
    for m1, m2 in _mid_choices(ei, cap, lsep, rsep):
        mid = set(m1) | set(m2)
        label: dict[int, str] = {}
        for i in (0, 1):
            if lsep[i] == rsep[i]:
                label[lsep[i]] = LR
            else:
                label[lsep[i]] = L
                label[rsep[i]] = R
        for v in mid:
            label[v] = M
        ok = True
        for v in ei.leftbound:
            if v in label and not _has_left(label[v]):
                ok = False
            label.setdefault(v, L)
        for v in ei.rightbound:
            if v in label and not _has_right(label[v]):
                ok = False
            label.setdefault(v, R)
        if not ok:
            continue
        middle_w = sum(e.mult for e in ei.entries
                       if (e.a in mid or e.b in mid) and e.a in mid | sep_ends and e.b in mid | sep_ends)
        if middle_w > cap.middle:
            continue
        forced = sorted({(e.b if e.a in mid else e.a) for e in ei.entries
                         if (e.a in mid) != (e.b in mid) and (e.b if e.a in mid else e.a) not in label})
        for choice in product((L, R), repeat=len(forced)):
            lab = dict(label)
            lab.update(zip(forced, choice))
            yield from _extra_crossing(ei, cap, lsep, rsep, (frozenset(m1), frozenset(m2)), lab)


def _k_entry_kind(ei, lab, e: Entry) -> str | None:
    """'k', 'e' (left or right part) or None when undecided."""
    sa, sb = lab.get(e.a), lab.get(e.b)
    if sa == M or sb == M:
        return "k"
    if sa is None or sb is None:
        return None
    if (_has_left(sa) and _has_left(sb)) or (_has_right(sa) and _has_right(sb)):
        return "e"
    return "k"


def _extra_crossing(ei, cap, lsep, rsep, mid, lab) -> Iterator[SeparatorGuess]:
    sep_ends = {*lsep, *rsep}
    strip = mid[0] | mid[1] | sep_ends
    fixed_w = 0
    cands = []
    for e in ei.entries:
        kind = _k_entry_kind(ei, lab, e)
        if kind == "k" and not (e.a in strip and e.b in strip):
            fixed_w += e.mult
        elif kind is None:
            ends = [lab.get(e.a), lab.get(e.b)]
            if all(s is None or s in (L, R) for s in ends):
                cands.append(e)
    if fixed_w > cap.crossing:
        return
    budget = cap.crossing - fixed_w
    for size in range(len(cands) + 1):
        any_fit = False
        for chosen in combinations(cands, size):
            weight = sum(e.mult for e in chosen)
            if weight > budget:
                continue
            any_fit = True
            orientations = []
            for e in chosen:
                opts = []
                for sa, sb in ((L, R), (R, L)):
                    if lab.get(e.a, sa) == sa and lab.get(e.b, sb) == sb:
                        opts.append((sa, sb))
                orientations.append(opts)
            for combo in product(*orientations):
                lab2 = dict(lab)
                good = True
                for e, (sa, sb) in zip(chosen, combo):
                    for v, s in ((e.a, sa), (e.b, sb)):
                        if lab2.setdefault(v, s) != s:
                            good = False
                if good:
                    yield from _propagate(ei, cap, lsep, rsep, mid, lab2)
        if not any_fit and size > 0:
            break


def _propagate(ei, cap, lsep, rsep, mid, lab) -> Iterator[SeparatorGuess]:
    adj = ei.adjacency()
    unl = [v for v in sorted(ei.layer) if v not in lab]
    seen: set[int] = set()
    side = dict(lab)
    ambiguous: list[list[int]] = []
    for start in unl:
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v]:
                if u not in lab and u not in seen:
                    seen.add(u)
                    stack.append(u)
        options = {L, R}
        for v in comp:
            for u in adj[v]:
                if u in lab:
                    s = lab[u]
                    options &= {L, R} if s == LR else {s}
        if not options:
            return
        if len(options) == 1:
            (s,) = options
            for v in comp:
                side[v] = s
        else:
            ambiguous.append(sorted(comp))
    # an entry between two labeled vertices of opposite sides must be K; it
    # was either forced or guessed, so nothing to check here
    yield from _ambiguous(ei, cap, lsep, rsep, mid, side, ambiguous)


def _is_pendant(ei: ExtendedInstance, comp: list[int]) -> bool:
    if len(comp) != 1:
        return False
    (d,) = comp
    if any(d in chain for chains in ei.chains for chain in chains):
        return False
    shielded = {x for pair in ei.shield for x in pair}
    for e in ei.entries:
        if d in e.pair and (e.fa or e.fb or e.eid in shielded):
            return False
    return True


def _ambiguous(ei, cap, lsep, rsep, mid, side, ambiguous) -> Iterator[SeparatorGuess]:
    pend = {}
    updown = []
    for comp in ambiguous:
        if _is_pendant(ei, comp):
            d = comp[0]
            pend[d] = sum(e.mult for e in ei.entries if d in e.pair)
        else:
            updown.append(comp)
    if len(updown) > cap.updown:
        return
    total = sum(pend.values())
    blueprints = [PendantBlueprint(t, total - t) for t in range(total + 1)] if pend else [None]
    for bp in blueprints:
        split = pendant_knapsack(pend, bp) if bp is not None else None
        if bp is not None and split is None:
            continue
        for choice in product((L, R), repeat=len(updown)):
            full = dict(side)
            if split is not None:
                full.update((d, L) for d in split.left)
                full.update((d, R) for d in split.right)
            for comp, s in zip(updown, choice):
                full.update((v, s) for v in comp)
            yield from _finish(ei, cap, lsep, rsep, mid, full, bp, split)


def _finish(ei, cap, lsep, rsep, mid, side, bp, split) -> Iterator[SeparatorGuess]:
    pred = ei.predecessors()
    rank = {v: _rank(ei, side, lsep, rsep, v) for v in ei.layer}
    for b, before in pred.items():
        for a in before:
            if rank[a] > rank[b]:
                return
    left, right, k_set = split_entries(ei, side)
    sep_ends = {*lsep, *rsep}
    strip = mid[0] | mid[1] | sep_ends
    middle = [e for e in k_set if e.a in strip and e.b in strip]
    crossing = [e for e in k_set if not (e.a in strip and e.b in strip)]
    if sum(e.mult for e in middle) > cap.middle or sum(e.mult for e in crossing) > cap.crossing:
        return
    s_set = set(sep_ends) | mid[0] | mid[1]
    for e in k_set:
        s_set.update(e.pair)
    per_layer = []
    for i in (1, 2):
        parts = []
        members = [v for v in s_set if ei.layer[v] == i]
        for s in (L, M, R):
            parts.append([v for v in members if side[v] == s and v not in sep_ends])
        per_layer.append(parts)
    sl, sr = _sep_entry(lsep), _sep_entry(rsep)

    def layer_orders(i):
        lpart, mpart, rpart = per_layer[i - 1]
        p, q = lsep[i - 1], rsep[i - 1]
        for a in _linear_extensions(lpart, pred):
            for m in _linear_extensions(mpart, pred):
                for c in _linear_extensions(rpart, pred):
                    yield a + (p,) + m + ((q,) if q != p else ()) + c

    orders2 = list(layer_orders(2))
    for z1 in layer_orders(1):
        for z2 in orders2:
            pos = {v: j for order in (z1, z2) for j, v in enumerate(order)}
            cross_l = frozenset(e.eid for e in k_set if entry_cross(e, sl, pos))
            cross_r = frozenset(e.eid for e in k_set if entry_cross(e, sr, pos))
            by_id = {e.eid: e for e in k_set}
            if sum(by_id[x].mult for x in cross_l) > cap.sep or sum(by_id[x].mult for x in cross_r) > cap.sep:
                continue
            if any(e.eid not in cross_l and e.eid not in cross_r for e in crossing):
                continue
            k_now = current_cost(ei, lsep, rsep, left, right, k_set, (z1, z2))
            if k_now > ei.k:
                continue
            yield SeparatorGuess(lsep, rsep, mid, dict(side), frozenset(e.eid for e in crossing),
                                 frozenset(e.eid for e in middle), cross_l, cross_r, (z1, z2), k_now, bp, split)
