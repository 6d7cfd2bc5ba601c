"""Degree-zero barcodes of merge trees and the bottleneck distance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidMatching, TooLarge
from .tree import MergeTree, validate

__all__ = [
    "Interval",
    "Barcode",
    "PartialMatching",
    "elder_rule",
    "filtration_barcode_oracle",
    "matching_cost",
    "bottleneck",
    "bottleneck_bruteforce",
    "random_realization",
]

INF = math.inf


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open interval ``[birth, death)``; ``death`` may be ``inf``."""

    birth: float
    death: float = INF

    def __post_init__(self):
        if not math.isfinite(self.birth):
            raise ValueError(f"birth must be finite, got {self.birth!r}")
        if math.isnan(self.death) or not self.birth < self.death:
            raise ValueError(f"need birth < death, got [{self.birth!r}, {self.death!r})")

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class Barcode:
    """Multiset of intervals, stored sorted so equality is multiset equality."""

    intervals: tuple[Interval, ...]

    def __init__(self, intervals: Iterable[Interval | tuple[float, float]] = ()):
        items = [iv if isinstance(iv, Interval) else Interval(*iv) for iv in intervals]
        object.__setattr__(self, "intervals", tuple(sorted(items)))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __getitem__(self, i: int) -> Interval:
        return self.intervals[i]

    @property
    def births(self) -> list[float]:
        return [iv.birth for iv in self.intervals]

    @property
    def deaths(self) -> list[float]:
        return [iv.death for iv in self.intervals]


@dataclass(frozen=True)
class PartialMatching:
    """Pairs ``(i, j)`` matching interval ``i`` of one barcode to ``j`` of another."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(sorted((int(i), int(j)) for i, j in self.pairs)))


def elder_rule(t: MergeTree) -> Barcode:
    """Barcode of ``t`` by detaching, at every branch point, all but the eldest
    incoming branch.

    The eldest branch is the one whose subtree holds the lowest leaf; ties go to
    the smallest leaf index.
    """
    h = t.heights
    eldest = [0] * t.n_nodes
    intervals = []
    for v in reversed(t._topdown):
        kids = t.children[v]
        if not kids:
            eldest[v] = v
            continue
        keyed = sorted((h[eldest[c]], eldest[c]) for c in kids)
        eldest[v] = keyed[0][1]
        for birth, _ in keyed[1:]:
            intervals.append(Interval(birth, h[v]))
    intervals.append(Interval(h[eldest[t.root]], INF))
    return Barcode(intervals)


def filtration_barcode_oracle(t: MergeTree) -> Barcode:
    """Barcode of the sublevel filtration by a sweep with union-find.

    Nodes enter in order of height; each tree edge joins a node to its parent
    when the parent enters. At a join the component born later dies.
    """
    h = t.heights
    parent_uf = list(range(t.n_nodes))
    birth = list(h)

    def find(a: int) -> int:
        while parent_uf[a] != a:
            parent_uf[a] = parent_uf[parent_uf[a]]
            a = parent_uf[a]
        return a

    intervals = []
    for v in sorted(range(t.n_nodes), key=lambda x: (h[x], x)):
        for c in t.children[v]:
            rv, rc = find(v), find(c)
            if rv == rc:
                continue
            old, young = (rv, rc) if (birth[rv], rv) <= (birth[rc], rc) else (rc, rv)
            if birth[young] < h[v]:
                intervals.append(Interval(birth[young], h[v]))
            parent_uf[young] = old
    intervals.append(Interval(birth[find(t.root)], INF))
    return Barcode(intervals)


def _diff(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b)


def _pair_cost(a: Interval, b: Interval) -> float:
    return max(_diff(a.birth, b.birth), _diff(a.death, b.death))


def _half(a: Interval) -> float:
    return (a.death - a.birth) / 2


def matching_cost(b1: Barcode, b2: Barcode, m: PartialMatching) -> float:
    """Largest of: matched endpoint displacement, half-length of unmatched bars."""
    left = [i for i, _ in m.pairs]
    right = [j for _, j in m.pairs]
    if len(set(left)) != len(left) or len(set(right)) != len(right):
        raise InvalidMatching("matching is not injective")
    if any(not 0 <= i < len(b1) for i in left) or any(not 0 <= j < len(b2) for j in right):
        raise InvalidMatching("matching refers to a missing interval")
    cost = 0.0
    for i, j in m.pairs:
        cost = max(cost, _pair_cost(b1[i], b2[j]))
    for i in set(range(len(b1))) - set(left):
        cost = max(cost, _half(b1[i]))
    for j in set(range(len(b2))) - set(right):
        cost = max(cost, _half(b2[j]))
    return cost


def _max_matching(adj: Sequence[Sequence[int]], n_right: int) -> list[int]:
    """Maximum bipartite matching by augmenting paths; returns right -> left."""
    match_right = [-1] * n_right

    def augment(u: int, seen: list[bool]) -> bool:
        for w in adj[u]:
            if seen[w]:
                continue
            seen[w] = True
            if match_right[w] < 0 or augment(match_right[w], seen):
                match_right[w] = u
                return True
        return False

    for u in range(len(adj)):
        augment(u, [False] * n_right)
    return match_right


def _feasible(b1: Barcode, b2: Barcode, delta: float) -> PartialMatching | None:
    # left: intervals of b1, then diagonal slots for b2; right: b2, then slots for b1
    n, m = len(b1), len(b2)
    adj: list[list[int]] = []
    for i in range(n):
        row = [j for j in range(m) if _pair_cost(b1[i], b2[j]) <= delta]
        if _half(b1[i]) <= delta:
            row.append(m + i)
        adj.append(row)
    for j in range(m):
        row = [m + i for i in range(n)]
        if _half(b2[j]) <= delta:
            row.insert(0, j)
        adj.append(row)
    match_right = _max_matching(adj, m + n)
    if any(u < 0 for u in match_right):
        return None
    pairs = [(match_right[j], j) for j in range(m) if match_right[j] < n]
    return PartialMatching(tuple(pairs))


def bottleneck(b1: Barcode, b2: Barcode) -> tuple[float, PartialMatching | None]:
    """Exact bottleneck distance and a matching attaining it.

    Thresholds are searched over the finite pairwise costs and half-lengths.
    When no finite threshold works (different numbers of infinite bars) the
    distance is ``inf`` and no matching is returned.
    """
    candidates = {0.0}
    for a in b1:
        candidates.add(_half(a))
        for b in b2:
            candidates.add(_pair_cost(a, b))
    candidates.update(_half(b) for b in b2)
    ordered = sorted(c for c in candidates if math.isfinite(c))
    lo, hi = 0, len(ordered) - 1
    best = _feasible(b1, b2, ordered[hi])
    if best is None:
        return INF, None
    while lo < hi:
        mid = (lo + hi) // 2
        found = _feasible(b1, b2, ordered[mid])
        if found is None:
            lo = mid + 1
        else:
            hi, best = mid, found
    return matching_cost(b1, b2, best), best


def bottleneck_bruteforce(b1: Barcode, b2: Barcode, limit: int = 8) -> float:
    """Minimum cost over every partial matching, by enumeration."""
    n, m = len(b1), len(b2)
    if n + m > limit:
        raise TooLarge(f"{n + m} intervals exceed the enumeration limit {limit}")
    best = INF
    # each interval of b1 goes to a distinct slot of b2 or to "unmatched" (None)
    slots = list(range(m)) + [None] * n
    seen = set()
    for choice in permutations(slots, n):
        if choice in seen:
            continue
        seen.add(choice)
        pairs = tuple((i, j) for i, j in enumerate(choice) if j is not None)
        best = min(best, matching_cost(b1, b2, PartialMatching(pairs)))
    return best


def random_realization(b: Barcode, seed: int = 0) -> MergeTree:
    """Random merge tree whose Elder Rule barcode is ``b``.

    Each finite bar ``[birth, death)`` is glued at height ``death`` onto a bar
    chosen uniformly among those born strictly earlier and still alive then.
    Requires exactly one infinite bar, born strictly below every other bar.
    """
    bars = sorted(b.intervals)
    if sum(math.isinf(iv.death) for iv in bars) != 1 or not math.isinf(bars[0].death):
        raise ValueError("need exactly one infinite bar, born first")
    if len(bars) > 1 and bars[1].birth == bars[0].birth:
        raise ValueError("the infinite bar must be born strictly first")
    rng = np.random.default_rng(seed)
    host = [None] * len(bars)
    for k in range(1, len(bars)):
        iv = bars[k]
        options = [
            j for j, other in enumerate(bars)
            if other.birth < iv.birth and other.death > iv.death
        ]
        host[k] = options[int(rng.integers(len(options)))]
    # one node per leaf and per (bar, gluing height); chain nodes along each bar
    nodes: list[list] = [[iv.birth, None] for iv in bars]
    stops: dict[int, dict[float, int]] = {k: {} for k in range(len(bars))}
    for k in range(1, len(bars)):
        d = bars[k].death
        spot = stops[host[k]]
        if d not in spot:
            spot[d] = len(nodes)
            nodes.append([d, None])
        nodes[k][1] = spot[d]
    for k in range(len(bars)):
        chain = [k] + [stops[k][h] for h in sorted(stops[k])]
        # the bar's own top node links onward to its host; keep that link last
        top_parent = nodes[k][1]
        nodes[k][1] = None
        for lower, upper in zip(chain, chain[1:]):
            nodes[lower][1] = upper
        nodes[chain[-1]][1] = top_parent
    return validate([tuple(x) for x in nodes])
