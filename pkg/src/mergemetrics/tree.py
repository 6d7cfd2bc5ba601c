"""Merge trees: representation, validation, LCA, cophenetic matrices and the
upward shift.

A merge tree is stored as a flat node list. Every node has a finite height and
an optional parent; the single parentless node is the root, and the infinite
ray above it is implicit. Trees are kept in canonical form: no non-root node
has exactly one child and the root has at least two children unless the tree
is a single node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CycleDetected,
    DiagonalDominanceViolation,
    EmptyTree,
    InvalidLeafCount,
    InvalidPoint,
    MultipleRoots,
    NegativeEpsilon,
    NonFiniteHeight,
    NonIncreasingHeight,
    OrderMismatch,
    ThreePointViolation,
    TooManyLeaves,
    UnknownParent,
)

__all__ = [
    "MergeTree",
    "PointOnTree",
    "CopheneticMatrix",
    "validate",
    "lca",
    "cophenetic_matrix",
    "shift",
    "exact_shift_amount",
    "reconstruct_from_matrix",
    "reconstruct_labeled",
    "isomorphic",
    "canonical_key",
    "add_padding_leaves",
    "perturb_leaf_heights",
    "random_tree",
    "trivial_interleaving_bound",
    "check_three_point",
]


@dataclass(frozen=True)
class MergeTree:
    """Canonical merge tree. Build instances with :func:`validate`."""

    heights: tuple[float, ...]
    parents: tuple[int | None, ...]

    @cached_property
    def root(self) -> int:
        return self.parents.index(None)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in self.heights]
        for node, parent in enumerate(self.parents):
            if parent is not None:
                kids[parent].append(node)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v, kids in enumerate(self.children) if not kids)

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    @property
    def n_nodes(self) -> int:
        return len(self.heights)

    @property
    def root_height(self) -> float:
        return self.heights[self.root]

    @property
    def min_height(self) -> float:
        return min(self.heights)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        out = [0] * self.n_nodes
        for v in self._topdown:
            p = self.parents[v]
            if p is not None:
                out[v] = out[p] + 1
        return tuple(out)

    @cached_property
    def _topdown(self) -> tuple[int, ...]:
        order = [self.root]
        for v in order:
            order.extend(self.children[v])
        return tuple(order)

    def is_leaf(self, node: int) -> bool:
        return not self.children[node]

    def ancestors(self, node: int) -> list[int]:
        """``node`` followed by every node above it, ending at the root."""
        out = [node]
        while self.parents[out[-1]] is not None:
            out.append(self.parents[out[-1]])
        return out

    def lift(self, node: int, ref: float, offset: float) -> int:
        """Base node of the point at height ``ref + offset`` above ``node``.

        Climbs while ``height(parent) - ref <= offset``. Comparing differences
        rather than the sum keeps the test bit-identical with candidate values
        computed as height differences.
        """
        h, parents = self.heights, self.parents
        p = parents[node]
        while p is not None and h[p] - ref <= offset:
            node = p
            p = parents[node]
        return node

    def point(self, base: int, height: float) -> "PointOnTree":
        """Normalized point at ``height`` on the upward path from ``base``."""
        if not 0 <= base < self.n_nodes:
            raise InvalidPoint(f"node {base} does not exist")
        if not math.isfinite(height) or height < self.heights[base]:
            raise InvalidPoint(
                f"height {height!r} is below node {base} (height {self.heights[base]!r})"
            )
        return PointOnTree(self.lift(base, height, 0.0), height)

    def leaf_point(self, leaf: int) -> "PointOnTree":
        return PointOnTree(leaf, self.heights[leaf])

    def lca_node(self, a: int, b: int) -> int:
        da, db = self.depth[a], self.depth[b]
        while da > db:
            a, da = self.parents[a], da - 1
        while db > da:
            b, db = self.parents[b], db - 1
        while a != b:
            a, b = self.parents[a], self.parents[b]
        return a

    def to_nodes(self) -> list[tuple[float, int | None]]:
        return list(zip(self.heights, self.parents))


@dataclass(frozen=True, order=True)
class PointOnTree:
    """Point at ``height`` on the edge (or root ray) starting at node ``base``."""

    base: int
    height: float


@dataclass(frozen=True)
class CopheneticMatrix:
    order: tuple[int, ...]
    entries: np.ndarray

    @property
    def diag(self) -> np.ndarray:
        return np.diag(self.entries)


def _as_pair(item) -> tuple[float, int | None]:
    if isinstance(item, dict):
        return item["height"], item.get("parent")
    height, parent = item
    return height, parent


def validate(nodes: Iterable) -> MergeTree:
    """Check a raw node list and return its canonical :class:`MergeTree`.

    ``nodes`` is a sequence of ``(height, parent)`` pairs (or mappings with
    those keys) where ``parent`` is a node index or ``None``. Non-root nodes
    with a single child are smoothed away, as is a root with a single child.
    """
    raw = [_as_pair(item) for item in nodes]
    if not raw:
        raise EmptyTree("a merge tree needs at least one node")
    n = len(raw)
    heights = []
    parents = []
    for i, (h, p) in enumerate(raw):
        try:
            hf = float(h)
        except (TypeError, ValueError):
            raise NonFiniteHeight(f"node {i}: height {h!r} is not a number") from None
        if isinstance(h, bool) or not math.isfinite(hf):
            raise NonFiniteHeight(f"node {i}: height {h!r} is not finite")
        if p is not None:
            if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or not 0 <= p < n:
                raise UnknownParent(f"node {i}: parent {p!r} does not exist")
            if p == i:
                raise CycleDetected(f"node {i} is its own parent")
            p = int(p)
        heights.append(hf)
        parents.append(p)

    roots = [i for i, p in enumerate(parents) if p is None]
    if not roots:
        raise CycleDetected("no root: every node has a parent")
    if len(roots) > 1:
        raise MultipleRoots(f"nodes {roots} have no parent")

    state = [0] * n  # 0 unseen, 1 on current walk, 2 reaches the root
    state[roots[0]] = 2
    for start in range(n):
        walk = []
        v = start
        while state[v] == 0:
            state[v] = 1
            walk.append(v)
            v = parents[v]
        if state[v] == 1:
            raise CycleDetected(f"parent links from node {start} loop back to node {v}")
        for w in walk:
            state[w] = 2

    for i, p in enumerate(parents):
        if p is not None and not heights[i] < heights[p]:
            raise NonIncreasingHeight(
                f"node {i} (height {heights[i]!r}) is not strictly below its "
                f"parent {p} (height {heights[p]!r})"
            )
    return _canonicalize(heights, parents)


def _canonicalize(heights: Sequence[float], parents: Sequence[int | None]) -> MergeTree:
    n = len(heights)
    parents = list(parents)
    n_children = [0] * n
    for p in parents:
        if p is not None:
            n_children[p] += 1
    removed = [False] * n
    # resolve each node's nearest surviving ancestor
    for v in range(n):
        p = parents[v]
        while p is not None and n_children[p] == 1 and parents[p] is not None:
            p = parents[p]
        parents[v] = p
    for v in range(n):
        if parents[v] is not None and n_children[v] == 1:
            removed[v] = True
    # a root with one child is just a point on the ray of that child
    root = parents.index(None) if None in parents else None
    while root is not None and n_children[root] == 1:
        removed[root] = True
        child = next(
            v for v in range(n) if not removed[v] and parents[v] == root
        )
        parents[child] = None
        root = child
    keep = [v for v in range(n) if not removed[v]]
    index = {v: i for i, v in enumerate(keep)}
    return MergeTree(
        tuple(float(heights[v]) for v in keep),
        tuple(None if parents[v] is None else index[parents[v]] for v in keep),
    )


def lca(t: MergeTree, u: PointOnTree, v: PointOnTree) -> PointOnTree:
    """Least common ancestor of two points of ``t``."""
    u = t.point(u.base, u.height)
    v = t.point(v.base, v.height)
    if u.height > v.height:
        u, v = v, u
    # v is above u exactly when climbing from u to v's height lands on v's edge
    if t.lift(u.base, v.height, 0.0) == v.base:
        return v
    w = t.lca_node(u.base, v.base)
    return PointOnTree(w, t.heights[w])


def cophenetic_matrix(t: MergeTree, order: Sequence[int] | None = None) -> CopheneticMatrix:
    """Leaf heights on the diagonal, LCA heights off it.

    ``order`` lists leaf node indices; by default the leaves in index order.
    """
    leaves = t.leaves
    if order is None:
        order = leaves
    order = tuple(int(v) for v in order)
    if sorted(order) != sorted(leaves):
        raise OrderMismatch(f"order {order} is not a permutation of the leaves {leaves}")
    n = len(order)
    m = np.empty((n, n))
    h = t.heights
    for i, a in enumerate(order):
        m[i, i] = h[a]
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = h[t.lca_node(a, order[j])]
    m.flags.writeable = False
    return CopheneticMatrix(order, m)


def check_three_point(m: np.ndarray) -> tuple[int, int, int] | None:
    """First off-diagonal triple violating ``m_ij <= max(m_ik, m_jk)``, if any."""
    n = len(m)
    for k in range(n):
        bound = np.maximum(m[:, k][:, None], m[k, :][None, :])
        bad = m > bound
        bad[k, :] = False
        bad[:, k] = False
        np.fill_diagonal(bad, False)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return int(i), int(j), k
    return None


def reconstruct_labeled(
    diag: Sequence[float], m: np.ndarray
) -> tuple[MergeTree, list[PointOnTree]]:
    """Single-linkage reconstruction that also reports where each label sits.

    Label ``i`` is redundant (an interior point or a duplicate) when some other
    label ``j`` has ``m[i, j] == diag[i]`` and ``(diag[j], j) < (diag[i], i)``.
    The surviving labels become the leaves, in label order.
    """
    diag = np.asarray(diag, dtype=float)
    m = np.array(m, dtype=float)
    n = len(diag)
    if n == 0:
        raise EmptyTree("cannot reconstruct a tree from zero labels")
    if m.shape != (n, n):
        raise ValueError(f"matrix shape {m.shape} does not match {n} labels")
    if not (np.isfinite(diag).all() and np.isfinite(m).all()):
        raise NonFiniteHeight("matrix entries must be finite")
    if not np.array_equal(m, m.T):
        raise ValueError("matrix is not symmetric")
    np.fill_diagonal(m, diag)
    floor = np.maximum(diag[:, None], diag[None, :])
    if (m < floor).any():
        i, j = np.argwhere(m < floor)[0]
        raise DiagonalDominanceViolation(
            f"entry ({i}, {j}) = {m[i, j]!r} is below the label heights"
        )
    bad = check_three_point(m)
    if bad is not None:
        i, j, k = bad
        raise ThreePointViolation(
            f"m[{i},{j}] = {m[i, j]!r} exceeds max(m[{i},{k}], m[{j},{k}])"
        )

    witness: list[int | None] = [None] * n
    for i in range(n):
        for j in range(n):
            if j != i and m[i, j] == diag[i] and (diag[j], j) < (diag[i], i):
                witness[i] = j
                break
    kept = [i for i in range(n) if witness[i] is None]

    heights = [float(diag[i]) for i in kept]
    parents: list[int | None] = [None] * len(kept)
    top = list(range(len(kept)))  # cluster representative -> top node
    cluster = list(range(len(kept)))

    def find(a: int) -> int:
        while cluster[a] != a:
            cluster[a] = cluster[cluster[a]]
            a = cluster[a]
        return a

    sub = m[np.ix_(kept, kept)]
    iu = np.triu_indices(len(kept), 1)
    for value in np.unique(sub[iu]):
        groups: dict[int, set[int]] = {}
        links = [(a, b) for a, b in zip(*iu) if sub[a, b] == value]
        # gather clusters joined at this height (possibly more than two)
        joined: dict[int, int] = {}

        def jfind(a: int) -> int:
            while joined.get(a, a) != a:
                a = joined[a]
            return a

        for a, b in links:
            ra, rb = find(int(a)), find(int(b))
            joined.setdefault(ra, ra)
            joined.setdefault(rb, rb)
            x, y = jfind(ra), jfind(rb)
            if x != y:
                joined[y] = x
        for r in joined:
            groups.setdefault(jfind(r), set()).add(r)
        for members in groups.values():
            if len(members) < 2:
                continue
            node = len(heights)
            heights.append(float(value))
            parents.append(None)
            members = sorted(members)
            for r in members:
                parents[top[r]] = node
            head = members[0]
            for r in members[1:]:
                cluster[r] = head
            top[head] = node

    tree = MergeTree(tuple(heights), tuple(parents))
    points: list[PointOnTree | None] = [None] * n
    for pos, i in enumerate(kept):
        points[i] = PointOnTree(pos, heights[pos])

    def place(i: int) -> PointOnTree:
        if points[i] is None:
            below = place(witness[i])
            points[i] = tree.point(below.base, float(diag[i]))
        return points[i]

    return tree, [place(i) for i in range(n)]


def reconstruct_from_matrix(diag: Sequence[float], m: np.ndarray) -> MergeTree:
    """Merge tree whose labeled points have heights ``diag`` and LCA heights ``m``."""
    return reconstruct_labeled(diag, m)[0]


def exact_shift_amount(eps: float, heights: Iterable[float]) -> float:
    """``eps`` rounded so that ``h + eps`` is exact for every given height.

    The grid is the finest power of two on which all heights lie and whose
    multiples are representable up to ``max|h| + eps``. Without rounding, each
    sum would carry its own rounding error and a shifted tree would not be an
    exact shift of anything. If no such grid exists ``eps`` is returned as is.
    """
    heights = list(heights)
    top = max((abs(h) for h in heights), default=0.0) + eps
    if eps == 0 or top == 0:
        return eps
    step = math.ldexp(1.0, math.frexp(top)[1] - 53)
    if not all((h / step).is_integer() for h in heights):
        return eps
    return round(eps / step) * step


def shift(t: MergeTree, eps: float) -> MergeTree:
    """The tree swept out by moving every point up by ``eps``.

    Branches shorter than ``eps`` disappear, so the leaf count can only drop.
    ``eps`` is first rounded by :func:`exact_shift_amount` (by at most half a
    unit in the last place of the largest shifted height).
    """
    if eps < 0:
        raise NegativeEpsilon(f"shift amount must be non-negative, got {eps!r}")
    eps = exact_shift_amount(eps, t.heights)
    if eps == 0:
        return t
    m = cophenetic_matrix(t).entries
    d = np.diag(m) + eps
    shifted = np.maximum(m, np.maximum(d[:, None], d[None, :]))
    return reconstruct_from_matrix(d, shifted)


def canonical_key(t: MergeTree, node: int | None = None):
    """Hashable key equal for exactly the isomorphic trees."""
    if node is None:
        node = t.root
    kids = sorted(canonical_key(t, c) for c in t.children[node])
    return (t.heights[node], tuple(kids))


def isomorphic(t1: MergeTree, t2: MergeTree) -> bool:
    return t1.n_nodes == t2.n_nodes and canonical_key(t1) == canonical_key(t2)


def add_padding_leaves(
    t: MergeTree, n: int, eps: float, attach: PointOnTree | None = None
) -> MergeTree:
    """Hang extra leaves ``eps`` below ``attach`` until the tree has ``n`` leaves.

    ``attach`` defaults to the point ``eps`` above the root. It may not be a
    leaf, since a single new branch hung from a leaf would be smoothed away.
    """
    if eps <= 0:
        raise NegativeEpsilon(f"padding depth must be positive, got {eps!r}")
    k = t.n_leaves
    if k > n:
        raise TooManyLeaves(f"tree already has {k} leaves, more than {n}")
    if k == n:
        return t
    if attach is None:
        attach = PointOnTree(t.root, t.root_height + eps)
    p = t.point(attach.base, attach.height)
    if t.is_leaf(p.base) and p.height == t.heights[p.base]:
        raise InvalidPoint("cannot attach padding leaves at a leaf")
    nodes = t.to_nodes()
    if p.height == t.heights[p.base]:
        anchor = p.base
    else:
        anchor = len(nodes)
        nodes.append((p.height, t.parents[p.base]))
        nodes[p.base] = (t.heights[p.base], anchor)
    nodes.extend((p.height - eps, anchor) for _ in range(n - k))
    return validate(nodes)


def perturb_leaf_heights(t: MergeTree, eps: float, seed: int = 0) -> MergeTree:
    """Lower every leaf by a distinct-result amount in ``(0, eps]``.

    Amounts are multiples of ``eps / 2k`` for ``k`` leaves, assigned in a
    seed-determined order so that no two leaves end at the same height.
    """
    if eps <= 0:
        raise NegativeEpsilon(f"perturbation must be positive, got {eps!r}")
    rng = np.random.default_rng(seed)
    leaves = t.leaves
    k = len(leaves)
    step = eps / (2 * k)
    heights = list(t.heights)
    taken: set[float] = set()
    for idx in rng.permutation(k):
        leaf = leaves[idx]
        for j in rng.permutation(2 * k) + 1:
            h = t.heights[leaf] - min(int(j) * step, eps)
            # rounding may overshoot the bound by an ulp
            while t.heights[leaf] - h > eps:
                h = math.nextafter(h, math.inf)
            if h not in taken:
                break
        taken.add(h)
        heights[leaf] = h
    return MergeTree(tuple(heights), t.parents)


def random_tree(
    n: int,
    seed: int = 0,
    height_range: tuple[float, float] = (0.0, 10.0),
    resolution: float = 1 / 16,
) -> MergeTree:
    """Random binary merge tree with ``n`` leaves and pairwise distinct heights.

    Heights are drawn without replacement from the grid
    ``lo, lo + resolution, ..., hi``; a power-of-two resolution keeps every
    difference, half-difference and dyadic interpolation exactly representable.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidLeafCount(f"need at least one leaf, got {n!r}")
    lo, hi = height_range
    slots = int(math.floor((hi - lo) / resolution)) + 1
    if slots < 2 * n - 1:
        raise InvalidLeafCount(f"height grid has {slots} values, too few for {n} leaves")
    rng = np.random.default_rng(seed)
    values = np.sort(rng.choice(slots, size=2 * n - 1, replace=False)) * resolution + lo
    nodes: list[list] = []
    active: list[int] = []
    leaves_left = n
    for h in values:
        if leaves_left and (len(active) < 2 or rng.random() < 0.5):
            active.append(len(nodes))
            nodes.append([float(h), None])
            leaves_left -= 1
            continue
        a, b = sorted(rng.choice(len(active), size=2, replace=False), reverse=True)
        new = len(nodes)
        nodes.append([float(h), None])
        for pos in (a, b):
            nodes[active.pop(pos)][1] = new
        active.append(new)
    return validate([tuple(x) for x in nodes])


def trivial_interleaving_bound(t1: MergeTree, t2: MergeTree) -> float:
    """Shift that pushes both trees entirely onto each other's root ray."""
    top = max(t1.root_height, t2.root_height)
    bottom = min(t1.min_height, t2.min_height)
    return top - bottom
