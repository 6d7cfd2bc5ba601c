"""Interleaving distance between merge trees at small scale.

The decision procedure searches exhaustively over where each leaf may be sent.
Since an interleaving commutes with the upward shift, the image of a leaf fixes
the image of everything above it, so a leaf-level search is exact. Cost grows
like ``(#edges) ** (n + m)``; the number of leaves per tree is capped by
``max_oracle_leaves()`` (environment variable
``MERGEMETRICS_MAX_ORACLE_LEAVES``, default 6).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

import numpy as np

from .errors import InvalidPoint, LeafCountMismatch, OracleInconsistency, TooManyLeaves
from .tree import MergeTree, PointOnTree, cophenetic_matrix, lca, trivial_interleaving_bound

__all__ = [
    "InterleavingWitness",
    "max_oracle_leaves",
    "decide_interleaving",
    "check_witness",
    "interleaving_candidates",
    "interleaving_distance_exact",
    "cophenetic_upper_bound",
    "best_labeled_upper_bound",
]

DEFAULT_ORACLE_LEAVES = 6


def max_oracle_leaves() -> int:
    value = os.environ.get("MERGEMETRICS_MAX_ORACLE_LEAVES")
    return int(value) if value else DEFAULT_ORACLE_LEAVES


def _check_size(*trees: MergeTree, limit: int | None = None) -> None:
    limit = max_oracle_leaves() if limit is None else limit
    for t in trees:
        if t.n_leaves > limit:
            raise TooManyLeaves(
                f"tree with {t.n_leaves} leaves exceeds the oracle limit of {limit}"
            )


@dataclass(frozen=True)
class InterleavingWitness:
    """Leaf images of an ``eps``-interleaving.

    ``alpha_images[k]`` is the image in the second tree of the ``k``-th leaf
    (in ``t1.leaves`` order) of the first; ``beta_images`` the converse.
    """

    eps: float
    alpha_images: tuple[PointOnTree, ...]
    beta_images: tuple[PointOnTree, ...]


class _Side:
    """Precomputed data for mapping the leaves of ``src`` into ``dst``."""

    def __init__(self, src: MergeTree, dst: MergeTree):
        self.src, self.dst = src, dst
        self.leaves = src.leaves
        self.lca_heights = cophenetic_matrix(src).entries

    def candidates(self, eps: float) -> list[list[int]]:
        dst, h = self.dst, self.dst.heights
        out = []
        for leaf in self.leaves:
            ref = self.src.heights[leaf]
            bases = {dst.lift(d, ref, eps) for d in dst.leaves if h[d] - ref <= eps}
            out.append(sorted(bases))
        return out


def _lca_ok(side: _Side, images: Sequence[int], k: int, eps: float) -> bool:
    """Images of leaf ``k`` and of every earlier leaf meet in time."""
    dst, f = side.dst, side.lca_heights
    for i in range(k):
        ref = f[i, k]
        if dst.lift(images[i], ref, eps) != dst.lift(images[k], ref, eps):
            return False
    return True


def _assignments(side: _Side, cands: list[list[int]], eps: float, unary=None):
    """Yield every leaf assignment obeying the pairwise merge law."""
    n = len(cands)
    images = [0] * n
    if unary is not None:
        cands = [[b for b in cands[k] if unary(k, b)] for k in range(n)]
        if any(not c for c in cands):
            return

    def extend(k: int):
        if k == n:
            yield tuple(images)
            return
        for b in cands[k]:
            images[k] = b
            if _lca_ok(side, images, k, eps):
                yield from extend(k + 1)

    yield from extend(0)


def _beta_ok(
    t1: MergeTree, t2: MergeTree, alpha: Sequence[int], k: int, b: int, eps: float
) -> bool:
    """Both composition laws touching ``beta(l'_k) = b``, given all of ``alpha``.

    Images are nodes: ``alpha[i]`` is the base in ``t2`` of the point at height
    ``f1(l_i) + eps``; ``b`` is the base in ``t1`` of the point at ``f2(l'_k) + eps``.
    """
    h1, h2 = t1.heights, t2.heights
    leaf = t2.leaves[k]
    ref = h2[leaf]
    # alpha(beta(l'_k)) is read off any leaf of t1 under b and must be l'_k + 2 eps
    target = t2.lift(leaf, ref, 2 * eps)
    for i, under in enumerate(t1.leaves):
        if h1[under] - ref <= eps and t1.lift(under, ref, eps) == b:
            if t2.lift(alpha[i], ref, 2 * eps) != target:
                return False
    # beta(alpha(l_i)) for every l_i whose image sits above l'_k must be l_i + 2 eps
    for i, l in enumerate(t1.leaves):
        ref = h1[l]
        if h2[leaf] - ref <= eps and t2.lift(leaf, ref, eps) == alpha[i]:
            if t1.lift(b, ref, 2 * eps) != t1.lift(l, ref, 2 * eps):
                return False
    return True


def decide_interleaving(
    t1: MergeTree, t2: MergeTree, eps: float, max_leaves: int | None = None
) -> InterleavingWitness | None:
    """An ``eps``-interleaving between ``t1`` and ``t2``, or ``None`` if none exists."""
    if eps < 0:
        return None
    _check_size(t1, t2, limit=max_leaves)
    fwd, back = _Side(t1, t2), _Side(t2, t1)
    cand_a = fwd.candidates(eps)
    cand_b = back.candidates(eps)
    if any(not c for c in cand_a) or any(not c for c in cand_b):
        return None
    for alpha in _assignments(fwd, cand_a, eps):
        unary = lambda k, b: _beta_ok(t1, t2, alpha, k, b, eps)  # noqa: E731
        for beta in _assignments(back, cand_b, eps, unary):
            return InterleavingWitness(
                eps,
                tuple(PointOnTree(a, t1.heights[l] + eps) for a, l in zip(alpha, t1.leaves)),
                tuple(PointOnTree(b, t2.heights[l] + eps) for b, l in zip(beta, t2.leaves)),
            )
    return None


def check_witness(t1: MergeTree, t2: MergeTree, w: InterleavingWitness) -> bool:
    """Independently verify the height, merge and composition laws of ``w``.

    Works with point heights directly (no shared code with the search), so it
    can be used to audit :func:`decide_interleaving`.
    """
    eps = w.eps

    def up(t: MergeTree, p: PointOnTree, s: float) -> PointOnTree:
        return t.point(p.base, p.height + s)

    def one_side(src, dst, images, back_images):
        if len(images) != src.n_leaves:
            return False
        for leaf, img in zip(src.leaves, images):
            if img.height != src.heights[leaf] + eps:
                return False
            try:
                if dst.point(img.base, img.height) != img:
                    return False
            except InvalidPoint:
                return False
        for a in range(len(images)):
            for b in range(a + 1, len(images)):
                la, lb = src.leaves[a], src.leaves[b]
                joined = src.heights[src.lca_node(la, lb)]
                if lca(dst, images[a], images[b]).height > joined + eps:
                    return False
        for leaf, img in zip(src.leaves, images):
            goal = src.point(leaf, src.heights[leaf] + 2 * eps)
            for k, under in enumerate(dst.leaves):
                if dst.heights[under] > img.height:
                    continue
                if dst.point(under, img.height) != img:
                    continue
                s = img.height - dst.heights[under]
                if up(src, back_images[k], s) != goal:
                    return False
        return True

    return one_side(t1, t2, w.alpha_images, w.beta_images) and one_side(
        t2, t1, w.beta_images, w.alpha_images
    )


def interleaving_candidates(t1: MergeTree, t2: MergeTree) -> list[float]:
    """Every value at which feasibility can change: 0 plus all differences and
    half-differences of vertex heights in either tree."""
    h = np.unique(np.concatenate([t1.heights, t2.heights]))
    diffs = np.abs(h[:, None] - h[None, :]).ravel()
    values = np.unique(np.concatenate([[0.0], diffs, diffs / 2]))
    return [float(v) for v in values]


def interleaving_distance_exact(
    t1: MergeTree,
    t2: MergeTree,
    *,
    cross_check: bool = True,
    full_scan: bool = False,
    max_leaves: int | None = None,
) -> tuple[float, InterleavingWitness]:
    """Smallest ``eps`` admitting an interleaving, with a witness.

    Feasibility is monotone in ``eps``, so the candidate list is bisected.
    ``full_scan`` instead tests every candidate up to the trivial bound and
    raises :class:`OracleInconsistency` if feasibility ever switches off again.
    ``cross_check`` bisects the real interval ``[0, trivial bound]`` to 1e-9 and
    raises if it disagrees with the candidate answer.
    """
    _check_size(t1, t2, limit=max_leaves)
    bound = trivial_interleaving_bound(t1, t2)
    cands = [c for c in interleaving_candidates(t1, t2) if c <= bound]

    def decide(e):
        return decide_interleaving(t1, t2, e, max_leaves=max_leaves)

    if full_scan:
        found = None
        for c in cands:
            w = decide(c)
            if found is None and w is not None:
                found = (c, w)
            elif found is not None and w is None:
                raise OracleInconsistency(
                    f"feasible at {found[0]!r} but infeasible at larger {c!r}"
                )
        if found is None:
            raise OracleInconsistency(f"trivial bound {bound!r} is not feasible")
        value, witness = found
    else:
        lo, hi = 0, len(cands) - 1
        witness = decide(cands[hi])
        if witness is None:
            raise OracleInconsistency(f"trivial bound {bound!r} is not feasible")
        while lo < hi:
            mid = (lo + hi) // 2
            w = decide(cands[mid])
            if w is None:
                lo = mid + 1
            else:
                hi, witness = mid, w
        value = cands[hi]

    if cross_check and value > 0:
        a, b = 0.0, bound
        if decide(0.0) is not None:
            b = 0.0
        while b - a > 1e-9:
            mid = (a + b) / 2
            if decide(mid) is None:
                a = mid
            else:
                b = mid
        if abs(b - value) > 1e-9:
            raise OracleInconsistency(
                f"candidate scan gives {value!r} but bisection gives {b!r}"
            )
    return value, witness


def cophenetic_upper_bound(
    t1: MergeTree, t2: MergeTree, bijection: Sequence[int] | None = None
) -> float:
    """Largest entrywise gap between the cophenetic matrices under a leaf pairing.

    ``bijection[k]`` is the position in ``t2.leaves`` paired with the ``k``-th
    leaf of ``t1``; the identity by default.
    """
    n = t1.n_leaves
    if t2.n_leaves != n:
        raise LeafCountMismatch(f"{n} leaves versus {t2.n_leaves}")
    if bijection is None:
        bijection = range(n)
    bijection = list(bijection)
    if sorted(bijection) != list(range(n)):
        raise LeafCountMismatch(f"{bijection} is not a bijection of {n} leaves")
    m1 = cophenetic_matrix(t1).entries
    m2 = cophenetic_matrix(t2, [t2.leaves[k] for k in bijection]).entries
    return float(np.max(np.abs(m1 - m2)))


def best_labeled_upper_bound(
    t1: MergeTree, t2: MergeTree, max_leaves: int | None = None
) -> tuple[float, tuple[int, ...]]:
    """Minimum of :func:`cophenetic_upper_bound` over all leaf pairings."""
    n = t1.n_leaves
    if t2.n_leaves != n:
        raise LeafCountMismatch(f"{n} leaves versus {t2.n_leaves}")
    _check_size(t1, t2, limit=max_leaves)
    m1 = cophenetic_matrix(t1).entries
    m2 = cophenetic_matrix(t2).entries
    best, best_perm = np.inf, tuple(range(n))
    for perm in permutations(range(n)):
        idx = np.array(perm)
        gap = float(np.max(np.abs(m1 - m2[np.ix_(idx, idx)])))
        if gap < best:
            best, best_perm = gap, perm
    return best, best_perm
