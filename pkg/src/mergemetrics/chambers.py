"""Chambers: trees sharing the order pattern of their cophenetic entries.

With leaves numbered by increasing height, two trees whose cophenetic entries
are ordered the same way (ties included) share a chamber. Inside a chamber the
largest entrywise gap ``delta`` of the ascending matrices bounds the
interleaving distance from above. When ``delta`` is at most half the length of
every finite bar of both barcodes, no matching can profit from the diagonal
and the bottleneck and interleaving distances both equal ``delta``. Far apart
pairs in one chamber can have a strictly smaller bottleneck distance, and can
even have ``d_B < d_I``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DuplicateLeafHeights, InvalidPath, NotSameChamber
from .tree import MergeTree, cophenetic_matrix, reconstruct_from_matrix

__all__ = [
    "ChamberSignature",
    "ascending_matrix",
    "chamber_signature",
    "same_chamber",
    "chamber_distance",
    "elder_right_endpoints",
    "matching_lower_bound",
    "chamber_linear_path",
    "chamber_resample",
]


@dataclass(frozen=True)
class ChamberSignature:
    """Dense ranks of the upper-triangle entries ``(i, j), i <= j``, row-major."""

    n: int
    ranking: tuple[int, ...]

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i, self.n)]


def _ascending_order(t: MergeTree) -> list[int]:
    h = t.heights
    order = sorted(t.leaves, key=lambda v: h[v])
    for a, b in zip(order, order[1:]):
        if h[a] == h[b]:
            raise DuplicateLeafHeights(f"leaves {a} and {b} share height {h[a]!r}")
    return order


def ascending_matrix(t: MergeTree) -> np.ndarray:
    """Cophenetic matrix with leaves numbered by strictly increasing height."""
    return cophenetic_matrix(t, _ascending_order(t)).entries


def chamber_signature(t: MergeTree) -> ChamberSignature:
    m = ascending_matrix(t)
    iu = np.triu_indices(len(m))
    _, ranks = np.unique(m[iu], return_inverse=True)
    return ChamberSignature(len(m), tuple(int(r) for r in ranks))


def same_chamber(t1: MergeTree, t2: MergeTree) -> bool:
    return chamber_signature(t1) == chamber_signature(t2)


def _require_same(t1: MergeTree, t2: MergeTree) -> None:
    if not same_chamber(t1, t2):
        raise NotSameChamber("the trees do not share a chamber signature")


def chamber_distance(t1: MergeTree, t2: MergeTree) -> float:
    """Largest entrywise gap of the ascending cophenetic matrices.

    Always an upper bound for the interleaving distance; equal to it (and to
    the bottleneck distance) for pairs close relative to their shortest bar.
    """
    _require_same(t1, t2)
    return float(np.max(np.abs(ascending_matrix(t1) - ascending_matrix(t2))))


def elder_right_endpoints(t: MergeTree) -> list[float]:
    """Death of the bar born at each leaf, leaves by increasing height.

    The lowest leaf never dies; leaf ``j`` dies at the lowest merge with any
    lower leaf.
    """
    m = ascending_matrix(t)
    return [math.inf] + [float(m[j, :j].min()) for j in range(1, len(m))]


def matching_lower_bound(t1: MergeTree, t2: MergeTree) -> float:
    """Bottleneck cost of pairing bars born at equally ranked leaves.

    This is the cheapest matching that pairs every bar with a bar. It bounds
    the bottleneck distance from below only when leaving a bar unmatched
    (at half its length) is never cheaper.
    """
    _require_same(t1, t2)
    births1 = np.diag(ascending_matrix(t1))
    births2 = np.diag(ascending_matrix(t2))
    deaths1 = elder_right_endpoints(t1)
    deaths2 = elder_right_endpoints(t2)
    worst = float(np.max(np.abs(births1 - births2)))
    for a, b in zip(deaths1[1:], deaths2[1:]):
        worst = max(worst, abs(a - b))
    return worst


def chamber_linear_path(t1: MergeTree, t2: MergeTree, k: int):
    """Straight line between ``t1`` and ``t2`` in ascending-matrix coordinates."""
    from .paths import DiscretePath

    _require_same(t1, t2)
    if k < 1:
        raise InvalidPath(f"need at least one leg, got {k}")
    m0, m1 = ascending_matrix(t1), ascending_matrix(t2)
    params, trees = [], []
    for step in range(k + 1):
        s = step / k
        if step == 0:
            trees.append(t1)
        elif step == k:
            trees.append(t2)
        else:
            mt = m0 + s * (m1 - m0)
            trees.append(reconstruct_from_matrix(np.diag(mt), mt))
        params.append(s)
    return DiscretePath(tuple(params), tuple(trees))


def chamber_resample(
    t: MergeTree,
    seed: int = 0,
    height_range: tuple[float, float] = (0.0, 10.0),
    resolution: float = 1 / 16,
) -> MergeTree:
    """Random tree in the same chamber as ``t``.

    Each distinct cophenetic value is replaced by a fresh grid value, keeping
    their order, so every tie and strict inequality is preserved.
    """
    m = ascending_matrix(t)
    values, inverse = np.unique(m, return_inverse=True)
    lo, hi = height_range
    slots = int(math.floor((hi - lo) / resolution)) + 1
    rng = np.random.default_rng(seed)
    fresh = np.sort(rng.choice(slots, size=len(values), replace=False)) * resolution + lo
    new = fresh[inverse.reshape(m.shape)]
    return reconstruct_from_matrix(np.diag(new), new)
