"""Acceptance run.

Each test checks one criterion on a fixed random sample and prints a single
``PASS`` or ``FAIL`` line; the lines are repeated in the pytest terminal
summary. Run ``python tests/test_acceptance.py`` to get just the lines.
"""

from itertools import permutations

import numpy as np
import pytest

from mergemetrics import (
    Barcode,
    Interval,
    bottleneck,
    bottleneck_bruteforce,
    cophenetic_upper_bound,
    decide_interleaving,
    elder_rule,
    filtration_barcode_oracle,
    interleaving_distance_exact,
    isomorphic,
    random_tree,
    shift,
    validate,
)
from mergemetrics.chambers import (
    chamber_distance,
    chamber_resample,
    elder_right_endpoints,
    matching_lower_bound,
)
from mergemetrics.paths import (
    DiscretePath,
    discrete_length,
    leg_distances,
    prune_path,
    sample_pair,
    shrink_legs,
    verify_intrinsic_theorem,
)

try:
    from conftest import rough_tree
except ImportError:  # run as a script from the repository root
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).parent))
    from conftest import rough_tree

RESULTS: list[str] = []


def report(number: int, title: str, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}"
    print(line)
    RESULTS.append(line)
    return ok


def rng_for(number: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([2024, number]))


def draw_seed(rng) -> int:
    return int(rng.integers(2**62))


def relabeled(t):
    """Same tree with its nodes listed in a different order."""
    order = list(reversed(range(t.n_nodes)))
    pos = {v: i for i, v in enumerate(order)}
    return validate(
        [(t.heights[v], None if t.parents[v] is None else pos[t.parents[v]]) for v in order]
    )


# 1 -------------------------------------------------------------------------


def test_01_intrinsic_theorem_experiment():
    r = verify_intrinsic_theorem(trials=200, max_leaves=4, samples=128, seed=7)
    length_ok = sum(rec.length_ok for rec in r.records)
    bottleneck_ok = sum(rec.bottleneck_ok for rec in r.records)
    below = sum(rec.bottleneck < rec.interleaving for rec in r.records)
    ok = (
        length_ok == r.trials
        and bottleneck_ok == r.trials
        and r.soft_rate >= 0.99
        and r.refinement_passed == r.trials
    )
    detail = (
        f"S<=d_I {length_ok}/{r.trials}, d_B<=d_I {bottleneck_ok}/{r.trials}, "
        f"|S-d_I| close {r.soft_passed}/{r.trials}, S(64)<=S(128) "
        f"{r.refinement_passed}/{r.trials}, pairs with d_B<d_I {below}"
    )
    assert report(1, "witness path length equals d_I", ok, detail)


# 2 -------------------------------------------------------------------------


def test_02_bottleneck_below_interleaving():
    rng = rng_for(2)
    seed = draw_seed(rng)
    good = 0
    for i in range(500):
        t1, t2 = sample_pair(seed, i, 4)
        d_b = bottleneck(elder_rule(t1), elder_rule(t2))[0]
        d_i = interleaving_distance_exact(t1, t2)[0]
        good += d_b <= d_i
    assert report(2, "d_B <= d_I", good == 500, f"{good}/500 pairs, no tolerance")


# 3 -------------------------------------------------------------------------


@pytest.mark.xfail(
    strict=True,
    reason="far-apart pairs in one chamber can leave a short bar unmatched, "
    "so d_B (and d_I) fall below the largest matrix gap; see README",
)
def test_03_in_chamber_equality():
    rng = rng_for(3)
    all_equal = gap_is_bottleneck = bottleneck_is_interleaving = lower_bound_ok = 0
    for _ in range(200):
        t = random_tree(int(rng.integers(1, 5)), draw_seed(rng))
        r = chamber_resample(t, draw_seed(rng))
        d = chamber_distance(t, r)
        d_b = bottleneck(elder_rule(t), elder_rule(r))[0]
        d_i = interleaving_distance_exact(t, r)[0]
        m = matching_lower_bound(t, r)
        a = abs(d - d_b) <= 1e-12
        b = abs(d_b - d_i) <= 1e-12
        c = abs(m - d) <= 1e-12
        gap_is_bottleneck += a
        bottleneck_is_interleaving += b
        lower_bound_ok += c
        all_equal += a and b and c
    detail = (
        f"all four equal {all_equal}/200 (gap=d_B {gap_is_bottleneck}, d_B=d_I "
        f"{bottleneck_is_interleaving}, lower bound=gap {lower_bound_ok})"
    )
    assert report(3, "in-chamber d_B = d_I = max gap", all_equal == 200, detail)


# 4 -------------------------------------------------------------------------


def test_04_cophenetic_upper_bound():
    rng = rng_for(4)
    good = checked = 0
    for _ in range(500):
        n = int(rng.integers(1, 5))
        t1, t2 = random_tree(n, draw_seed(rng)), random_tree(n, draw_seed(rng))
        d_i = interleaving_distance_exact(t1, t2)[0]
        bounds = [cophenetic_upper_bound(t1, t2, p) for p in permutations(range(n))]
        checked += len(bounds)
        good += all(d_i <= b for b in bounds)
    assert report(
        4, "d_I <= cophenetic bound", good == 500, f"{good}/500 pairs, {checked} bijections"
    )


# 5 -------------------------------------------------------------------------


def test_05_elder_rule():
    rng = rng_for(5)
    same = endpoints = distinct = 0
    for i in range(500):
        if i % 2:
            t = random_tree(int(rng.integers(1, 9)), draw_seed(rng))
        else:
            # coarse heights: ties and non-binary merges
            t = rough_tree(draw_seed(rng), int(rng.integers(1, 16)))
        if t.n_leaves > 8:
            t = random_tree(8, draw_seed(rng))
        b = elder_rule(t)
        same += b == filtration_barcode_oracle(t)
        heights = [t.heights[v] for v in t.leaves]
        if len(set(heights)) == len(heights):
            distinct += 1
            endpoints += sorted(b.deaths) == sorted(elder_right_endpoints(t))
    ok = same == 500 and endpoints == distinct
    detail = f"oracle match {same}/500, endpoint vectors {endpoints}/{distinct} distinct-height trees"
    assert report(5, "Elder Rule", ok, detail)


# 6 -------------------------------------------------------------------------


def random_barcode(rng) -> Barcode:
    out = []
    for _ in range(int(rng.integers(0, 5))):
        birth = float(rng.uniform(0, 10))
        if rng.random() < 0.25:
            out.append(Interval(birth))
        else:
            out.append(Interval(birth, birth + float(rng.uniform(1e-3, 5))))
    return Barcode(out)


def test_06_bottleneck_exactness():
    rng = rng_for(6)
    good = 0
    for _ in range(300):
        b1, b2 = random_barcode(rng), random_barcode(rng)
        good += bottleneck(b1, b2)[0] == bottleneck_bruteforce(b1, b2)
    assert report(6, "bottleneck = brute force", good == 300, f"{good}/300 pairs, exact")


# 7 -------------------------------------------------------------------------


def test_07_minimum_attained():
    rng = rng_for(7)
    seed = draw_seed(rng)
    good = below_checked = 0
    for i in range(200):
        t1, t2 = sample_pair(seed, i, 4)
        d_i = interleaving_distance_exact(t1, t2)[0]
        ok = decide_interleaving(t1, t2, d_i) is not None
        if d_i > 1e-5:
            below_checked += 1
            ok = ok and decide_interleaving(t1, t2, d_i - 1e-6) is None
        good += ok
    detail = f"{good}/200 pairs ({below_checked} also infeasible just below)"
    assert report(7, "minimum attained", good == 200, detail)


# 8 -------------------------------------------------------------------------


def test_08_pruning_paths():
    rng = rng_for(8)
    legs_ok = leaves_ok = shrink_ok = 0
    for _ in range(100):
        trees = [random_tree(int(rng.integers(1, 6)), draw_seed(rng)) for _ in range(5)]
        p = DiscretePath.uniform(trees)
        before = leg_distances(p)
        legs = leaves = shrink = True
        for eps in (0.1, 1.0):
            q = prune_path(p, eps)
            legs &= all(a <= b for a, b in zip(leg_distances(q), before))
            leaves &= all(y.n_leaves <= x.n_leaves for x, y in zip(p.trees, q.trees))
            leaves &= max(y.n_leaves for y in q.trees) <= max(x.n_leaves for x in p.trees)
            shrink &= all(discrete_length(shrink_legs(t, eps, 4)) <= eps + 1e-12 for t in trees)
        legs_ok += legs
        leaves_ok += leaves
        shrink_ok += shrink
    ok = legs_ok == leaves_ok == shrink_ok == 100
    detail = f"leg d_B {legs_ok}/100, leaf count {leaves_ok}/100, shrink length {shrink_ok}/100"
    assert report(8, "pruning paths", ok, detail)


# 9 -------------------------------------------------------------------------


def test_09_metric_axioms():
    rng = rng_for(9)
    seed = draw_seed(rng)
    sym = tri = zero = 0
    zeros_seen = 0
    for i in range(100):
        t1, t2 = sample_pair(seed, i, 4)
        t3 = relabeled(t1) if rng.random() < 0.3 else random_tree(int(rng.integers(1, 5)), draw_seed(rng))
        d = {}
        for (a, x), (b, y) in permutations(enumerate((t1, t2, t3)), 2):
            d[a, b] = interleaving_distance_exact(x, y)[0]
        sym += all(d[a, b] == d[b, a] for a, b in d)
        tri += all(
            d[a, c] <= d[a, b] + d[b, c] + 1e-9
            for a in range(3) for b in range(3) for c in range(3)
            if len({a, b, c}) == 3
        )
        trees = (t1, t2, t3)
        zeros = [(a, b) for (a, b), v in d.items() if v == 0]
        zeros_seen += len(zeros) > 0
        zero += all(isomorphic(trees[a], trees[b]) for a, b in zeros)
    ok = sym == tri == zero == 100
    detail = (
        f"symmetry {sym}/100, triangle {tri}/100, zero implies isomorphic {zero}/100 "
        f"({zeros_seen} triples with a zero distance)"
    )
    assert report(9, "metric axioms", ok, detail)


# 10 ------------------------------------------------------------------------


def test_10_semigroup():
    rng = rng_for(10)
    good = 0
    for i in range(200):
        if i % 2:
            t = random_tree(int(rng.integers(1, 7)), draw_seed(rng))
        else:
            t = rough_tree(draw_seed(rng), int(rng.integers(1, 10)))
        # shift amounts on a dyadic grid, where float addition is exact
        a, b = (float(k) / 64 for k in rng.integers(0, 320, size=2))
        good += isomorphic(shift(shift(t, a), b), shift(t, a + b))
    assert report(10, "shift semigroup law", good == 200, f"{good}/200 cases")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
