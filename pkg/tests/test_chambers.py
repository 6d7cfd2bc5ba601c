import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mergemetrics import (
    bottleneck,
    decide_interleaving,
    elder_rule,
    interleaving_distance_exact,
    isomorphic,
    random_tree,
    reconstruct_from_matrix,
    validate,
)
from mergemetrics.chambers import (
    ascending_matrix,
    chamber_distance,
    chamber_linear_path,
    chamber_resample,
    chamber_signature,
    elder_right_endpoints,
    matching_lower_bound,
    same_chamber,
)
from mergemetrics.errors import DuplicateLeafHeights, NotSameChamber
from mergemetrics.interleaving import check_witness
from mergemetrics.paths import discrete_length, leg_distances
from mergemetrics.tree import check_three_point

from conftest import binary_trees, seeds


def test_signature_examples(t_a, t_b, t_c):
    sig = chamber_signature(t_a)
    assert sig.n == 2
    # pairs (0,0), (0,1), (1,1) hold 0, 3, 1
    assert sig.ranking == (0, 2, 1)
    assert chamber_signature(t_b) == sig
    assert same_chamber(t_a, t_b)
    assert not same_chamber(t_a, t_c)
    assert same_chamber(t_c, t_c)


def test_signature_needs_distinct_leaf_heights():
    with pytest.raises(DuplicateLeafHeights):
        chamber_signature(validate([(0, 2), (0, 2), (2, None)]))


def test_ascending_matrix_orders_leaves(t_c):
    m = ascending_matrix(t_c)
    assert np.diag(m).tolist() == [0, 1, 2]


def test_chamber_distance_examples(t_a, t_b, t_c):
    assert chamber_distance(t_a, t_b) == 1
    assert chamber_distance(t_c, t_c) == 0
    with pytest.raises(NotSameChamber):
        chamber_distance(t_a, t_c)
    with pytest.raises(NotSameChamber):
        matching_lower_bound(t_a, t_c)


def test_elder_right_endpoints_examples(t_a, t_c):
    assert elder_right_endpoints(t_a) == [math.inf, 3]
    assert elder_right_endpoints(t_c) == [math.inf, 4, 2.5]
    assert elder_right_endpoints(validate([(1, None)])) == [math.inf]


def test_matching_lower_bound_example(t_a, t_b):
    assert matching_lower_bound(t_a, t_b) == 1


def test_linear_path_example(t_a, t_b):
    p = chamber_linear_path(t_a, t_b, 2)
    assert p.trees[1].root_height == 2.5
    assert p.trees[0] is t_a and p.trees[2] is t_b
    assert discrete_length(p) == 1


@given(binary_trees(5), seeds)
def test_resample_stays_in_chamber(t, seed):
    r = chamber_resample(t, seed)
    assert same_chamber(t, r)


def shortest_half_bar(*trees):
    return min(
        (iv.death - iv.birth) / 2 for t in trees for iv in elder_rule(t) if iv.death < math.inf
    )


@settings(max_examples=40)
@given(binary_trees(4), seeds)
def test_in_chamber_bounds(t, seed):
    r = chamber_resample(t, seed)
    d = chamber_distance(t, r)
    d_b = bottleneck(elder_rule(t), elder_rule(r))[0]
    d_i = interleaving_distance_exact(t, r, cross_check=False)[0]
    assert matching_lower_bound(t, r) == d
    assert d_b <= d_i <= d


@settings(max_examples=40)
@given(binary_trees(4), seeds, st.integers(1, 4))
def test_in_chamber_equality_for_nearby_pairs(t, seed, k):
    # walk a short way towards a same-chamber tree so every bar outlasts the gap
    r = chamber_resample(t, seed)
    m0, m1 = ascending_matrix(t), ascending_matrix(r)
    for steps in (2**j for j in range(4, 12)):
        mt = m0 + (k / steps) * (m1 - m0)
        near = reconstruct_from_matrix(np.diag(mt), mt)
        if t.n_leaves < 2 or chamber_distance(t, near) <= shortest_half_bar(t, near):
            break
    d = chamber_distance(t, near)
    assert bottleneck(elder_rule(t), elder_rule(near))[0] == d
    assert interleaving_distance_exact(t, near, cross_check=False)[0] == d


def test_far_same_chamber_pair_breaks_equality():
    # the short bar of t is cheaper to leave unmatched than to pair
    t = validate([(0, 2), (8, 2), (8.5, None)])
    r = validate([(0, 2), (2, 2), (8.5, None)])
    assert same_chamber(t, r)
    assert chamber_distance(t, r) == matching_lower_bound(t, r) == 6
    assert bottleneck(elder_rule(t), elder_rule(r))[0] == 3.25
    assert interleaving_distance_exact(t, r, full_scan=True)[0] == 3.25


def test_same_chamber_pair_with_bottleneck_below_interleaving():
    t = validate([(2, 5), (2.375, 4), (3.4375, 4), (6.75, 6), (6.875, 5), (8, 6), (9, None)])
    r = validate(
        [(3.125, 5), (3.5, 4), (3.6875, 4), (3.8125, 6), (5.4375, 5), (5.9375, 6), (6.375, None)]
    )
    assert same_chamber(t, r)
    assert bottleneck(elder_rule(t), elder_rule(r))[0] == 1.625
    d_i, w = interleaving_distance_exact(t, r, full_scan=True)
    assert d_i == 1.71875 and check_witness(t, r, w)
    assert decide_interleaving(t, r, 1.625) is None


@given(binary_trees(5), seeds)
def test_endpoint_order_is_shared_in_chamber(t, seed):
    r = chamber_resample(t, seed)
    a, b = elder_right_endpoints(t), elder_right_endpoints(r)
    for j in range(len(a)):
        for k in range(len(a)):
            assert (a[j] <= a[k]) == (b[j] <= b[k])


@given(binary_trees(5), seeds)
def test_linear_path_stays_in_chamber(t, seed):
    r = chamber_resample(t, seed)
    p = chamber_linear_path(t, r, 8)
    m0, m1 = ascending_matrix(t), ascending_matrix(r)
    for k in range(9):
        assert check_three_point((1 - k / 8) * m0 + k / 8 * m1) is None
    for w in p.trees:
        assert same_chamber(w, t)
    assert isomorphic(p.trees[0], t) and isomorphic(p.trees[-1], r)
    d = chamber_distance(t, r)
    assert max(leg_distances(p)) <= d / 8
    # with legs short against every bar, the legs add up exactly (dyadic values)
    if t.n_leaves == 1 or d / 8 <= shortest_half_bar(t, r):
        assert discrete_length(p) == d


def test_constant_linear_path():
    t = random_tree(4, seed=11)
    assert discrete_length(chamber_linear_path(t, t, 5)) == 0
