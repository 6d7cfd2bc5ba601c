"""Metric geometry on merge trees: barcodes, bottleneck and interleaving
distances, chambers where the two agree, and discrete paths between trees."""

from .barcode import (
    Barcode,
    Interval,
    PartialMatching,
    bottleneck,
    bottleneck_bruteforce,
    elder_rule,
    filtration_barcode_oracle,
    matching_cost,
)
from .errors import MergeTreeError
from .interleaving import (
    InterleavingWitness,
    best_labeled_upper_bound,
    cophenetic_upper_bound,
    decide_interleaving,
    interleaving_distance_exact,
)
from .tree import (
    CopheneticMatrix,
    MergeTree,
    PointOnTree,
    add_padding_leaves,
    cophenetic_matrix,
    isomorphic,
    lca,
    perturb_leaf_heights,
    random_tree,
    reconstruct_from_matrix,
    shift,
    trivial_interleaving_bound,
    validate,
)

__version__ = "0.1.0"
