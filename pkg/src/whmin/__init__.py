"""Whitehead minimization in free groups: exact, hybrid and probabilistic engines."""

from .automorphisms import (
    NielsenAut,
    WhiteheadAut,
    apply,
    apply_sequence,
    count_nielsen,
    count_whitehead,
    enumerate_nielsen,
    enumerate_whitehead,
    is_whitehead_minimal,
    parse_automorphism,
    random_whitehead,
)
from .classifier import WminModel, decide, load_model, mahalanobis_sq, save_model, train_wmin
from .datasets import DatasetSpec, LabeledWord, gen_dataset, read_dataset, write_dataset
from .engines import ReductionResult, SearchConfig, hdwr, hpwr, reduce_word, wlr, wr
from .features import build_graph, feature_vector
from .genetic import GaConfig, swr
from .heuristics import CentroidModel, centroid_order, max_edge_order, nielsen_first_order, train_centroids
from .words import RankMismatch, Word, WordError, cyclic_reduce, free_reduce

__version__ = "0.1.0"
