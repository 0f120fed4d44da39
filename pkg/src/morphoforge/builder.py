"""End-to-end estimator assembling the filament network in memory."""

from __future__ import annotations

from fractions import Fraction

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .analogy import enumerate_analogies
from .lexicon import Lexicon
from .network import (
    RelationGraph,
    bootstrap,
    extract_seed,
    merge_networks,
    network_filaments,
)
from .similarity import MorphologicalNeighbors


class FilamentNetworkBuilder(BaseEstimator):
    """Fit a morphological filament network on a lexicon.

    Runs the whole chain: similarity neighborhoods, analogy mining,
    relation graph, seed extraction, bootstrap, final merge.  Fitted
    attributes expose every intermediate stage.

    Parameters mirror the pipeline configuration; thresholds default to
    production values and are usually scaled down for small corpora.
    """

    def __init__(
        self,
        min_ngram: int = 3,
        n_neighbors: int = 100,
        w_threshold: int = 10,
        cc_threshold: float = 0.66,
        min_subseries: int = 5,
        max_iterations: int = 50,
        max_candidates: int | None = None,
    ):
        self.min_ngram = min_ngram
        self.n_neighbors = n_neighbors
        self.w_threshold = w_threshold
        self.cc_threshold = cc_threshold
        self.min_subseries = min_subseries
        self.max_iterations = max_iterations
        self.max_candidates = max_candidates

    def fit(self, lexicon: Lexicon, y=None):
        cc = Fraction(str(self.cc_threshold))
        if not 0 < cc <= 1:
            raise ValueError("cc_threshold must be in (0, 1]")
        self.neighbors_ = MorphologicalNeighbors(
            self.min_ngram, self.n_neighbors
        ).fit(lexicon)
        self.neighborhoods_ = self.neighbors_.all_neighborhoods()
        self.analogies_, self.report_ = enumerate_analogies(
            lexicon, self.neighborhoods_, self.max_candidates
        )
        if len(self.analogies_) == 0:
            self.graph_ = None
            self.seed_ = None
            self.network_ = None
            self.filaments_ = []
            return self
        tag_of = {e.orthographic: e.tag for e in lexicon}.__getitem__
        self.graph_ = RelationGraph(self.analogies_, tag_of)
        self.seed_ = extract_seed(self.graph_, self.w_threshold, cc)
        fixed_point = bootstrap(
            self.seed_, self.graph_, lexicon,
            self.min_subseries, self.max_iterations,
        )
        self.network_ = merge_networks(fixed_point, self.graph_, self.w_threshold)
        self.filaments_ = network_filaments(self.network_)
        return self

    def filaments(self):
        check_is_fitted(self, "filaments_")
        return self.filaments_
