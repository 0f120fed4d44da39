"""Morphological similarity via activation spreading on a bipartite graph.

Words are connected to their phoneme n-gram features; similarity to a
source word is the mass that reaches each word after two uniform stochastic
steps (word to features, features back to words).  Words sharing many rare
features end up close.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .lexicon import Lexicon, extract_features

MASS_TOLERANCE = 1e-9


class BipartiteGraph:
    """Word/feature incidence with row-stochastic spreading operators."""

    def __init__(self, lexicon: Lexicon, min_len: int = 3):
        if len(lexicon) == 0:
            raise ValueError("cannot build a graph from an empty lexicon")
        self.words: list[str] = lexicon.words()
        self.word_index: dict[str, int] = {w: i for i, w in enumerate(self.words)}

        feature_sets = [
            extract_features(entry.phonemes, min_len) for entry in lexicon
        ]
        names = sorted(set().union(*feature_sets))
        self.features: list[str] = names
        self.feature_index: dict[str, int] = {f: i for i, f in enumerate(names)}

        rows, cols = [], []
        for wi, feats in enumerate(feature_sets):
            for f in sorted(feats):
                rows.append(wi)
                cols.append(self.feature_index[f])
        data = np.ones(len(rows))
        self.incidence = sparse.csr_matrix(
            (data, (rows, cols)), shape=(len(self.words), len(names))
        )
        self.word_degree = np.asarray(self.incidence.sum(axis=1)).ravel()
        self.feature_degree = np.asarray(self.incidence.sum(axis=0)).ravel()
        # row-stochastic word -> feature and feature -> word operators
        self._to_features = sparse.diags(1.0 / self.word_degree) @ self.incidence
        self._to_words = (
            sparse.diags(1.0 / self.feature_degree) @ self.incidence.T
        ).tocsr()

    def word_features(self, word: str) -> set[str]:
        wi = self.word_index[word]
        row = self.incidence.getrow(wi)
        return {self.features[j] for j in row.indices}

    def spread(self, word: str) -> np.ndarray:
        """Two-step activation vector from a unit mass on word."""
        if word not in self.word_index:
            raise KeyError(f"unknown word {word!r}")
        wi = self.word_index[word]
        on_features = self._to_features.getrow(wi)
        activation = (on_features @ self._to_words).toarray().ravel()
        total = activation.sum()
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise AssertionError(f"activation mass {total!r} not conserved")
        return activation


class MorphologicalNeighbors(BaseEstimator):
    """Nearest-neighbor model over the bipartite similarity graph.

    Parameters
    ----------
    min_ngram : minimum feature window length in positions (markers count).
    n_neighbors : default neighborhood size for kneighbors.
    """

    def __init__(self, min_ngram: int = 3, n_neighbors: int = 100):
        self.min_ngram = min_ngram
        self.n_neighbors = n_neighbors

    def fit(self, lexicon: Lexicon, y=None):
        if self.min_ngram < 1:
            raise ValueError("min_ngram must be >= 1")
        if self.n_neighbors < 1:
            raise ValueError("n_neighbors must be >= 1")
        self.graph_ = BipartiteGraph(lexicon, self.min_ngram)
        return self

    def activation(self, word: str) -> dict[str, float]:
        """Post-spread mass per word, zero entries omitted."""
        check_is_fitted(self, "graph_")
        vec = self.graph_.spread(word)
        return {
            self.graph_.words[i]: float(vec[i]) for i in np.flatnonzero(vec)
        }

    def kneighbors(self, word: str, n_neighbors: int | None = None) -> list[tuple[str, float]]:
        """Top words by activation, source excluded, ties broken by spelling.

        Only words with strictly positive activation are returned, so the
        list may be shorter than requested.
        """
        check_is_fitted(self, "graph_")
        k = self.n_neighbors if n_neighbors is None else n_neighbors
        if k < 1:
            raise ValueError("n_neighbors must be >= 1")
        scores = self.activation(word)
        scores.pop(word, None)
        ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
        return ranked[:k]

    def all_neighborhoods(self, n_neighbors: int | None = None) -> dict[str, list[tuple[str, float]]]:
        """Neighbor lists for every word, in lexicon order."""
        check_is_fitted(self, "graph_")
        return {
            word: self.kneighbors(word, n_neighbors)
            for word in self.graph_.words
        }
