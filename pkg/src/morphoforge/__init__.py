"""Lexeme-based morphological network construction from phonetized lexicons."""

from .lexicon import (
    Lexicon,
    LexiconEntry,
    PhonemeString,
    extract_features,
    load_lexicon,
    parse_lexicon,
    phoneme_length,
)
from .analogy import (
    AnalogySet,
    check_analogy,
    enumerate_analogies,
    oracle_analogy,
    permutation_orbit,
    signature,
)
from .similarity import BipartiteGraph, MorphologicalNeighbors
from .network import (
    Filament,
    RelationGraph,
    SeedNetwork,
    bootstrap,
    clustering_coefficient,
    clustering_reduce,
    extract_seed,
    filaments_of,
    merge_networks,
    network_filaments,
    reliable_families,
    type_analogy,
)
from .builder import FilamentNetworkBuilder

__version__ = "0.1.0"
