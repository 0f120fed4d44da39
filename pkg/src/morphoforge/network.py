"""Relation graph over mined analogies: edge typing, seed extraction and
bootstrapping to a fixed point.

Edges connect the first pair of every analogy in the permutation-closed
set.  Tags split them into family and series readings; weight and
clustering thresholds isolate a high-precision seed which is then grown
through the transitive closures of its families.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .analogy import AnalogySet, check_analogy, permutation_orbit, tag_prune
from .lexicon import Lexicon

FAMILY = "f"
SERIES = "s"
UNTYPED = "u"

Edge = tuple[str, str]
Quad = tuple[str, str, str, str]


class IterationLimitError(RuntimeError):
    """The bootstrap hit its iteration cap before reaching a fixed point."""


def type_analogy(quad: Quad, tag_of: Callable[[str], str]) -> str:
    """Tag-based typing: family when the pair tags differ, series when the
    cross tags differ, untyped when all four agree."""
    a, b, c, _ = quad
    if tag_of(a) != tag_of(b):
        return FAMILY
    if tag_of(a) != tag_of(c):
        return SERIES
    return UNTYPED


class RelationGraph:
    """Weighted word graph induced by a permutation-closed analogy set."""

    def __init__(self, analogies: AnalogySet, tag_of: Callable[[str], str]):
        if len(analogies) == 0:
            raise ValueError("cannot build a graph from an empty analogy set")
        self.analogies = analogies
        self.tag_of = tag_of
        closed = analogies.closed()
        self.closed = closed

        self.weights: dict[Edge, int] = defaultdict(int)
        self.series_of_pair: dict[Edge, set[str]] = defaultdict(set)
        self.family_candidates: set[Edge] = set()
        for quad in closed:
            a, b, c, _ = quad
            edge = (a, b)
            self.weights[edge] += 1
            self.series_of_pair[edge].add(c)
            if type_analogy(quad, tag_of) in (FAMILY, UNTYPED):
                self.family_candidates.add(edge)
        self.weights = dict(self.weights)
        self.series_of_pair = dict(self.series_of_pair)

    @property
    def edges(self) -> set[Edge]:
        return set(self.weights)

    @property
    def vertices(self) -> set[str]:
        out = set()
        for a, b in self.weights:
            out.add(a)
            out.add(b)
        return out

    def weight(self, edge: Edge) -> int:
        return self.weights.get(edge, 0)

    def sub_series(self, a: str, b: str) -> set[str]:
        """Words c forming an analogy a:b::c:d, for the pivot b of a."""
        return set(self.series_of_pair.get((a, b), ()))


def reliable_families(graph: RelationGraph, threshold: int = 10) -> set[Edge]:
    """Family-candidate edges carried by at least threshold analogies."""
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    return {
        e for e in graph.family_candidates if graph.weights[e] >= threshold
    }


def induced_series(graph: RelationGraph, family_edges: set[Edge]) -> set[Edge]:
    """Serial edges licensed by reliable family edges: for every analogy
    a:b::c:d whose first pair is a reliable family edge, both (a,c) and
    (b,d) are serial."""
    out = set()
    edge_set = graph.edges
    for quad in graph.closed:
        a, b, c, d = quad
        if (a, b) in family_edges:
            if (a, c) in edge_set:
                out.add((a, c))
            if (b, d) in edge_set:
                out.add((b, d))
    return out


def series_map(serial_edges: set[Edge]) -> dict[str, set[str]]:
    out: dict[str, set[str]] = defaultdict(set)
    for a, c in serial_edges:
        out[a].add(c)
    return dict(out)


def clustering_coefficient(
    a: str, c: str, s0: dict[str, set[str]]
) -> Fraction:
    """Triangles over triples for c inside the series of a, as an exact
    ratio.  Defined as 0 when a has fewer than two series members."""
    series_a = s0.get(a, set())
    if len(series_a) < 2:
        return Fraction(0)
    series_c = s0.get(c, set())
    triangles = len((series_a - {c}) & (series_c - {a}))
    return Fraction(triangles, len(series_a) - 1)


def clustering_reduce(
    a: str, s0: dict[str, set[str]], threshold: Fraction
) -> set[str]:
    """Central cluster of the series of a: members whose coefficient
    reaches the threshold.  Series of fewer than two words reduce to
    nothing."""
    series_a = s0.get(a, set())
    if len(series_a) < 2:
        return set()
    return {
        c for c in series_a
        if clustering_coefficient(a, c, s0) >= threshold
    }


@dataclass
class SeedNetwork:
    """Typed relation network; bootstrap iterations only ever add to it."""

    family_edges: set[Edge] = field(default_factory=set)
    serial_edges: set[Edge] = field(default_factory=set)
    analogies: set[Quad] = field(default_factory=set)
    iteration: int = 0

    def copy(self) -> "SeedNetwork":
        return SeedNetwork(
            set(self.family_edges),
            set(self.serial_edges),
            set(self.analogies),
            self.iteration,
        )

    def __le__(self, other: "SeedNetwork") -> bool:
        return (
            self.family_edges <= other.family_edges
            and self.serial_edges <= other.serial_edges
        )

    def same_edges(self, other: "SeedNetwork") -> bool:
        return (
            self.family_edges == other.family_edges
            and self.serial_edges == other.serial_edges
        )


def extract_seed(
    graph: RelationGraph,
    w_threshold: int = 10,
    cc_threshold: Fraction = Fraction(66, 100),
) -> SeedNetwork:
    """Initial high-precision network: reliable family edges whose
    sub-series meet the central cluster of the entry's series, plus the
    serial relations those edges induce."""
    f0 = reliable_families(graph, w_threshold)
    s0_edges = induced_series(graph, f0)
    s0 = series_map(s0_edges)
    reduced = {a: clustering_reduce(a, s0, cc_threshold) for a in s0}

    kept_families = set()
    for a, b in f0:
        if graph.sub_series(a, b) & reduced.get(a, set()):
            kept_families.add((a, b))

    seed = SeedNetwork()
    seed.family_edges = kept_families
    seed.serial_edges = induced_series(graph, kept_families)
    for quad in graph.closed:
        if (quad[0], quad[1]) in kept_families:
            seed.analogies.add(quad)
    return seed


def family_components(family_edges: set[Edge]) -> list[set[str]]:
    """Connected components of the family subgraph, the transitive closure
    of the family relation."""
    adjacency: dict[str, set[str]] = defaultdict(set)
    for a, b in family_edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    seen: set[str] = set()
    components = []
    for start in sorted(adjacency):
        if start in seen:
            continue
        stack = [start]
        component = set()
        while stack:
            node = stack.pop()
            if node in component:
                continue
            component.add(node)
            stack.extend(adjacency[node] - component)
        seen |= component
        components.append(component)
    return components


def bootstrap(
    seed: SeedNetwork,
    graph: RelationGraph,
    lexicon: Lexicon,
    min_subseries: int = 5,
    max_iterations: int = 50,
) -> SeedNetwork:
    """Grow the seed to a fixed point.

    Each step pairs words inside the transitive closures of the current
    families, re-verifies the implied analogies with the signature checker
    on both phonemic and written forms, keeps only edges already present
    in the relation graph, and (from the second growth step on) drops new
    filaments whose sub-series stays below min_subseries.
    """
    if not seed.family_edges:
        return seed.copy()
    marked = {e.orthographic: e.phonemes.marked() for e in lexicon}
    tags = {e.orthographic: e.tag for e in lexicon}
    graph_edges = graph.edges
    phon_cache: dict = {}
    orth_cache: dict = {}

    current = seed.copy()
    checked: set[Quad] = set(current.analogies)
    for step in range(max_iterations):
        components = family_components(current.family_edges)
        pairs: list[Edge] = []
        for component in components:
            members = sorted(component)
            for x in members:
                for y in members:
                    if x != y:
                        pairs.append((x, y))

        verified: set[Quad] = set()
        for a, b in pairs:
            for c, d in pairs:
                quad = (a, b, c, d)
                if quad in checked or (c, d) == (a, b):
                    continue
                checked.add(quad)
                if not tag_prune(tags[a], tags[b], tags[c], tags[d]):
                    continue
                if not check_analogy(
                    marked[a], marked[b], marked[c], marked[d], phon_cache
                ):
                    continue
                if not check_analogy(
                    tuple(a), tuple(b), tuple(c), tuple(d), orth_cache
                ):
                    continue
                verified.add(quad)

        # close under permutations, then reduce the induced edges to their
        # intersection with the relation graph
        closed: set[Quad] = set()
        for quad in verified:
            closed.update(permutation_orbit(quad))
        checked.update(closed)
        family_series: dict[Edge, set[str]] = defaultdict(set)
        family_quads: dict[Edge, set[Quad]] = defaultdict(set)
        serial_quads: dict[Edge, set[Quad]] = defaultdict(set)
        for quad in sorted(closed):
            a, b, c, _ = quad
            if (a, b) not in graph_edges:
                continue
            if type_analogy(quad, graph.tag_of) in (FAMILY, UNTYPED):
                family_series[(a, b)].add(c)
                family_quads[(a, b)].add(quad)
            else:
                serial_quads[(a, b)].add(quad)

        if step >= 2 and min_subseries > 0:
            family_series = {
                e: members for e, members in family_series.items()
                if len(members) >= min_subseries
            }

        new_family = set(family_series) - current.family_edges
        new_serial = set(serial_quads) - current.serial_edges
        new_quads: set[Quad] = set()
        for e in family_series:
            new_quads.update(family_quads[e])
        for e in serial_quads:
            new_quads.update(serial_quads[e])
        new_quads -= current.analogies

        if not new_family and not new_serial and not new_quads:
            current.iteration = step
            return current
        current.family_edges |= new_family
        current.serial_edges |= set(serial_quads)
        current.analogies |= new_quads
    raise IterationLimitError(
        f"no fixed point within {max_iterations} iterations"
    )


def merge_networks(fixed_point: SeedNetwork, graph: RelationGraph,
                   w_threshold: int) -> SeedNetwork:
    """Union of the bootstrap fixed point with the thresholded subgraph the
    seed was drawn from (reliable families plus their induced series)."""
    f0 = reliable_families(graph, w_threshold)
    s0 = induced_series(graph, f0)
    merged = fixed_point.copy()
    merged.family_edges |= f0
    merged.serial_edges |= s0
    for quad in graph.closed:
        if (quad[0], quad[1]) in merged.family_edges:
            merged.analogies.add(quad)
    return merged


@dataclass(frozen=True)
class Filament:
    """One resource record: an entry, a family pivot, and the sub-series of
    the entry under that pivot."""

    entry: str
    pivot: str
    sub_series: tuple[str, ...]


def filaments_of(
    entry: str,
    analogies: Iterable[Quad],
    pivots: set[str] | None = None,
) -> list[Filament]:
    """Filaments of one entry: a filament per family pivot with a
    non-empty sub-series, drawn from the stored analogies whose first pair
    is (entry, pivot)."""
    series: dict[str, set[str]] = defaultdict(set)
    for a, b, c, _ in analogies:
        if a != entry:
            continue
        if pivots is not None and b not in pivots:
            continue
        series[b].add(c)
    return [
        Filament(entry, pivot, tuple(sorted(members)))
        for pivot, members in sorted(series.items())
        if members
    ]


def network_filaments(network: SeedNetwork) -> list[Filament]:
    """All filaments of a network: one per family edge, sub-series drawn
    from the stored analogies."""
    series: dict[Edge, set[str]] = defaultdict(set)
    for a, b, c, _ in network.analogies:
        if (a, b) in network.family_edges:
            series[(a, b)].add(c)
    return [
        Filament(a, b, tuple(sorted(members)))
        for (a, b), members in sorted(series.items())
        if members
    ]
