"""Batch pipeline: stage orchestration, line-oriented checkpoints, resource
export and statistics.

Every artifact is a sorted, tab-separated UTF-8 file so that runs are
reproducible byte for byte and recounts stay trivial.  A manifest ties the
checkpoints in an output directory to the configuration hash that produced
them; reruns with a different configuration refuse to reuse them unless
forced.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field, asdict
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .analogy import AnalogySet, enumerate_analogies
from .lexicon import Lexicon, load_lexicon
from .network import (
    Filament,
    RelationGraph,
    SeedNetwork,
    bootstrap,
    extract_seed,
    merge_networks,
    network_filaments,
    type_analogy,
)
from .similarity import MorphologicalNeighbors


class PipelineError(RuntimeError):
    """A stage failed; the message is prefixed with the stage name."""


class StaleCheckpointError(PipelineError):
    """Checkpoints in the output directory came from another configuration."""


@dataclass
class PipelineConfig:
    lexicon: str
    output_dir: str
    min_ngram: int = 3
    neighbors: int = 100
    w_threshold: int = 10
    cc_threshold: float = 0.66
    min_subseries: int = 5
    max_iterations: int = 50
    max_candidates: int | None = None

    def __post_init__(self):
        if self.min_ngram < 1 or self.neighbors < 1 or self.w_threshold < 1:
            raise ValueError("min_ngram, neighbors and w_threshold must be positive")
        if self.min_subseries < 1 or self.max_iterations < 1:
            raise ValueError("min_subseries and max_iterations must be positive")
        if not 0 < Fraction(str(self.cc_threshold)) <= 1:
            raise ValueError("cc_threshold must be in (0, 1]")

    @property
    def cc_fraction(self) -> Fraction:
        return Fraction(str(self.cc_threshold))

    def config_hash(self) -> str:
        payload = asdict(self)
        payload.pop("output_dir")
        blob = json.dumps(payload, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    @classmethod
    def from_file(cls, path, **overrides) -> "PipelineConfig":
        path = Path(path)
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise PipelineError(f"config: unknown keys {sorted(unknown)}")
        # paths in the file are relative to the file itself
        for key in ("lexicon", "output_dir"):
            if key in raw and not Path(raw[key]).is_absolute():
                raw[key] = str(path.parent / raw[key])
        raw.update({k: v for k, v in overrides.items() if v is not None})
        if "lexicon" not in raw or "output_dir" not in raw:
            raise PipelineError("config: lexicon and output_dir are required")
        return cls(**raw)


@dataclass
class NetworkStats:
    entry_count: int
    filament_count: int
    serial_relation_count: int
    average_subseries: str
    counters: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "entry_count": self.entry_count,
            "filament_count": self.filament_count,
            "serial_relation_count": self.serial_relation_count,
            "average_subseries": self.average_subseries,
            "counters": dict(sorted(self.counters.items())),
        }


def render_average(numerator: int, denominator: int) -> str:
    """Exact rational average rendered to two decimals."""
    if denominator == 0:
        return "0.00"
    with localcontext() as ctx:
        ctx.prec = 50
        value = Decimal(numerator) / Decimal(denominator)
        return str(value.quantize(Decimal("0.01")))


# --- checkpoint files ---------------------------------------------------

NEIGHBORHOODS_FILE = "neighborhoods.tsv"
ANALOGIES_FILE = "analogies.tsv"
REPORT_FILE = "report.json"
EDGES_FILE = "edges.tsv"
SEED_FILE = "seed.tsv"
NETWORK_FILE = "network.tsv"
NETWORK_QUADS_FILE = "network_quads.tsv"
ITERATION_FILE = "bootstrap_{:02d}.tsv"
FILAMENTS_FILE = "filaments.tsv"
STATS_FILE = "stats.json"
MANIFEST_FILE = "manifest.json"


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def write_neighborhoods(path, neighborhoods: dict[str, list[tuple[str, float]]]):
    lines = []
    for word in neighborhoods:
        cells = [word]
        for neighbor, activation in neighborhoods[word]:
            if ":" in neighbor:
                raise PipelineError(f"neighbors: {neighbor!r} contains ':'")
            cells.append(f"{neighbor}:{activation!r}")
        lines.append("\t".join(cells))
    _write(Path(path), "".join(line + "\n" for line in lines))


def load_neighborhoods(path) -> dict[str, list[tuple[str, float]]]:
    out: dict[str, list[tuple[str, float]]] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            cells = line.rstrip("\n").split("\t")
            word, pairs = cells[0], cells[1:]
            ranked = []
            for cell in pairs:
                neighbor, _, activation = cell.rpartition(":")
                ranked.append((neighbor, float(activation)))
            out[word] = ranked
    return out


def write_analogies(path, analogies: AnalogySet, tag_of):
    lines = []
    for rep in analogies.sorted_representatives():
        lines.append("\t".join(rep) + "\t" + type_analogy(rep, tag_of))
    _write(Path(path), "".join(line + "\n" for line in lines))


def load_analogies(path) -> AnalogySet:
    reps = set()
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            cells = line.rstrip("\n").split("\t")
            reps.add(tuple(cells[:4]))
    return AnalogySet(reps)


def write_edges(path, graph: RelationGraph):
    lines = []
    for edge in sorted(graph.weights):
        kinds = set()
        if edge in graph.family_candidates:
            kinds.add("f")
        kinds = "".join(sorted(kinds)) or "s"
        lines.append(f"{edge[0]}\t{edge[1]}\t{kinds}\t{graph.weights[edge]}")
    _write(Path(path), "".join(line + "\n" for line in lines))


def write_typed_edges(path, network: SeedNetwork):
    lines = []
    for a, b in sorted(network.family_edges):
        lines.append(f"f\t{a}\t{b}")
    for a, b in sorted(network.serial_edges):
        lines.append(f"s\t{a}\t{b}")
    _write(Path(path), "".join(line + "\n" for line in lines))


def load_typed_edges(path) -> SeedNetwork:
    network = SeedNetwork()
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            kind, a, b = line.rstrip("\n").split("\t")
            if kind == "f":
                network.family_edges.add((a, b))
            else:
                network.serial_edges.add((a, b))
    return network


def write_quads(path, quads):
    lines = ["\t".join(q) for q in sorted(quads)]
    _write(Path(path), "".join(line + "\n" for line in lines))


def load_quads(path) -> set:
    out = set()
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            out.add(tuple(line.rstrip("\n").split("\t")))
    return out


def export_filaments(path, filaments):
    """One record per filament: entry, pivot, then the sub-series members
    space-separated and sorted; records sorted by entry then pivot."""
    lines = []
    for filament in filaments:
        members = " ".join(filament.sub_series)
        lines.append(f"{filament.entry}\t{filament.pivot}\t{members}")
    _write(Path(path), "".join(line + "\n" for line in lines))


def load_filaments(path) -> list[tuple[str, str, tuple[str, ...]]]:
    out = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            entry, pivot, members = line.rstrip("\n").split("\t")
            out.append((entry, pivot, tuple(members.split(" "))))
    return out


def compute_stats(filaments, counters=None) -> NetworkStats:
    entries = {f.entry for f in filaments}
    serial = sum(len(f.sub_series) for f in filaments)
    return NetworkStats(
        entry_count=len(entries),
        filament_count=len(filaments),
        serial_relation_count=serial,
        average_subseries=render_average(serial, len(filaments)),
        counters=dict(counters or {}),
    )


# --- manifest and stage orchestration ------------------------------------

class PipelineRun:
    """Stage runner bound to one configuration and output directory."""

    def __init__(self, config: PipelineConfig, force: bool = False):
        self.config = config
        self.out = Path(config.output_dir)
        self.force = force
        self._lexicon: Lexicon | None = None
        self._check_manifest()

    def _check_manifest(self):
        manifest_path = self.out / MANIFEST_FILE
        current = self.config.config_hash()
        if manifest_path.exists():
            with open(manifest_path, encoding="utf-8") as handle:
                manifest = json.load(handle)
            if manifest.get("config_hash") != current and not self.force:
                raise StaleCheckpointError(
                    "manifest: output directory was produced with a different "
                    "configuration; rerun with force to overwrite"
                )
        self.out.mkdir(parents=True, exist_ok=True)
        echo = asdict(self.config)
        echo.pop("output_dir")
        _write(manifest_path, json.dumps(
            {"config_hash": current, "config": echo},
            indent=2, sort_keys=True) + "\n")

    # stage inputs, loaded lazily from files when not in memory
    @property
    def lexicon(self) -> Lexicon:
        if self._lexicon is None:
            try:
                self._lexicon = load_lexicon(self.config.lexicon)
            except OSError as exc:
                raise PipelineError(f"lexicon: {exc}") from exc
            if len(self._lexicon) == 0:
                raise PipelineError("lexicon: no entries")
        return self._lexicon

    def tag_of(self, word: str) -> str:
        return self.lexicon[word].tag

    def stage_neighbors(self) -> dict[str, list[tuple[str, float]]]:
        model = MorphologicalNeighbors(
            self.config.min_ngram, self.config.neighbors
        ).fit(self.lexicon)
        neighborhoods = model.all_neighborhoods()
        write_neighborhoods(self.out / NEIGHBORHOODS_FILE, neighborhoods)
        return neighborhoods

    def stage_analogies(self, report_path=None) -> AnalogySet:
        path = self.out / NEIGHBORHOODS_FILE
        if not path.exists():
            self.stage_neighbors()
        neighborhoods = load_neighborhoods(path)
        analogies, counters = enumerate_analogies(
            self.lexicon, neighborhoods, self.config.max_candidates
        )
        write_analogies(self.out / ANALOGIES_FILE, analogies, self.tag_of)
        report = json.dumps(counters, indent=2, sort_keys=True) + "\n"
        _write(self.out / REPORT_FILE, report)
        if report_path is not None:
            _write(Path(report_path), report)
        return analogies

    def _graph(self) -> RelationGraph | None:
        path = self.out / ANALOGIES_FILE
        if not path.exists():
            self.stage_analogies()
        analogies = load_analogies(path)
        if len(analogies) == 0:
            return None
        return RelationGraph(analogies, self.tag_of)

    def stage_seed(self) -> SeedNetwork:
        graph = self._graph()
        if graph is None:
            seed = SeedNetwork()
            _write(self.out / EDGES_FILE, "")
        else:
            write_edges(self.out / EDGES_FILE, graph)
            seed = extract_seed(
                graph, self.config.w_threshold, self.config.cc_fraction
            )
        write_typed_edges(self.out / SEED_FILE, seed)
        write_quads(self.out / (SEED_FILE + ".quads"), seed.analogies)
        return seed

    def stage_bootstrap(self) -> SeedNetwork:
        seed_path = self.out / SEED_FILE
        if not seed_path.exists():
            self.stage_seed()
        graph = self._graph()
        seed = load_typed_edges(seed_path)
        seed.analogies = load_quads(self.out / (SEED_FILE + ".quads"))
        if graph is None:
            network = seed
        else:
            fixed_point = bootstrap(
                seed, graph, self.lexicon,
                self.config.min_subseries, self.config.max_iterations,
            )
            write_typed_edges(
                self.out / ITERATION_FILE.format(fixed_point.iteration), fixed_point
            )
            network = merge_networks(fixed_point, graph, self.config.w_threshold)
        write_typed_edges(self.out / NETWORK_FILE, network)
        write_quads(self.out / NETWORK_QUADS_FILE, network.analogies)
        return network

    def stage_export(self) -> list:
        network_path = self.out / NETWORK_FILE
        if not network_path.exists():
            self.stage_bootstrap()
        network = load_typed_edges(network_path)
        network.analogies = load_quads(self.out / NETWORK_QUADS_FILE)
        filaments = network_filaments(network)
        export_filaments(self.out / FILAMENTS_FILE, filaments)
        return filaments

    def stage_stats(self) -> NetworkStats:
        filaments_path = self.out / FILAMENTS_FILE
        if not filaments_path.exists():
            self.stage_export()
        filaments = [
            Filament(entry, pivot, members)
            for entry, pivot, members in load_filaments(filaments_path)
        ]
        counters = {}
        report_path = self.out / REPORT_FILE
        if report_path.exists():
            with open(report_path, encoding="utf-8") as handle:
                counters = json.load(handle)
        stats = compute_stats(filaments, counters)
        _write(self.out / STATS_FILE,
               json.dumps(stats.as_dict(), indent=2, sort_keys=True) + "\n")
        return stats


STAGES = ("neighbors", "analogies", "seed", "bootstrap", "export", "stats")


def run_pipeline(config: PipelineConfig, force: bool = False) -> NetworkStats:
    """Run every stage in order and return the final statistics."""
    run = PipelineRun(config, force)
    stage = "lexicon"
    try:
        _ = run.lexicon
        for stage in STAGES:
            result = getattr(run, f"stage_{stage}")()
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(f"{stage}: {exc}") from exc
    return result
