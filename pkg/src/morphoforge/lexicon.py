"""Lexicon ingestion and phonemic feature extraction.

The input is a tab-separated file with three columns per record: the written
headword, its phonemic transcription as a concatenation of two-character
codes (no boundary markers), and a morphosyntactic tag.  Lines starting with
"#" are comments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO

BOUNDARY = "##"


class LexiconError(ValueError):
    """Base error for lexicon parsing problems."""


class ParseError(LexiconError):
    """A record is malformed; the message names the offending line."""


class DuplicateEntryError(LexiconError):
    """Two records share the same written form."""


@dataclass(frozen=True)
class PhonemeString:
    """A sequence of two-character phoneme codes."""

    codes: tuple[str, ...]

    def __post_init__(self):
        for code in self.codes:
            if len(code) != 2:
                raise LexiconError(f"phoneme code {code!r} is not two characters")
            if "#" in code:
                raise LexiconError(f"phoneme code {code!r} contains a marker character")

    @classmethod
    def from_text(cls, text: str) -> "PhonemeString":
        """Split a concatenated code string such as 'kkonssttan' into codes."""
        if len(text) % 2 != 0:
            raise LexiconError(f"phoneme string {text!r} has odd length")
        return cls(tuple(text[i:i + 2] for i in range(0, len(text), 2)))

    @property
    def body(self) -> str:
        return "".join(self.codes)

    @property
    def length(self) -> int:
        return len(self.codes)

    def marked(self) -> tuple[str, ...]:
        """The code sequence with boundary markers prepended and appended.

        This is the single place markers get attached; both feature
        extraction and phonemic analogy checking go through it.
        """
        return (BOUNDARY,) + self.codes + (BOUNDARY,)

    def marked_text(self) -> str:
        return BOUNDARY + self.body + BOUNDARY


@dataclass(frozen=True)
class LexiconEntry:
    orthographic: str
    phonemes: PhonemeString
    tag: str

    def __post_init__(self):
        if not self.orthographic:
            raise LexiconError("empty written form")
        if not self.phonemes.codes:
            raise LexiconError(f"entry {self.orthographic!r} has no phonemes")
        if not self.tag:
            raise LexiconError(f"entry {self.orthographic!r} has an empty tag")


class Lexicon:
    """An ordered collection of entries, indexed by written form."""

    def __init__(self, entries: Iterable[LexiconEntry]):
        self.entries: list[LexiconEntry] = list(entries)
        self.index: dict[str, int] = {}
        for pos, entry in enumerate(self.entries):
            if entry.orthographic in self.index:
                raise DuplicateEntryError(
                    f"duplicate entry for {entry.orthographic!r}"
                )
            self.index[entry.orthographic] = pos

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[LexiconEntry]:
        return iter(self.entries)

    def __contains__(self, orthographic: str) -> bool:
        return orthographic in self.index

    def __getitem__(self, orthographic: str) -> LexiconEntry:
        try:
            return self.entries[self.index[orthographic]]
        except KeyError:
            raise KeyError(f"unknown word {orthographic!r}") from None

    def words(self) -> list[str]:
        return [entry.orthographic for entry in self.entries]


def parse_lexicon(source: TextIO) -> Lexicon:
    """Parse a tab-separated word/phonemes/tag stream into a Lexicon.

    Raises ParseError naming the line for malformed records and
    DuplicateEntryError when a written form repeats.
    """
    entries = []
    seen: set[str] = set()
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(
                f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}"
            )
        orthographic, phoneme_text, tag = fields
        if not orthographic or not phoneme_text or not tag:
            raise ParseError(f"line {lineno}: empty field")
        if orthographic in seen:
            raise DuplicateEntryError(
                f"line {lineno}: duplicate entry for {orthographic!r}"
            )
        seen.add(orthographic)
        try:
            phonemes = PhonemeString.from_text(phoneme_text)
            entries.append(LexiconEntry(orthographic, phonemes, tag))
        except LexiconError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    return Lexicon(entries)


def load_lexicon(path) -> Lexicon:
    with open(path, encoding="utf-8") as handle:
        return parse_lexicon(handle)


def phoneme_length(p: PhonemeString) -> int:
    """Number of phonemes, boundary markers excluded."""
    return p.length


def extract_features(p: PhonemeString, min_len: int = 3) -> set[str]:
    """All contiguous windows of at least min_len positions over the
    boundary-marked code sequence, serialized as strings.

    Each boundary marker counts as one position, so windows such as
    "##kkon" (marker plus two phonemes) qualify at min_len 3.
    """
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    positions = p.marked()
    n = len(positions)
    features = set()
    for start in range(n):
        for stop in range(start + min_len, n + 1):
            features.add("".join(positions[start:stop]))
    return features
