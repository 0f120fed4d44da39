"""Formal analogy detection between symbol sequences.

Production checking goes through analogical signatures: a canonical edit
path between the two words of a pair, compared across the two pairs of a
quadruplet.  An exhaustive factorization-based checker (oracle_analogy) is
also provided; it is quartic and reserved for tests and verification, never
for the mining path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

Symbols = tuple[Hashable, ...]

KEEP = "K"
DELETE = "D"
INSERT = "I"

# Index permutations under which a formal analogy a:b::c:d is preserved:
# swapping the means, inverting both pairs, exchanging the pairs, and their
# compositions.  All eight preserve the partition {extremes {a,d}, means
# {b,c}} of the quadruplet.
ORBIT_PERMUTATIONS = (
    (0, 1, 2, 3),
    (0, 2, 1, 3),
    (1, 0, 3, 2),
    (1, 3, 0, 2),
    (2, 0, 3, 1),
    (2, 3, 0, 1),
    (3, 1, 2, 0),
    (3, 2, 1, 0),
)


def _as_symbols(word) -> Symbols:
    if isinstance(word, tuple):
        return word
    return tuple(word)


@dataclass(frozen=True)
class AnalogicalSignature:
    """Canonical edit path between a word pair, as merged segment operations.

    ops is a sequence of (kind, segment) where kind is KEEP, DELETE or
    INSERT and segment is the affected symbol run.  Replaying ops against
    the first word reproduces the second exactly.
    """

    ops: tuple[tuple[str, Symbols], ...]

    def replay(self, source) -> Symbols:
        source = _as_symbols(source)
        out: list = []
        pos = 0
        for kind, segment in self.ops:
            if kind == KEEP:
                out.extend(source[pos:pos + len(segment)])
                pos += len(segment)
            elif kind == DELETE:
                pos += len(segment)
            else:
                out.extend(segment)
        return tuple(out)

    def key(self) -> tuple:
        """Comparison key deciding signature identity across pairs.

        Two signatures describe the same analogy slot when their operation
        shapes match and the deleted and inserted material is identical.
        Kept runs are the material common to both words of one pair; when
        the path contains both deletions and insertions the gaps are
        anchored on both sides and kept runs may differ in length between
        pairs.  A one-sided path (insertions only, deletions only, or pure
        identity) carries no such anchor, so kept lengths are then part of
        the identity; this is what makes the checker miss pure-extension
        analogies between stems of different lengths.
        """
        shape = tuple(kind for kind, _ in self.ops)
        changes = tuple(seg for kind, seg in self.ops if kind != KEEP)
        if DELETE in shape and INSERT in shape:
            keeps = None
        else:
            keeps = tuple(len(seg) for kind, seg in self.ops if kind == KEEP)
        return (shape, changes, keeps)


def _lcs_table(a: Symbols, b: Symbols) -> list[list[int]]:
    # table[i][j] = LCS length of a[i:], b[j:]
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row = table[i]
        nxt = table[i + 1]
        ai = a[i]
        for j in range(m - 1, -1, -1):
            if ai == b[j]:
                row[j] = nxt[j + 1] + 1
            else:
                down = nxt[j]
                right = row[j + 1]
                row[j] = down if down >= right else right
    return table


def signature(a, b) -> AnalogicalSignature:
    """Canonical edit path from a to b.

    The alignment keeps a longest common subsequence; among co-optimal
    alignments the kept positions are the leftmost in a, then the leftmost
    in b.  Runs of same-kind operations are merged, with deletions emitted
    before insertions inside a gap.
    """
    a = _as_symbols(a)
    b = _as_symbols(b)
    table = _lcs_table(a, b)
    ops: list[tuple[str, Symbols]] = []
    kept_a: list = []

    def flush_gap(del_seg: Symbols, ins_seg: Symbols):
        if kept_a:
            ops.append((KEEP, tuple(kept_a)))
            kept_a.clear()
        if del_seg:
            ops.append((DELETE, del_seg))
        if ins_seg:
            ops.append((INSERT, ins_seg))

    i = j = 0
    remaining = table[0][0]
    while remaining > 0:
        # next match: smallest i', then smallest j', that preserves the LCS
        found = None
        for ii in range(i, len(a)):
            if table[ii][j] < remaining:
                break
            for jj in range(j, len(b)):
                if table[ii][jj] < remaining:
                    break
                if a[ii] == b[jj] and table[ii + 1][jj + 1] == remaining - 1:
                    found = (ii, jj)
                    break
            if found:
                break
        ii, jj = found
        if ii > i or jj > j:
            flush_gap(a[i:ii], b[j:jj])
        kept_a.append(a[ii])
        i, j = ii + 1, jj + 1
        remaining -= 1
    if i < len(a) or j < len(b):
        flush_gap(a[i:], b[j:])
    elif kept_a:
        ops.append((KEEP, tuple(kept_a)))
    return AnalogicalSignature(tuple(ops))


def check_analogy(a, b, c, d, key_cache: dict | None = None) -> bool:
    """Signature-based analogy test for a:b::c:d.

    A quadruplet is accepted when the signatures of a pair arrangement
    (a,b)/(c,d), (a,c)/(b,d), (b,a)/(d,c) or (c,a)/(d,b) are identical, so
    acceptance is invariant under the eight analogy-preserving
    permutations.  Quadratic in word length; sound but incomplete with
    respect to oracle_analogy.
    """
    a, b, c, d = _as_symbols(a), _as_symbols(b), _as_symbols(c), _as_symbols(d)
    if key_cache is None:
        def key_of(x, y):
            return signature(x, y).key()
    else:
        def key_of(x, y):
            k = key_cache.get((x, y))
            if k is None:
                k = signature(x, y).key()
                key_cache[(x, y)] = k
            return k
    if key_of(a, b) == key_of(c, d):
        return True
    if key_of(a, c) == key_of(b, d):
        return True
    if key_of(b, a) == key_of(d, c):
        return True
    return key_of(c, a) == key_of(d, b)


class OracleSizeError(ValueError):
    """Inputs exceed the size contract of the exhaustive checker."""


ORACLE_MAX_TOTAL = 40


def oracle_analogy(a, b, c, d) -> bool:
    """Exhaustive factorization test for a:b::c:d.

    True iff the four sequences admit aligned factorizations where each
    factor either repeats across the pairs (a_i = c_i and b_i = d_i) or
    inside them (a_i = b_i and c_i = d_i).  Implemented as reachability
    over the four-string position lattice; quartic, test-only.
    """
    a, b, c, d = _as_symbols(a), _as_symbols(b), _as_symbols(c), _as_symbols(d)
    total = len(a) + len(b) + len(c) + len(d)
    if total > ORACLE_MAX_TOTAL:
        raise OracleSizeError(
            f"combined length {total} exceeds the {ORACLE_MAX_TOTAL}-symbol contract"
        )
    if len(a) + len(d) != len(b) + len(c):
        return False

    n3, n4 = len(c), len(d)
    width = n4 + 1
    cells = (n3 + 1) * width
    target = 1 << (n3 * width + n4)

    # bitmask over (k, l) cells where c[k] == d[l]; stepping both c and d
    diag = 0
    for k in range(n3):
        for l in range(n4):
            if c[k] == d[l]:
                diag |= 1 << (k * width + l)
    # per symbol: cells whose c[k] (resp. d[l]) equals it
    col_for: dict = {}
    row_for: dict = {}
    for k in range(n3):
        col_for.setdefault(c[k], 0)
        col_for[c[k]] |= sum(1 << (k * width + l) for l in range(n4 + 1))
    for l in range(n4):
        row_for.setdefault(d[l], 0)
        row_for[d[l]] |= sum(1 << (k * width + l) for k in range(n3 + 1))

    full = (1 << cells) - 1
    planes = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    planes[0][0] = 1
    for i in range(len(a) + 1):
        for j in range(len(b) + 1):
            reach = planes[i][j]
            if not reach:
                continue
            # close under joint c/d steps within this plane
            while True:
                grown = reach | ((reach & diag) << (width + 1)) & full
                if grown == reach:
                    break
                reach = grown
            planes[i][j] = reach
            if i < len(a) and j < len(b) and a[i] == b[j]:
                planes[i + 1][j + 1] |= reach
            if i < len(a):
                mask = col_for.get(a[i])
                if mask:
                    planes[i + 1][j] |= (reach & mask) << width
            if j < len(b):
                mask = row_for.get(b[j])
                if mask:
                    planes[i][j + 1] |= (reach & mask) << 1
    return bool(planes[len(a)][len(b)] & target)


def length_prune(la: int, lb: int, lc: int, ld: int) -> bool:
    """Length necessity: an analogy requires l(a)-l(b) = l(c)-l(d)."""
    return la - lb == lc - ld


def tag_prune(ta: str, tb: str, tc: str, td: str) -> bool:
    """Tag necessity: tags must match within pairs or across them."""
    return (ta == tb and tc == td) or (ta == tc and tb == td)


def permutation_orbit(quad: tuple) -> list[tuple]:
    """The eight analogy-preserving rearrangements of a quadruplet.

    Duplicates arising from repeated words are removed; the original
    arrangement comes first.
    """
    seen = []
    for perm in ORBIT_PERMUTATIONS:
        arranged = tuple(quad[p] for p in perm)
        if arranged not in seen:
            seen.append(arranged)
    return seen


def canonical_form(quad: tuple) -> tuple:
    """Lexicographically least member of the orbit, used for deduplication."""
    return min(tuple(quad[p] for p in perm) for perm in ORBIT_PERMUTATIONS)


class AnalogySet:
    """Accepted analogies, stored as one canonical representative per orbit."""

    def __init__(self, representatives=()):
        self.representatives: set[tuple[str, str, str, str]] = set(representatives)

    def add(self, quad: tuple[str, str, str, str]):
        self.representatives.add(canonical_form(quad))

    def __len__(self) -> int:
        return len(self.representatives)

    def __contains__(self, quad) -> bool:
        return canonical_form(tuple(quad)) in self.representatives

    def closed(self) -> set[tuple[str, str, str, str]]:
        """The full permutation-closed set of quadruplets."""
        out = set()
        for rep in self.representatives:
            out.update(permutation_orbit(rep))
        return out

    def sorted_representatives(self) -> list[tuple[str, str, str, str]]:
        return sorted(self.representatives)


class EnumerationError(ValueError):
    """Enumeration cannot run with the supplied configuration."""


class CandidateLimitError(RuntimeError):
    """The candidate safety cap was exceeded."""


def enumerate_analogies(
    lexicon,
    neighborhoods: dict[str, list],
    max_candidates: int | None = None,
) -> tuple[AnalogySet, dict[str, int]]:
    """Mine analogies inside similarity neighborhoods.

    For each entry a, candidates a:b::c:d take b and c from the
    neighborhood of a and d from the neighborhood of c.  Survivors of the
    length and tag necessities are checked on the boundary-marked phoneme
    sequences, then on the written forms.  Returns the canonically stored
    set plus stage counters.
    """
    for word in lexicon.words():
        if word not in neighborhoods:
            raise EnumerationError(f"no neighborhood for {word!r}")

    def neighbor_words(word: str) -> list[str]:
        return [n if isinstance(n, str) else n[0] for n in neighborhoods[word]]

    counters = {
        "candidates": 0,
        "pruned_by_length": 0,
        "pruned_by_tag": 0,
        "phonemic_pass": 0,
        "orthographic_pass": 0,
    }
    phon_cache: dict = {}
    orth_cache: dict = {}
    marked: dict[str, tuple] = {}
    lengths: dict[str, int] = {}
    tags: dict[str, str] = {}
    for entry in lexicon:
        marked[entry.orthographic] = entry.phonemes.marked()
        lengths[entry.orthographic] = entry.phonemes.length
        tags[entry.orthographic] = entry.tag

    found = AnalogySet()
    for a in lexicon.words():
        around_a = [w for w in neighbor_words(a) if w != a]
        for b in around_a:
            for c in around_a:
                for d in neighbor_words(c):
                    if d == c or (c, d) == (a, b):
                        continue
                    counters["candidates"] += 1
                    if max_candidates is not None and counters["candidates"] > max_candidates:
                        raise CandidateLimitError(
                            f"more than {max_candidates} candidate quadruplets"
                        )
                    if not length_prune(lengths[a], lengths[b], lengths[c], lengths[d]):
                        counters["pruned_by_length"] += 1
                        continue
                    if not tag_prune(tags[a], tags[b], tags[c], tags[d]):
                        counters["pruned_by_tag"] += 1
                        continue
                    if not check_analogy(
                        marked[a], marked[b], marked[c], marked[d], phon_cache
                    ):
                        continue
                    counters["phonemic_pass"] += 1
                    if not check_analogy(
                        tuple(a), tuple(b), tuple(c), tuple(d), orth_cache
                    ):
                        continue
                    counters["orthographic_pass"] += 1
                    found.add((a, b, c, d))
    return found, counters
