"""Surface pivot discovery: head pivot search and k-pivot expansion.

A pivot is a word some language uses consistently for the queried feature.
The head pivot is found by aligning a (possibly merged multi-form) query
against candidate translations restricted to an allowlist of reliable
languages; the pivot set is then grown by aligning the head against every
other translation and ranking aligned words by chi-square association.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .aligner import AlignerConfig, PairLinkStats, link_counts
from .corpus import MultiCorpus, apply_query_merge
from .errors import DataError
from .stats import ContingencyTable, chi2

logger = logging.getLogger(__name__)

DEFAULT_MIN_COUNT = 10


@dataclass(frozen=True)
class Query:
    """A feature query: one or more surface forms in one translation."""

    feature: str
    translation_id: str
    forms: frozenset[str]

    def __post_init__(self):
        if not self.forms:
            raise ValueError("query needs at least one form")


def synthetic_query_token(feature: str) -> str:
    """Surface used to stand in for all query forms during alignment."""
    return f"qtok{feature.lower()}q"


@dataclass(frozen=True)
class Candidate:
    """A scored pivot candidate in one target translation."""

    iso3: str
    translation_id: str
    surface: str
    score: float
    table: ContingencyTable


@dataclass
class Pivot:
    """A selected pivot with its presence profile over selected verses.

    presence[r] is 1 when the pivot token occurs in selected verse r of its
    translation; missing[r] flags verses absent from that translation.
    """

    iso3: str
    translation_id: str
    surface: str
    score: float
    presence: np.ndarray
    missing: np.ndarray


@dataclass
class PivotSet:
    """Head pivot plus expansion, ordered by descending score.

    At most one pivot per language; k is the requested size (the actual
    member count may be smaller when candidates run out).
    """

    feature: str
    head: Pivot
    members: list[Pivot]
    k: int

    def surfaces(self) -> list[tuple[str, str, str]]:
        return [(p.iso3, p.translation_id, p.surface) for p in self.members]


def presence_vector(
    corpus: MultiCorpus, translation_id: str, surface: str
) -> tuple[np.ndarray, np.ndarray]:
    """Presence/missing indicator arrays over corpus.selected_verses."""
    toks = corpus.tokenized(translation_id)
    n = len(corpus.selected_verses)
    presence = np.zeros(n, dtype=np.uint8)
    missing = np.zeros(n, dtype=bool)
    for r, vid in enumerate(corpus.selected_verses):
        tv = toks.get(vid)
        if tv is None:
            missing[r] = True
        elif any(t.surface == surface for t in tv.tokens):
            presence[r] = 1
    return presence, missing


def contingency_from_links(stats: PairLinkStats, target_word: str) -> ContingencyTable:
    """2x2 table relating the tracked source word to one target word.

    Built from aggregate link counts: a = links source_word -> target_word,
    b = other links from source_word, c = other links onto target_word,
    d = everything else.
    """
    a = stats.source_word_to_target.get(target_word, 0)
    b = stats.source_word_links - a
    c = stats.target_word_links.get(target_word, 0) - a
    d = stats.total_links - a - b - c
    return ContingencyTable(a, b, c, d)


def score_candidates(
    corpus: MultiCorpus,
    stats_by_translation: dict[str, PairLinkStats],
    min_count: int = DEFAULT_MIN_COUNT,
) -> list[Candidate]:
    """Score every sufficiently frequent aligned word in every target.

    Words whose token frequency over the selected verses is below
    min_count are skipped. Returns candidates sorted by descending score,
    then iso3, surface, and translation id.
    """
    out: list[Candidate] = []
    for tgt_id in sorted(stats_by_translation):
        stats = stats_by_translation[tgt_id]
        iso3 = corpus.translations[tgt_id].iso3
        freq = corpus.token_frequencies(tgt_id)
        for word in stats.source_word_to_target:
            if freq.get(word, 0) < min_count:
                continue
            table = contingency_from_links(stats, word)
            out.append(Candidate(iso3, tgt_id, word, chi2(table), table))
    out.sort(key=lambda c: (-c.score, c.iso3, c.surface, c.translation_id))
    return out


def _pivot_from_candidate(corpus: MultiCorpus, cand: Candidate) -> Pivot:
    presence, missing = presence_vector(corpus, cand.translation_id, cand.surface)
    return Pivot(
        cand.iso3, cand.translation_id, cand.surface, cand.score, presence, missing
    )


def find_head_pivot(
    corpus: MultiCorpus,
    query: Query,
    allowlist: set[str],
    cfg: AlignerConfig | None = None,
    min_count: int = DEFAULT_MIN_COUNT,
    cache_dir: str | Path | None = None,
) -> Pivot:
    """Find the best-associated allowlisted word for a feature query.

    Multi-form queries are first merged into one synthetic token in the
    query translation. Raises DataError when no allowlisted candidate has
    a positive score; the error lists the top-scoring candidates overall
    so the allowlist can be revisited.
    """
    if not allowlist:
        raise DataError("head pivot search needs a non-empty language allowlist")
    if query.translation_id not in corpus.translations:
        raise DataError(f"unknown query translation {query.translation_id!r}")
    trans = corpus.translations[query.translation_id]
    forms = set(query.forms)
    synthetic = synthetic_query_token(query.feature)
    merged = apply_query_merge(
        trans, forms, synthetic, corpus.policy_for(query.translation_id)
    )
    work = corpus.with_translation(merged)
    stats = link_counts(work, query.translation_id, synthetic, cfg, cache_dir=cache_dir)
    candidates = score_candidates(work, stats, min_count)
    allowed = [
        c for c in candidates if c.iso3 in allowlist and c.score > 0
    ]
    if not allowed:
        preview = ", ".join(
            f"{c.iso3}:{c.surface}({c.score:.1f})" for c in candidates[:10]
        )
        raise DataError(
            f"no allowlisted head pivot for feature {query.feature!r}; "
            f"top candidates overall: {preview or 'none'}"
        )
    best = allowed[0]
    logger.info(
        "head pivot for %s: %s %r in %s (chi2=%.2f)",
        query.feature,
        best.iso3,
        best.surface,
        best.translation_id,
        best.score,
    )
    # Presence is computed on the original corpus; only the query
    # translation was rewritten, never the candidate's.
    return _pivot_from_candidate(corpus, best)


def rank_pivot_candidates(
    corpus: MultiCorpus,
    head: Pivot,
    cfg: AlignerConfig | None = None,
    min_count: int = DEFAULT_MIN_COUNT,
    cache_dir: str | Path | None = None,
) -> list[Candidate]:
    """Score candidates in every translation against the head pivot."""
    stats = link_counts(
        corpus, head.translation_id, head.surface, cfg, cache_dir=cache_dir
    )
    return score_candidates(corpus, stats, min_count)


def expand_pivots(
    corpus: MultiCorpus,
    feature: str,
    head: Pivot,
    k: int,
    ranking: list[Candidate] | None = None,
    cfg: AlignerConfig | None = None,
    min_count: int = DEFAULT_MIN_COUNT,
    cache_dir: str | Path | None = None,
) -> PivotSet:
    """Grow the pivot set to k members (head included), one per language.

    Walks the ranking in order, skipping languages already represented and
    zero scores; warns when fewer than k members are reachable.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if ranking is None:
        ranking = rank_pivot_candidates(corpus, head, cfg, min_count, cache_dir)
    members = [head]
    taken = {head.iso3}
    for cand in ranking:
        if len(members) >= k:
            break
        if cand.iso3 in taken or cand.score <= 0:
            continue
        members.append(_pivot_from_candidate(corpus, cand))
        taken.add(cand.iso3)
    if len(members) < k:
        logger.warning(
            "pivot set for %s stopped at %d of %d requested", feature, len(members), k
        )
    members.sort(key=lambda p: (-p.score, p.iso3, p.surface, p.translation_id))
    return PivotSet(feature, head, members, k)


def top_markers_by_language(
    ranking: list[Candidate], head: Pivot | None = None
) -> dict[str, Candidate]:
    """Best positively scored candidate per language.

    When the head pivot is given it represents its own language (it has no
    score against itself in the ranking).
    """
    out: dict[str, Candidate] = {}
    if head is not None:
        out[head.iso3] = Candidate(
            head.iso3,
            head.translation_id,
            head.surface,
            head.score,
            ContingencyTable(0, 0, 0, 0),
        )
    for cand in ranking:
        if cand.score <= 0:
            continue
        if cand.iso3 not in out:
            out[cand.iso3] = cand
    return out


@dataclass
class PresenceMatrix:
    """Verse-by-pivot presence with a parallel missing-data mask."""

    verse_ids: tuple[str, ...]
    pivots: list[Pivot]
    matrix: np.ndarray  # uint8, verses x pivots
    missing: np.ndarray  # bool, verses x pivots

    def column(self, idx: int) -> np.ndarray:
        return self.matrix[:, idx]


def pivot_presence_matrix(corpus: MultiCorpus, pivot_set: PivotSet) -> PresenceMatrix:
    """Stack member presence vectors over the selected verses."""
    if not corpus.selected_verses:
        raise DataError("presence matrix needs a verse selection")
    cols = [p.presence for p in pivot_set.members]
    miss = [p.missing for p in pivot_set.members]
    n = len(corpus.selected_verses)
    for p in pivot_set.members:
        if len(p.presence) != n:
            raise DataError(
                f"pivot {p.iso3}:{p.surface} presence length {len(p.presence)} "
                f"does not match selection {n}"
            )
    return PresenceMatrix(
        tuple(corpus.selected_verses),
        list(pivot_set.members),
        np.column_stack(cols).astype(np.uint8),
        np.column_stack(miss),
    )


# --- file formats ---------------------------------------------------------


def read_queries(path: str | Path) -> list[Query]:
    """Read ``feature<TAB>translation_id<TAB>form1,form2,...`` lines."""
    out = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataError(f"malformed query line: {raw!r}")
        feature, tid, forms = parts
        out.append(
            Query(feature, tid, frozenset(f for f in forms.split(",") if f))
        )
    return out


def read_allowlist(path: str | Path) -> set[str]:
    """Read one iso3 code per line; # comments and blanks ignored."""
    out = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            out.add(line)
    return out


def write_pivots_tsv(pivot_set: PivotSet, path: str | Path) -> None:
    """Write ``rank iso3 translation surface chi2`` for the member list."""
    lines = ["rank\tiso3\ttranslation\tsurface\tchi2"]
    for rank, p in enumerate(pivot_set.members, start=1):
        lines.append(
            f"{rank}\t{p.iso3}\t{p.translation_id}\t{p.surface}\t{format(p.score, '.10g')}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_pivots_tsv(
    corpus: MultiCorpus,
    feature: str,
    path: str | Path,
    head_key: tuple[str, str] | None = None,
) -> PivotSet:
    """Rebuild a PivotSet from its TSV.

    head_key, a (translation_id, surface) pair, names the head member;
    member order does not encode it because scores against the query and
    against the head live on different scales. Without head_key the
    top-ranked member is used.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("rank\t"):
        raise DataError(f"not a pivots TSV: {path}")
    members = []
    for raw in lines[1:]:
        if not raw:
            continue
        parts = raw.split("\t")
        if len(parts) != 5:
            raise DataError(f"malformed pivot line: {raw!r}")
        _, iso3, tid, surface, score = parts
        if tid not in corpus.translations:
            raise DataError(f"pivot references unknown translation {tid!r}")
        presence, missing = presence_vector(corpus, tid, surface)
        members.append(Pivot(iso3, tid, surface, float(score), presence, missing))
    if not members:
        raise DataError(f"empty pivots TSV: {path}")
    head = members[0]
    if head_key is not None:
        matches = [
            p for p in members if (p.translation_id, p.surface) == tuple(head_key)
        ]
        if not matches:
            raise DataError(f"head {head_key!r} not among pivots in {path}")
        head = matches[0]
    return PivotSet(feature, head, members, len(members))
