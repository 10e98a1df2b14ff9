"""Verse-aligned multiparallel corpus: loading, selection, tokenization.

A corpus is a directory of per-translation text files named
``{iso3}_{name}.txt`` whose lines are ``VerseId<TAB>text``. Verse ids are
8-digit strings and act as the alignment key across translations: the same
id denotes the same content everywhere, which is what later stages rely on.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import DataError

logger = logging.getLogger(__name__)

VERSE_ID_RE = re.compile(r"^[0-9]{8}$")
FILENAME_RE = re.compile(r"^(?P<iso3>[a-z]{3})_(?P<name>.+)\.txt$")

# Whitespace plus the punctuation stripped around tokens by default.
DEFAULT_DELIMITERS = " \t\r\n\f\v.,;:!?()[]\"'"


def is_verse_id(value: str) -> bool:
    return bool(VERSE_ID_RE.match(value))


@dataclass(frozen=True)
class TokenizerPolicy:
    """Delimiter-splitting policy; lowercase folding is on by default."""

    delimiters: str = DEFAULT_DELIMITERS
    lowercase: bool = True


@dataclass(frozen=True)
class Token:
    """A token surface with its character span in the original verse text.

    surface is case-folded per policy; start/end index the raw text, so
    text[start:end] recovers the original spelling.
    """

    surface: str
    start: int
    end: int


@dataclass(frozen=True)
class TokenizedVerse:
    tokens: tuple[Token, ...]
    text_len: int

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]


def tokenize_verse(text: str, policy: TokenizerPolicy | None = None) -> TokenizedVerse:
    """Split text into maximal delimiter-free runs, keeping offsets."""
    pol = policy or TokenizerPolicy()
    delims = set(pol.delimiters)
    tokens: list[Token] = []
    start = None
    for i, ch in enumerate(text):
        if ch in delims:
            if start is not None:
                tokens.append(_make_token(text, start, i, pol))
                start = None
        elif start is None:
            start = i
    if start is not None:
        tokens.append(_make_token(text, start, len(text), pol))
    return TokenizedVerse(tuple(tokens), len(text))


def _make_token(text: str, start: int, end: int, pol: TokenizerPolicy) -> Token:
    surface = text[start:end]
    if pol.lowercase:
        surface = surface.lower()
    return Token(surface, start, end)


@dataclass(frozen=True)
class Translation:
    """One translation: an id, its language code, and verse texts.

    verses maps VerseId to raw text in file order. Treated as immutable.
    """

    translation_id: str
    iso3: str
    verses: dict[str, str]


@dataclass(frozen=True)
class MultiCorpus:
    """All loaded translations plus the working verse selection.

    selected_verses is the ordered subset downstream stages iterate over;
    it is empty until select() is applied. Tokenization is cached per
    translation and shared across derived copies that keep the same texts.
    """

    translations: dict[str, Translation]
    verse_universe: tuple[str, ...]
    selected_verses: tuple[str, ...] = ()
    default_policy: TokenizerPolicy = TokenizerPolicy()
    policy_overrides: dict[str, TokenizerPolicy] = field(default_factory=dict)
    families: dict[str, str] = field(default_factory=dict)
    malformed_lines: int = 0
    _token_cache: dict[str, dict[str, TokenizedVerse]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def policy_for(self, translation_id: str) -> TokenizerPolicy:
        return self.policy_overrides.get(translation_id, self.default_policy)

    def tokenized(self, translation_id: str) -> dict[str, TokenizedVerse]:
        """Tokenization of every verse of one translation, cached."""
        cached = self._token_cache.get(translation_id)
        if cached is not None:
            return cached
        trans = self.translations[translation_id]
        pol = self.policy_for(translation_id)
        out = {vid: tokenize_verse(text, pol) for vid, text in trans.verses.items()}
        self._token_cache[translation_id] = out
        return out

    def token_frequencies(self, translation_id: str, selected_only: bool = True) -> Counter:
        """Token counts for one translation, by default over selected verses."""
        toks = self.tokenized(translation_id)
        verse_ids = self.selected_verses if selected_only else tuple(toks)
        freqs: Counter = Counter()
        for vid in verse_ids:
            tv = toks.get(vid)
            if tv is not None:
                freqs.update(t.surface for t in tv.tokens)
        return freqs

    def languages(self) -> list[str]:
        return sorted({t.iso3 for t in self.translations.values()})

    def translations_for(self, iso3: str) -> list[str]:
        return sorted(
            tid for tid, t in self.translations.items() if t.iso3 == iso3
        )

    def select(self, target_count: int) -> "MultiCorpus":
        chosen = select_covered_verses(self, target_count)
        return replace(self, selected_verses=tuple(chosen))

    def with_translation(self, trans: Translation) -> "MultiCorpus":
        """Copy of the corpus with one translation replaced or added."""
        translations = dict(self.translations)
        translations[trans.translation_id] = trans
        universe = sorted(set(self.verse_universe) | set(trans.verses))
        return replace(
            self,
            translations=translations,
            verse_universe=tuple(universe),
            _token_cache={},
        )


def load_corpus(
    root: str | Path,
    iso_metadata: str | Path | None = None,
    policy: TokenizerPolicy | None = None,
    policy_overrides: dict[str, TokenizerPolicy] | None = None,
) -> MultiCorpus:
    """Load every well-formed translation file under root.

    Files not matching ``{iso3}_{name}.txt`` are skipped with a warning.
    Malformed lines are counted and skipped; duplicate verse ids within a
    file keep the first occurrence. Raises DataError if no valid
    translation file is found.
    """
    root = Path(root)
    if not root.is_dir():
        raise DataError(f"corpus directory not found: {root}")
    translations: dict[str, Translation] = {}
    universe: set[str] = set()
    malformed = 0
    for path in sorted(root.glob("*.txt")):
        m = FILENAME_RE.match(path.name)
        if not m:
            logger.warning("skipping %s: name does not match iso3_name.txt", path.name)
            continue
        iso3 = m.group("iso3")
        translation_id = path.stem
        verses: dict[str, str] = {}
        duplicates = 0
        for raw in path.read_text(encoding="utf-8").splitlines():
            if not raw:
                continue
            vid, sep, text = raw.partition("\t")
            if not sep or not is_verse_id(vid):
                malformed += 1
                continue
            if vid in verses:
                duplicates += 1
                continue
            verses[vid] = text
        if duplicates:
            logger.warning(
                "%s: %d duplicate verse ids, first occurrence kept",
                translation_id,
                duplicates,
            )
        if not verses:
            logger.warning("skipping %s: no well-formed verse lines", path.name)
            continue
        translations[translation_id] = Translation(translation_id, iso3, verses)
        universe.update(verses)
    if not translations:
        raise DataError(f"no usable translation files under {root}")
    if malformed:
        logger.warning("skipped %d malformed lines while loading %s", malformed, root)
    families = read_families(iso_metadata) if iso_metadata else {}
    return MultiCorpus(
        translations=translations,
        verse_universe=tuple(sorted(universe)),
        default_policy=policy or TokenizerPolicy(),
        policy_overrides=dict(policy_overrides or {}),
        families=families,
        malformed_lines=malformed,
    )


def read_families(path: str | Path) -> dict[str, str]:
    """Read an ``iso3<TAB>family`` metadata file."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        iso3, sep, family = line.partition("\t")
        if not sep or not family.strip():
            raise DataError(f"malformed family line: {raw!r}")
        out[iso3.strip()] = family.strip()
    return out


def coverage_counts(corpus: MultiCorpus) -> Counter:
    """Number of translations containing each verse id."""
    counts: Counter = Counter()
    for trans in corpus.translations.values():
        counts.update(trans.verses.keys())
    return counts


def select_covered_verses(corpus: MultiCorpus, target_count: int) -> list[str]:
    """The target_count best-covered verse ids, in verse-id order.

    Coverage is the number of translations containing the verse; coverage
    ties are broken toward smaller verse ids, so growing target_count
    always yields a superset. Raises ValueError if target_count is not in
    [1, len(verse_universe)].
    """
    if target_count <= 0:
        raise ValueError("target_count must be positive")
    if target_count > len(corpus.verse_universe):
        raise ValueError(
            f"target_count {target_count} exceeds verse universe "
            f"({len(corpus.verse_universe)})"
        )
    counts = coverage_counts(corpus)
    ranked = sorted(corpus.verse_universe, key=lambda v: (-counts[v], v))
    return sorted(ranked[:target_count])


def write_coverage_report(corpus: MultiCorpus, path: str | Path) -> None:
    """Write ``verse_id<TAB>coverage`` for the whole universe, id-sorted."""
    counts = coverage_counts(corpus)
    lines = [f"{vid}\t{counts[vid]}" for vid in corpus.verse_universe]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def apply_query_merge(
    trans: Translation,
    forms: set[str] | frozenset[str],
    synthetic: str,
    policy: TokenizerPolicy | None = None,
) -> Translation:
    """Replace every token matching one of forms with a synthetic token.

    Used to turn a multi-form query (say three present-tense copulas) into
    one alignable surface before training. forms are compared after the
    policy's case folding. Raises ValueError if the synthetic token would
    be split by the tokenizer, and DataError if it already occurs as a
    token of this translation (the merge would be ambiguous).
    """
    pol = policy or TokenizerPolicy()
    if any(ch in set(pol.delimiters) for ch in synthetic):
        raise ValueError(f"synthetic token {synthetic!r} contains a delimiter")
    if not synthetic:
        raise ValueError("synthetic token must be non-empty")
    target = synthetic.lower() if pol.lowercase else synthetic
    norm_forms = {f.lower() if pol.lowercase else f for f in forms}
    if not norm_forms:
        raise ValueError("query forms must be non-empty")
    new_verses: dict[str, str] = {}
    replaced = 0
    for vid, text in trans.verses.items():
        tv = tokenize_verse(text, pol)
        for tok in tv.tokens:
            if tok.surface == target:
                raise DataError(
                    f"synthetic token {synthetic!r} already occurs in "
                    f"{trans.translation_id} verse {vid}"
                )
        parts: list[str] = []
        prev = 0
        for tok in tv.tokens:
            if tok.surface in norm_forms:
                parts.append(text[prev : tok.start])
                parts.append(synthetic)
                prev = tok.end
                replaced += 1
        parts.append(text[prev:])
        new_verses[vid] = "".join(parts)
    if replaced == 0:
        logger.warning(
            "query merge matched no tokens in %s", trans.translation_id
        )
    return Translation(trans.translation_id, trans.iso3, new_verses)
