"""Deterministic synthetic multiparallel corpora with planted markers.

Every language renders the same per-verse concept sequence in its own
disjoint vocabulary; labeled verses get a feature marker according to the
language's marking style. The verb concept is verse-final in every
language, particles sit immediately before it and suffixes attach to it,
so the linear-alignment assumption of the mining stage holds by
construction. Marker strings are built from a syllable alphabet content
words never use, which makes the planted marker the unique best-associated
surface.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import re
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import MultiCorpus, Translation
from .errors import ConfigError

logger = logging.getLogger(__name__)

CONTENT_CONSONANTS = "bdfghjlmnprstvwz"
MARKER_CONSONANTS = "ckqxy"
VOWELS = "aeiou"

STYLES = ("particle", "suffix", "none")

_ISO3_RE = re.compile(r"^[a-z]{3}$")


@dataclass(frozen=True)
class LanguageSpec:
    """One synthetic language: how (and whether) it marks features."""

    iso3: str
    style: str
    family: str
    vocabulary_size: int = 60
    markers: tuple[tuple[str, tuple[str, ...]], ...] | None = None

    def marker_map(self) -> dict[str, tuple[str, ...]] | None:
        return dict(self.markers) if self.markers is not None else None


@dataclass(frozen=True)
class SynthSpec:
    """Full recipe for one synthetic corpus; the seed fixes everything."""

    n_verses: int
    features: tuple[tuple[str, float], ...]
    languages: tuple[LanguageSpec, ...]
    query_iso3: str
    query_forms: int = 2
    marker_drop: float = 0.0
    jitter: float = 1.0
    family_keep: float = 1.0
    verse_missing: float = 0.0
    min_words: int = 5
    max_words: int = 9
    seed: int = 0

    def validate(self) -> None:
        if self.n_verses < 1:
            raise ConfigError("n_verses must be >= 1")
        if not self.features:
            raise ConfigError("at least one feature is required")
        total = sum(p for _, p in self.features)
        if any(p <= 0 for _, p in self.features) or total > 1.0 + 1e-9:
            raise ConfigError("feature probabilities must be positive and sum to <= 1")
        if len({f for f, _ in self.features}) != len(self.features):
            raise ConfigError("duplicate feature names")
        if not self.languages:
            raise ConfigError("at least one language is required")
        if len(self.languages) > len(CONTENT_CONSONANTS) * len(VOWELS):
            raise ConfigError("too many languages for distinct word prefixes")
        seen = set()
        for lang in self.languages:
            if not _ISO3_RE.match(lang.iso3):
                raise ConfigError(f"bad iso3 code {lang.iso3!r}")
            if lang.iso3 in seen:
                raise ConfigError(f"duplicate language {lang.iso3!r}")
            seen.add(lang.iso3)
            if lang.style not in STYLES:
                raise ConfigError(f"unknown style {lang.style!r}")
            if lang.vocabulary_size < self.max_words:
                raise ConfigError(
                    f"{lang.iso3}: vocabulary_size must be >= max_words"
                )
        query = next(
            (l for l in self.languages if l.iso3 == self.query_iso3), None
        )
        if query is None:
            raise ConfigError(f"query language {self.query_iso3!r} not in roster")
        if query.style != "particle":
            raise ConfigError("query language must be particle-style")
        if not 1 <= self.min_words <= self.max_words:
            raise ConfigError("need 1 <= min_words <= max_words")
        if not 0.0 <= self.marker_drop < 1.0:
            raise ConfigError("marker_drop must lie in [0, 1)")
        if not 0.0 < self.family_keep <= 1.0:
            raise ConfigError("family_keep must lie in (0, 1]")
        if not 0.0 <= self.verse_missing < 1.0:
            raise ConfigError("verse_missing must lie in [0, 1)")
        if self.query_forms < 1:
            raise ConfigError("query_forms must be >= 1")
        auto_particle = any(
            l.style == "particle" and l.markers is None for l in self.languages
        )
        if auto_particle and len(self.features) > len(VOWELS):
            raise ConfigError("auto particle markers need one vowel per feature")
        if auto_particle and self.query_forms > len(MARKER_CONSONANTS):
            raise ConfigError("query_forms exceeds the marker consonant pool")
        if self.jitter < 0:
            raise ConfigError("jitter must be >= 0")


def _sub_rng(seed: int, *tags: str) -> random.Random:
    digest = hashlib.sha256(
        ("|".join([str(seed), *tags])).encode("utf-8")
    ).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def translation_id_for(iso3: str) -> str:
    return f"{iso3}_synth"


def generate(spec: SynthSpec) -> tuple[MultiCorpus, dict]:
    """Build the corpus and its ground-truth ledger.

    The ledger records verse labels, each language's style, family and
    marker forms, the verses it actually marked (after family subsetting
    and drop noise), and the query definition.
    """
    spec.validate()
    feature_names = [f for f, _ in spec.features]
    concept_count = min(l.vocabulary_size for l in spec.languages)

    label_rng = _sub_rng(spec.seed, "labels")
    content_rng = _sub_rng(spec.seed, "content")
    plans: list[tuple[str, str | None, list[int]]] = []
    for i in range(spec.n_verses):
        vid = f"{i + 1:08d}"
        r = label_rng.random()
        label = None
        acc = 0.0
        for name, prob in spec.features:
            acc += prob
            if r < acc:
                label = name
                break
        length = content_rng.randint(spec.min_words, spec.max_words)
        concepts = content_rng.sample(range(concept_count), length)
        plans.append((vid, label, concepts))

    labeled = {
        f: [vid for vid, lab, _ in plans if lab == f] for f in feature_names
    }
    keep: dict[tuple[str, str], set[str]] = {}
    for fam in sorted({l.family for l in spec.languages}):
        for f in feature_names:
            rng = _sub_rng(spec.seed, "family", fam, f)
            keep[(fam, f)] = {
                vid for vid in labeled[f] if rng.random() < spec.family_keep
            }

    prefixes = [c + v for c in CONTENT_CONSONANTS for v in VOWELS]
    marker_sylls = [c + v for c in MARKER_CONSONANTS for v in VOWELS]

    translations: dict[str, Translation] = {}
    truth_langs: dict[str, dict] = {}
    families: dict[str, str] = {}
    query_truth: dict | None = None
    for li, lang in enumerate(spec.languages):
        rng = _sub_rng(spec.seed, "lang", lang.iso3)
        prefix = prefixes[li]
        lexicon: list[str] = []
        seen: set[str] = set()
        for _ in range(concept_count):
            while True:
                # variable word length keeps boundary grams aperiodic, so
                # no window phase can correlate with them systematically
                body = rng.randint(1, 3)
                word = prefix + "".join(
                    rng.choice(prefixes) for _ in range(body)
                )
                if word not in seen:
                    break
            seen.add(word)
            lexicon.append(word)

        forms: dict[str, tuple[str, ...]] = {}
        if lang.style != "none":
            given = lang.marker_map()
            if given is not None:
                forms = {f: tuple(v) for f, v in given.items()}
            else:
                n_forms = (
                    spec.query_forms if lang.iso3 == spec.query_iso3 else 1
                )
                if lang.style == "particle":
                    # one consonant per form slot shared across features plus
                    # one vowel per feature: boundary grams then spread over
                    # every feature while the syllable stays feature-clean
                    slots = rng.sample(MARKER_CONSONANTS, n_forms)
                    feature_vowels = rng.sample(VOWELS, len(feature_names))
                    for f, vowel in zip(feature_names, feature_vowels):
                        forms[f] = tuple(c + vowel for c in slots)
                else:
                    used: set[str] = set()
                    for f in feature_names:
                        out = []
                        for _ in range(n_forms):
                            while True:
                                m = rng.choice(marker_sylls)
                                if m not in used:
                                    break
                            used.add(m)
                            out.append(m)
                        forms[f] = tuple(out)

        noise_rng = _sub_rng(spec.seed, "noise", lang.iso3)
        order_rng = _sub_rng(spec.seed, "order", lang.iso3)
        miss_rng = _sub_rng(spec.seed, "missing", lang.iso3)
        verses: dict[str, str] = {}
        marked: dict[str, list[str]] = {f: [] for f in feature_names}
        for vid, label, concepts in plans:
            if (
                spec.verse_missing
                and lang.iso3 != spec.query_iso3
                and miss_rng.random() < spec.verse_missing
            ):
                continue
            body = list(concepts)
            if len(body) > 1 and spec.jitter > 0:
                head = body[:-1]
                keys = [
                    idx + order_rng.uniform(-spec.jitter, spec.jitter)
                    for idx in range(len(head))
                ]
                head = [c for _, c in sorted(zip(keys, head), key=lambda t: t[0])]
                body = head + [body[-1]]
            words = [lexicon[c] for c in body]
            mark = None
            if (
                label is not None
                and lang.style != "none"
                and vid in keep[(lang.family, label)]
            ):
                if spec.marker_drop == 0 or noise_rng.random() >= spec.marker_drop:
                    options = forms[label]
                    mark = (
                        options[0]
                        if len(options) == 1
                        else options[noise_rng.randrange(len(options))]
                    )
            if mark is not None:
                if lang.style == "particle":
                    words = words[:-1] + [mark, words[-1]]
                else:
                    words = words[:-1] + [words[-1] + mark]
                marked[label].append(vid)
            verses[vid] = " ".join(words)
        tid = translation_id_for(lang.iso3)
        translations[tid] = Translation(tid, lang.iso3, verses)
        families[lang.iso3] = lang.family
        truth_langs[lang.iso3] = {
            "style": lang.style,
            "family": lang.family,
            "translation_id": tid,
            "markers": {f: list(v) for f, v in forms.items()},
            "marked": marked,
        }
        if lang.iso3 == spec.query_iso3:
            query_truth = {
                "iso3": lang.iso3,
                "translation_id": tid,
                "forms": {f: list(v) for f, v in forms.items()},
            }

    universe = sorted({vid for t in translations.values() for vid in t.verses})
    corpus = MultiCorpus(
        translations=translations,
        verse_universe=tuple(universe),
        families=families,
    )
    truth = {
        "seed": spec.seed,
        "n_verses": spec.n_verses,
        "features": {f: p for f, p in spec.features},
        "labels": {vid: (lab or "") for vid, lab, _ in plans},
        "languages": truth_langs,
        "query": query_truth,
    }
    return corpus, truth


# --- on-disk form ----------------------------------------------------------


def write_synth(spec: SynthSpec, out_dir: str | Path) -> tuple[MultiCorpus, dict]:
    """Generate and write corpus plus companion files under out_dir.

    Layout: corpus/{iso3}_synth.txt, ground_truth.json, queries.tsv,
    allowlist.txt (non-query particle languages), gold.tsv (planted
    marker forms per marking translation and feature), families.tsv.
    """
    corpus, truth = generate(spec)
    out_dir = Path(out_dir)
    corpus_dir = out_dir / "corpus"
    corpus_dir.mkdir(parents=True, exist_ok=True)
    for tid in sorted(corpus.translations):
        trans = corpus.translations[tid]
        lines = [f"{vid}\t{trans.verses[vid]}" for vid in sorted(trans.verses)]
        (corpus_dir / f"{tid}.txt").write_text(
            "\n".join(lines) + "\n", encoding="utf-8"
        )
    (out_dir / "ground_truth.json").write_text(
        json.dumps(truth, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    feature_names = [f for f, _ in spec.features]
    query = truth["query"]
    qlines = [
        f"{f}\t{query['translation_id']}\t{','.join(query['forms'][f])}"
        for f in feature_names
    ]
    (out_dir / "queries.tsv").write_text("\n".join(qlines) + "\n", encoding="utf-8")
    allow = [
        l.iso3
        for l in spec.languages
        if l.style == "particle" and l.iso3 != spec.query_iso3
    ]
    (out_dir / "allowlist.txt").write_text(
        "\n".join(allow) + "\n", encoding="utf-8"
    )
    glines = []
    for lang in spec.languages:
        info = truth["languages"][lang.iso3]
        for f in feature_names:
            forms = info["markers"].get(f)
            if forms:
                glines.append(f"{info['translation_id']}\t{f}\t{','.join(forms)}")
    (out_dir / "gold.tsv").write_text("\n".join(glines) + "\n", encoding="utf-8")
    flines = [f"{l.iso3}\t{l.family}" for l in spec.languages]
    (out_dir / "families.tsv").write_text("\n".join(flines) + "\n", encoding="utf-8")
    return corpus, truth


def _iso_series(letter: str, count: int) -> list[str]:
    if count > 26:
        raise ConfigError("series limited to 26 codes")
    return [f"{letter}{chr(ord('a') + i)}a" for i in range(count)]


def preset_marking24(seed: int = 11) -> SynthSpec:
    """24 languages, 3000 verses: 16 particle (one is the query),
    4 suffix, 4 unmarked; 5% marker drop."""
    langs = [LanguageSpec("qaa", "particle", "fam_query")]
    langs += [
        LanguageSpec(iso, "particle", f"fam_p{i}")
        for i, iso in enumerate(_iso_series("p", 15))
    ]
    langs += [
        LanguageSpec(iso, "suffix", f"fam_s{i}")
        for i, iso in enumerate(_iso_series("s", 4))
    ]
    langs += [
        LanguageSpec(iso, "none", f"fam_n{i}")
        for i, iso in enumerate(_iso_series("n", 4))
    ]
    return SynthSpec(
        n_verses=3000,
        features=(("past", 0.3), ("present", 0.3), ("future", 0.25)),
        languages=tuple(langs),
        query_iso3="qaa",
        query_forms=2,
        marker_drop=0.05,
        jitter=1.0,
        seed=seed,
    )


def preset_families28(seed: int = 13) -> SynthSpec:
    """28 particle languages: 4 families of 5 sharing marking subsets,
    plus 8 isolates with independent subsets."""
    langs = [LanguageSpec("qaa", "particle", "famA")]
    series = _iso_series("b", 4) + _iso_series("c", 5) + _iso_series("d", 5) + _iso_series("e", 5)
    fams = ["famA"] * 4 + ["famB"] * 5 + ["famC"] * 5 + ["famD"] * 5
    langs += [
        LanguageSpec(iso, "particle", fam) for iso, fam in zip(series, fams)
    ]
    langs += [
        LanguageSpec(iso, "particle", f"iso_{iso}")
        for iso in _iso_series("z", 8)
    ]
    return SynthSpec(
        n_verses=2000,
        features=(("past", 0.3), ("present", 0.3), ("future", 0.25)),
        languages=tuple(langs),
        query_iso3="qaa",
        query_forms=2,
        marker_drop=0.02,
        jitter=1.0,
        family_keep=0.4,
        seed=seed,
    )


def preset_tiny8(seed: int = 7) -> SynthSpec:
    """Small fast corpus for CLI and determinism checks."""
    langs = [LanguageSpec("qaa", "particle", "famA", vocabulary_size=40)]
    langs += [
        LanguageSpec(iso, "particle", "famA", vocabulary_size=40)
        for iso in _iso_series("p", 4)
    ]
    langs += [
        LanguageSpec(iso, "suffix", "famB", vocabulary_size=40)
        for iso in _iso_series("s", 2)
    ]
    langs.append(LanguageSpec("naa", "none", "famC", vocabulary_size=40))
    return SynthSpec(
        n_verses=400,
        features=(("past", 0.3), ("present", 0.3), ("future", 0.25)),
        languages=tuple(langs),
        query_iso3="qaa",
        query_forms=2,
        marker_drop=0.03,
        jitter=1.0,
        verse_missing=0.02,
        seed=seed,
    )


PRESETS = {
    "marking24": preset_marking24,
    "families28": preset_families28,
    "tiny8": preset_tiny8,
}


def spec_from_json(path: str | Path) -> SynthSpec:
    """Load a SynthSpec from JSON; unknown keys are a config error."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read synth spec {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("synth spec must be a JSON object")
    known_lang = {"iso3", "style", "family", "vocabulary_size", "markers"}
    langs = []
    for entry in raw.get("languages", []):
        extra = set(entry) - known_lang
        if extra:
            raise ConfigError(f"unknown language keys: {sorted(extra)}")
        markers = entry.get("markers")
        if markers is not None:
            markers = tuple(
                (f, tuple(v)) for f, v in sorted(markers.items())
            )
        langs.append(
            LanguageSpec(
                entry["iso3"],
                entry["style"],
                entry["family"],
                entry.get("vocabulary_size", 60),
                markers,
            )
        )
    known = {
        "n_verses", "features", "languages", "query_iso3", "query_forms",
        "marker_drop", "jitter", "family_keep", "verse_missing",
        "min_words", "max_words", "seed",
    }
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown synth spec keys: {sorted(extra)}")
    try:
        spec = SynthSpec(
            n_verses=raw["n_verses"],
            features=tuple((f, float(p)) for f, p in raw["features"]),
            languages=tuple(langs),
            query_iso3=raw["query_iso3"],
            query_forms=raw.get("query_forms", 2),
            marker_drop=raw.get("marker_drop", 0.0),
            jitter=raw.get("jitter", 1.0),
            family_keep=raw.get("family_keep", 1.0),
            verse_missing=raw.get("verse_missing", 0.0),
            min_words=raw.get("min_words", 5),
            max_words=raw.get("max_words", 9),
            seed=raw.get("seed", 0),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad synth spec: {exc}") from exc
    spec.validate()
    return spec
