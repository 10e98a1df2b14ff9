"""Pivot discovery: head search, expansion, presence, serialization."""

import logging

import numpy as np
import pytest

from helpers import make_corpus
from pivotmine.aligner import PairLinkStats, link_counts
from pivotmine.corpus import Translation
from pivotmine.errors import DataError
from pivotmine.pivots import (
    Candidate,
    Pivot,
    PivotSet,
    Query,
    contingency_from_links,
    expand_pivots,
    find_head_pivot,
    pivot_presence_matrix,
    presence_vector,
    rank_pivot_candidates,
    read_allowlist,
    read_pivots_tsv,
    read_queries,
    score_candidates,
    synthetic_query_token,
    top_markers_by_language,
    write_pivots_tsv,
)
from pivotmine.stats import ContingencyTable
from pivotmine.synth import LanguageSpec, SynthSpec, generate


def planted_spec(n_particle: int, n_verses: int = 400, seed: int = 3) -> SynthSpec:
    langs = [LanguageSpec("qaa", "particle", "fq")]
    langs += [
        LanguageSpec(f"p{chr(ord('a') + i)}a", "particle", f"f{i}")
        for i in range(n_particle)
    ]
    return SynthSpec(
        n_verses=n_verses,
        features=(("past", 0.4),),
        languages=tuple(langs),
        query_iso3="qaa",
        query_forms=2,
        seed=seed,
    )


@pytest.fixture(scope="module")
def planted():
    spec = planted_spec(20)
    corpus, truth = generate(spec)
    return corpus.select(len(corpus.verse_universe)), truth


class TestBasics:
    def test_synthetic_token_shape(self):
        token = synthetic_query_token("Past")
        assert token == "qtokpastq"

    def test_query_needs_forms(self):
        with pytest.raises(ValueError):
            Query("past", "aaa_t", frozenset())

    def test_contingency_from_links(self):
        stats = PairLinkStats(
            "src",
            source_word_to_target={"ka": 30, "other": 5},
            source_word_links=35,
            target_word_links={"ka": 33, "other": 50, "noise": 100},
            total_links=200,
        )
        table = contingency_from_links(stats, "ka")
        assert (table.a, table.b, table.c, table.d) == (30, 5, 3, 162)


class TestScoreCandidates:
    def make_stats(self):
        return {
            "bbb_t": PairLinkStats(
                "src",
                source_word_to_target={"hi": 40, "lo": 40, "rare": 40},
                source_word_links=120,
                target_word_links={"hi": 45, "lo": 80, "rare": 41},
                total_links=400,
            )
        }

    def corpus_with_freqs(self):
        verses = {}
        for i in range(1, 11):
            words = ["hi"] * 5 + ["lo"] * 5
            verses[f"{i:08d}"] = " ".join(words) + (" rare" if i == 1 else "")
        return make_corpus({"bbb_t": verses})

    def test_min_count_filters(self):
        corpus = self.corpus_with_freqs()
        cands = score_candidates(corpus, self.make_stats(), min_count=10)
        assert {c.surface for c in cands} == {"hi", "lo"}

    def test_sorted_by_score_then_ties(self):
        corpus = self.corpus_with_freqs()
        cands = score_candidates(corpus, self.make_stats(), min_count=1)
        scores = [c.score for c in cands]
        assert scores == sorted(scores, reverse=True)
        assert cands[0].surface == "rare"


class TestPresence:
    def test_presence_vector(self):
        corpus = make_corpus(
            {"aaa_t": {"00000001": "ti ko", "00000002": "ko"}, "bbb_t": {"00000003": "x"}}
        )
        presence, missing = presence_vector(corpus, "aaa_t", "ti")
        assert presence.tolist() == [1, 0, 0]
        assert missing.tolist() == [False, False, True]

    def test_matrix_requires_selection(self):
        corpus = make_corpus({"aaa_t": {"00000001": "ti"}}, select=False)
        pivot = Pivot("aaa", "aaa_t", "ti", 1.0, np.array([1], np.uint8), np.array([False]))
        ps = PivotSet("past", pivot, [pivot], 1)
        with pytest.raises(DataError):
            pivot_presence_matrix(corpus, ps)

    def test_matrix_shape_and_mismatch(self):
        corpus = make_corpus(
            {"aaa_t": {"00000001": "ti", "00000002": "ko"}}
        )
        presence, missing = presence_vector(corpus, "aaa_t", "ti")
        pivot = Pivot("aaa", "aaa_t", "ti", 1.0, presence, missing)
        ps = PivotSet("past", pivot, [pivot], 1)
        mat = pivot_presence_matrix(corpus, ps)
        assert mat.matrix.shape == (2, 1)
        assert mat.verse_ids == ("00000001", "00000002")
        bad = Pivot("bbb", "bbb_t", "x", 1.0, np.zeros(5, np.uint8), np.zeros(5, bool))
        with pytest.raises(DataError):
            pivot_presence_matrix(corpus, PivotSet("past", bad, [bad], 1))


class TestHeadPivot:
    def test_empty_allowlist_fatal(self, planted):
        corpus, truth = planted
        q = truth["query"]
        query = Query("past", q["translation_id"], frozenset(q["forms"]["past"]))
        with pytest.raises(DataError):
            find_head_pivot(corpus, query, set())

    def test_unknown_query_translation(self, planted):
        corpus, _ = planted
        query = Query("past", "zzz_none", frozenset({"x"}))
        with pytest.raises(DataError):
            find_head_pivot(corpus, query, {"paa"})

    def test_planted_head_found(self, planted):
        corpus, truth = planted
        q = truth["query"]
        allow = {
            iso for iso, info in truth["languages"].items()
            if info["style"] == "particle" and iso != q["iso3"]
        }
        query = Query("past", q["translation_id"], frozenset(q["forms"]["past"]))
        head = find_head_pivot(corpus, query, allow)
        assert head.iso3 in allow
        assert head.surface in truth["languages"][head.iso3]["markers"]["past"]
        assert head.score > 0

    def test_no_positive_candidate_lists_alternatives(self, planted):
        corpus, truth = planted
        q = truth["query"]
        query = Query("past", q["translation_id"], frozenset(q["forms"]["past"]))
        with pytest.raises(DataError) as err:
            find_head_pivot(corpus, query, {"xxx"})
        assert "top candidates overall" in str(err.value)


@pytest.fixture(scope="module")
def head_and_ranking(planted):
    corpus, truth = planted
    q = truth["query"]
    allow = {
        iso for iso, info in truth["languages"].items()
        if info["style"] == "particle" and iso != q["iso3"]
    }
    query = Query("past", q["translation_id"], frozenset(q["forms"]["past"]))
    head = find_head_pivot(corpus, query, allow)
    ranking = rank_pivot_candidates(corpus, head)
    return head, ranking


class TestExpansion:
    def test_k10_one_planted_pivot_per_language(self, planted, head_and_ranking):
        corpus, truth = planted
        head, ranking = head_and_ranking
        ps = expand_pivots(corpus, "past", head, 10, ranking)
        assert len(ps.members) == 10
        langs = [p.iso3 for p in ps.members]
        assert len(set(langs)) == 10
        for p in ps.members:
            assert p.surface in truth["languages"][p.iso3]["markers"]["past"]

    def test_members_sorted_by_score(self, planted, head_and_ranking):
        corpus, _ = planted
        head, ranking = head_and_ranking
        ps = expand_pivots(corpus, "past", head, 8, ranking)
        scores = [p.score for p in ps.members]
        assert scores == sorted(scores, reverse=True)

    def test_duplicate_translation_does_not_double_language(
        self, planted, head_and_ranking
    ):
        corpus, _ = planted
        head, ranking = head_and_ranking
        twin_source = corpus.translations[ranking[0].translation_id]
        twin = Translation("zza_twin", twin_source.iso3, dict(twin_source.verses))
        bigger = corpus.with_translation(twin).select(len(corpus.verse_universe))
        doubled = ranking + [
            Candidate(c.iso3, "zza_twin", c.surface, c.score, c.table)
            for c in ranking
            if c.translation_id == twin_source.translation_id
        ]
        doubled.sort(key=lambda c: (-c.score, c.iso3, c.surface, c.translation_id))
        ps = expand_pivots(bigger, "past", head, 10, doubled)
        langs = [p.iso3 for p in ps.members]
        assert len(langs) == len(set(langs))

    def test_runs_out_with_warning(self, planted, head_and_ranking, caplog):
        corpus, _ = planted
        head, ranking = head_and_ranking
        with caplog.at_level(logging.WARNING):
            ps = expand_pivots(corpus, "past", head, 100, ranking)
        assert len(ps.members) < 100
        assert "stopped at" in caplog.text

    def test_k_must_be_positive(self, planted, head_and_ranking):
        corpus, _ = planted
        head, _ = head_and_ranking
        with pytest.raises(ValueError):
            expand_pivots(corpus, "past", head, 0, [])

    def test_top_markers_by_language(self, head_and_ranking):
        head, ranking = head_and_ranking
        top = top_markers_by_language(ranking, head)
        assert top[head.iso3].surface == head.surface
        seen = {}
        for cand in ranking:
            if cand.score > 0 and cand.iso3 not in seen:
                seen[cand.iso3] = cand
        for iso, cand in seen.items():
            if iso != head.iso3:
                assert top[iso] == cand


class TestFiles:
    def test_queries_round_trip(self, tmp_path):
        path = tmp_path / "queries.tsv"
        path.write_text(
            "# comment\npast\tqaa_synth\tti,wen\nfuture\tqaa_synth\tva\n",
            encoding="utf-8",
        )
        queries = read_queries(path)
        assert queries[0] == Query("past", "qaa_synth", frozenset({"ti", "wen"}))
        assert queries[1].forms == frozenset({"va"})

    def test_queries_malformed(self, tmp_path):
        path = tmp_path / "queries.tsv"
        path.write_text("past only_two_fields\n", encoding="utf-8")
        with pytest.raises(DataError):
            read_queries(path)

    def test_allowlist(self, tmp_path):
        path = tmp_path / "allow.txt"
        path.write_text("# langs\npaa\n\npba\n", encoding="utf-8")
        assert read_allowlist(path) == {"paa", "pba"}

    def test_pivots_tsv_round_trip(self, tmp_path):
        corpus = make_corpus(
            {
                "aaa_t": {"00000001": "ti ko", "00000002": "ko"},
                "bbb_t": {"00000001": "ka so", "00000002": "so"},
            }
        )
        pa, ma = presence_vector(corpus, "aaa_t", "ti")
        pb, mb = presence_vector(corpus, "bbb_t", "ka")
        head = Pivot("bbb", "bbb_t", "ka", 5.0, pb, mb)
        other = Pivot("aaa", "aaa_t", "ti", 9.0, pa, ma)
        ps = PivotSet("past", head, [other, head], 2)
        path = tmp_path / "pivots.tsv"
        write_pivots_tsv(ps, path)
        text = path.read_text()
        assert text.startswith("rank\tiso3\ttranslation\tsurface\tchi2\n")
        assert "1\taaa\taaa_t\tti\t9\n" in text

        loaded = read_pivots_tsv(corpus, "past", path, head_key=("bbb_t", "ka"))
        assert loaded.head.surface == "ka"
        assert [p.surface for p in loaded.members] == ["ti", "ka"]
        assert loaded.members[0].presence.tolist() == pa.tolist()

        default_head = read_pivots_tsv(corpus, "past", path)
        assert default_head.head.surface == "ti"

        with pytest.raises(DataError):
            read_pivots_tsv(corpus, "past", path, head_key=("bbb_t", "nope"))

    def test_pivots_tsv_rejects_garbage(self, tmp_path):
        corpus = make_corpus({"aaa_t": {"00000001": "x"}})
        bad = tmp_path / "bad.tsv"
        bad.write_text("not a header\n", encoding="utf-8")
        with pytest.raises(DataError):
            read_pivots_tsv(corpus, "past", bad)
