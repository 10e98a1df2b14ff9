"""Command-line interface.

Each subcommand runs one pipeline stage into an output directory and
writes a manifest there; `pipeline` chains the stages for one feature.
Exit codes: 0 success, 2 configuration problems, 3 data problems.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .aligner import AlignerConfig
from .cluster import (
    evaluate_family_prediction,
    language_distance,
    marker_distance_matrix,
    marker_label,
    read_distance_tsv,
    to_newick,
    upgma,
    write_distance_tsv,
)
from .config import RunConfig, load_config
from .corpus import (
    MultiCorpus,
    load_corpus,
    read_families,
    write_coverage_report,
)
from .errors import ConfigError, DataError
from .evaluation import mrr, mrr_table, read_gold
from .manifest import RunRecorder
from .maps import (
    project_cluster,
    select_splitting_pivots,
    signature_clusters,
    write_cluster_summary,
    write_cluster_verses,
    write_projection,
    write_splitters_tsv,
)
from .ngrams import mine_ngrams, pivot_relative_positions, read_ngrams_tsv, write_ngrams_tsv
from .pivots import (
    Candidate,
    Pivot,
    PivotSet,
    expand_pivots,
    find_head_pivot,
    pivot_presence_matrix,
    presence_vector,
    rank_pivot_candidates,
    read_allowlist,
    read_pivots_tsv,
    read_queries,
    write_pivots_tsv,
)
from .stats import ContingencyTable
from .synth import PRESETS, spec_from_json, write_synth

logger = logging.getLogger("pivotmine")


def _write_json(path: Path, obj) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _prepare_corpus(cfg: RunConfig, corpus_dir: str | None = None) -> MultiCorpus:
    root = corpus_dir or cfg.corpus_dir
    if not root:
        raise ConfigError("no corpus directory configured")
    corpus = load_corpus(root, iso_metadata=cfg.families)
    target = cfg.coverage_target
    if target > len(corpus.verse_universe):
        logger.warning(
            "coverage target %d exceeds universe %d; clamping",
            target,
            len(corpus.verse_universe),
        )
        target = len(corpus.verse_universe)
    return corpus.select(target)


def _query_for(cfg: RunConfig, feature: str):
    if not cfg.queries:
        raise ConfigError("no queries file configured")
    queries = read_queries(cfg.queries)
    for q in queries:
        if q.feature == feature:
            return q
    raise ConfigError(
        f"feature {feature!r} not in {cfg.queries} "
        f"(has: {', '.join(q.feature for q in queries)})"
    )


def _head_from_json(corpus: MultiCorpus, path: str | Path) -> Pivot:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        iso3, tid, surface = doc["iso3"], doc["translation_id"], doc["surface"]
        score = float(doc["score"])
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise DataError(f"cannot read head pivot from {path}: {exc}") from exc
    if tid not in corpus.translations:
        raise DataError(f"head pivot references unknown translation {tid!r}")
    presence, missing = presence_vector(corpus, tid, surface)
    return Pivot(iso3, tid, surface, score, presence, missing)


def _ranking_from_tsv(path: str | Path) -> list[Candidate]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("rank\t"):
        raise DataError(f"not a ranking TSV: {path}")
    out = []
    for raw in lines[1:]:
        if not raw:
            continue
        parts = raw.split("\t")
        if len(parts) != 5:
            raise DataError(f"malformed ranking line: {raw!r}")
        _, iso3, tid, surface, score = parts
        out.append(
            Candidate(iso3, tid, surface, float(score), ContingencyTable(0, 0, 0, 0))
        )
    return out


def _write_ranking_tsv(ranking: list[Candidate], path: Path) -> Path:
    lines = ["rank\tiso3\ttranslation\tsurface\tchi2"]
    for rank, c in enumerate(ranking, start=1):
        lines.append(
            f"{rank}\t{c.iso3}\t{c.translation_id}\t{c.surface}\t"
            f"{format(c.score, '.10g')}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# --- stages -----------------------------------------------------------------


def stage_ingest(cfg: RunConfig, corpus: MultiCorpus, out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    coverage = out / "coverage.tsv"
    write_coverage_report(corpus, coverage)
    selection = out / "selection.txt"
    selection.write_text("\n".join(corpus.selected_verses) + "\n", encoding="utf-8")
    stats = {
        "n_translations": len(corpus.translations),
        "n_languages": len(corpus.languages()),
        "n_verses_universe": len(corpus.verse_universe),
        "n_selected": len(corpus.selected_verses),
        "malformed_lines": corpus.malformed_lines,
    }
    return [coverage, selection, _write_json(out / "corpus_stats.json", stats)]


def stage_head(
    cfg: RunConfig, corpus: MultiCorpus, feature: str, out: Path
) -> tuple[Pivot, list[Path]]:
    out.mkdir(parents=True, exist_ok=True)
    query = _query_for(cfg, feature)
    if not cfg.allowlist:
        raise ConfigError("no allowlist file configured")
    allowlist = read_allowlist(cfg.allowlist)
    head = find_head_pivot(
        corpus, query, allowlist, cfg.aligner(), cfg.min_count, cfg.cache_dir
    )
    doc = {
        "feature": feature,
        "iso3": head.iso3,
        "translation_id": head.translation_id,
        "surface": head.surface,
        "score": head.score,
    }
    return head, [_write_json(out / "head.json", doc)]


def stage_expand(
    cfg: RunConfig, corpus: MultiCorpus, feature: str, head: Pivot, out: Path
) -> tuple[PivotSet, list[Path]]:
    out.mkdir(parents=True, exist_ok=True)
    ranking = rank_pivot_candidates(
        corpus, head, cfg.aligner(), cfg.min_count, cfg.cache_dir
    )
    pivot_set = expand_pivots(corpus, feature, head, cfg.k, ranking)
    pivots_path = out / "pivots.tsv"
    write_pivots_tsv(pivot_set, pivots_path)
    ranking_path = _write_ranking_tsv(ranking, out / "ranking.tsv")
    return pivot_set, [pivots_path, ranking_path]


def stage_mine(
    cfg: RunConfig,
    corpus: MultiCorpus,
    pivot_set: PivotSet,
    out: Path,
    targets: list[str] | None = None,
) -> list[Path]:
    ngram_dir = out / "ngrams"
    ngram_dir.mkdir(parents=True, exist_ok=True)
    member_tids = {p.translation_id for p in pivot_set.members}
    if targets is None:
        targets = [t for t in sorted(corpus.translations) if t not in member_tids]
    rels = pivot_relative_positions(corpus, pivot_set)
    written = []
    summary = {}
    for tid in sorted(targets):
        result = mine_ngrams(
            corpus,
            tid,
            pivot_set,
            sigma=cfg.sigma,
            w=cfg.window,
            n_range=(cfg.n_min, cfg.n_max),
            top=cfg.top,
            relative_positions=rels,
        )
        path = ngram_dir / f"{tid}.tsv"
        write_ngrams_tsv(result, path)
        written.append(path)
        summary[tid] = {
            "verses_scored": result.verses_scored,
            "verses_positive": result.verses_positive,
            "overlap_flagged": result.overlap_flagged,
        }
    written.append(_write_json(out / "mining_summary.json", summary))
    return written


def stage_cluster_markers(
    cfg: RunConfig, corpus: MultiCorpus, pivot_set: PivotSet, out: Path
) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    matrix = pivot_presence_matrix(corpus, pivot_set)
    dm = marker_distance_matrix(matrix)
    dist_path = out / "markers_distance.tsv"
    write_distance_tsv(dm, dist_path)
    tree_path = out / "markers.nwk"
    tree_path.write_text(to_newick(upgma(dm)) + "\n", encoding="utf-8")
    written = [dist_path, tree_path]
    families = dict(corpus.families)
    if cfg.families:
        families = read_families(cfg.families)
    if families:
        # marker labels inherit the family of their language
        marker_families = {
            marker_label(p): families[p.iso3]
            for p in pivot_set.members
            if p.iso3 in families
        }
        if len(marker_families) >= 2:
            metrics = evaluate_family_prediction(
                dm, marker_families, cfg.jsd_threshold
            )
            written.append(
                _write_json(out / "marker_family_metrics.json", metrics)
            )
    return written


def stage_map(
    cfg: RunConfig,
    corpus: MultiCorpus,
    pivot_set: PivotSet,
    head: Pivot,
    out: Path,
) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    matrix = pivot_presence_matrix(corpus, pivot_set)
    chosen, choices = select_splitting_pivots(
        matrix, head, cfg.map_rounds, cfg.map_policy
    )
    splitters = out / "splitters.tsv"
    write_splitters_tsv(chosen, choices, splitters)
    clusters = signature_clusters(matrix, chosen)
    summary = out / "clusters.tsv"
    write_cluster_summary(clusters, summary)
    cluster_dir = out / "clusters"
    write_cluster_verses(clusters, cluster_dir)
    written = [splitters, summary]
    written.extend(sorted(cluster_dir.glob("*.txt")))
    return written


def stage_eval_mrr(
    cfg: RunConfig, features: list[str], from_dir: Path, out: Path
) -> list[Path]:
    if not cfg.gold:
        raise ConfigError("no gold file configured")
    gold = read_gold(cfg.gold)
    results = []
    for feature in features:
        ngram_dir = from_dir / feature / "ngrams"
        if not ngram_dir.is_dir():
            raise DataError(f"no mined n-grams under {ngram_dir}")
        ranked = {
            p.stem: read_ngrams_tsv(p) for p in sorted(ngram_dir.glob("*.tsv"))
        }
        if not ranked:
            raise DataError(f"no n-gram TSVs in {ngram_dir}")
        results.append(mrr(ranked, gold, feature, cfg.match_mode))
    out.mkdir(parents=True, exist_ok=True)
    return [_write_json(out / "mrr.json", mrr_table(results))]


def stage_cluster_languages(
    cfg: RunConfig,
    corpus: MultiCorpus,
    features: list[str],
    from_dir: Path,
    out: Path,
) -> list[Path]:
    from .pivots import top_markers_by_language

    out.mkdir(parents=True, exist_ok=True)
    markers_by_feature = {}
    head_translations = {}
    for feature in features:
        fdir = from_dir / feature
        head = _head_from_json(corpus, fdir / "head.json")
        ranking = _ranking_from_tsv(fdir / "ranking.tsv")
        markers_by_feature[feature] = top_markers_by_language(ranking, head)
        head_translations[feature] = head.translation_id
    dm, report = language_distance(
        corpus, markers_by_feature, cfg.min_shared_verses, head_translations
    )
    dist_path = out / "languages_distance.tsv"
    write_distance_tsv(dm, dist_path)
    tree_path = out / "languages.nwk"
    tree_path.write_text(to_newick(upgma(dm)) + "\n", encoding="utf-8")
    report_doc = {
        "features": report.features,
        "languages": report.languages,
        "excluded": report.excluded,
        "zero_support_pairs": report.zero_support_pairs,
    }
    written = [
        dist_path,
        tree_path,
        _write_json(out / "language_report.json", report_doc),
    ]
    families = dict(corpus.families)
    if cfg.families:
        families = read_families(cfg.families)
    if families:
        metrics = evaluate_family_prediction(dm, families, cfg.jsd_threshold)
        written.append(_write_json(out / "family_metrics.json", metrics))
    return written


# --- subcommand runners -------------------------------------------------------


def _recorder(args, cfg: RunConfig, command: str) -> RunRecorder:
    rec = RunRecorder(command, cfg.to_dict(), cfg.sha256())
    for attr in ("corpus_dir", "queries", "allowlist", "gold", "families"):
        rec.add_input(getattr(cfg, attr))
    return rec


def _out_dir(args, cfg: RunConfig) -> Path:
    if args.out:
        return Path(args.out)
    if cfg.out_dir:
        return Path(cfg.out_dir)
    raise ConfigError("no output directory: pass --out or set out_dir in the config")


def cmd_synth(args) -> int:
    if bool(args.preset) == bool(args.spec):
        raise ConfigError("pass exactly one of --preset or --spec")
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r} (have: {', '.join(sorted(PRESETS))})"
            )
        spec = PRESETS[args.preset](args.seed) if args.seed is not None else PRESETS[args.preset]()
    else:
        spec = spec_from_json(args.spec)
    out = Path(args.out)
    started = time.time()
    rec = RunRecorder("synth", {"preset": args.preset, "spec": args.spec}, "")
    corpus, _ = write_synth(spec, out)
    rec.time_stage("synth", started)
    rec.add_outputs(p for p in out.rglob("*") if p.is_file())
    rec.write(out)
    logger.info(
        "wrote %d translations, %d verses to %s",
        len(corpus.translations),
        len(corpus.verse_universe),
        out,
    )
    return 0


def cmd_ingest(args) -> int:
    cfg = load_config(args.config)
    rec = _recorder(args, cfg, "ingest")
    corpus = _prepare_corpus(cfg, args.corpus)
    out = _out_dir(args, cfg)
    started = time.time()
    rec.add_outputs(stage_ingest(cfg, corpus, out))
    rec.time_stage("ingest", started)
    rec.write(out)
    return 0


def cmd_head_pivot(args) -> int:
    cfg = load_config(args.config)
    rec = _recorder(args, cfg, "head-pivot")
    corpus = _prepare_corpus(cfg)
    out = _out_dir(args, cfg)
    started = time.time()
    head, written = stage_head(cfg, corpus, args.feature, out)
    rec.add_outputs(written)
    rec.time_stage("head-pivot", started)
    rec.write(out)
    return 0


def cmd_expand_pivots(args) -> int:
    cfg = load_config(args.config)
    rec = _recorder(args, cfg, "expand-pivots")
    corpus = _prepare_corpus(cfg)
    head = _head_from_json(corpus, args.head)
    out = _out_dir(args, cfg)
    started = time.time()
    _, written = stage_expand(cfg, corpus, args.feature, head, out)
    rec.add_outputs(written)
    rec.time_stage("expand-pivots", started)
    rec.write(out)
    return 0


def _pivot_set_from_args(cfg, corpus, args) -> PivotSet:
    head_key = None
    if args.head:
        head = _head_from_json(corpus, args.head)
        head_key = (head.translation_id, head.surface)
    return read_pivots_tsv(corpus, args.feature, args.pivots, head_key)


def cmd_mine_ngrams(args) -> int:
    cfg = load_config(args.config)
    rec = _recorder(args, cfg, "mine-ngrams")
    rec.add_input(args.pivots)
    corpus = _prepare_corpus(cfg)
    pivot_set = _pivot_set_from_args(cfg, corpus, args)
    targets = args.targets.split(",") if args.targets else None
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    rec.add_outputs(stage_mine(cfg, corpus, pivot_set, out, targets))
    rec.time_stage("mine-ngrams", started)
    rec.write(out)
    return 0


def cmd_cluster_markers(args) -> int:
    cfg = load_config(args.config)
    rec = _recorder(args, cfg, "cluster-markers")
    rec.add_input(args.pivots)
    corpus = _prepare_corpus(cfg)
    pivot_set = _pivot_set_from_args(cfg, corpus, args)
    out = _out_dir(args, cfg)
    started = time.time()
    rec.add_outputs(stage_cluster_markers(cfg, corpus, pivot_set, out))
    rec.time_stage("cluster-markers", started)
    rec.write(out)
    return 0


def cmd_cluster_languages(args) -> int:
    cfg = load_config(args.config)
    rec = _recorder(args, cfg, "cluster-languages")
    corpus = _prepare_corpus(cfg)
    features = [f for f in args.features.split(",") if f]
    if not features:
        raise ConfigError("no features given")
    out = _out_dir(args, cfg)
    started = time.time()
    rec.add_outputs(
        stage_cluster_languages(cfg, corpus, features, Path(args.from_dir), out)
    )
    rec.time_stage("cluster-languages", started)
    rec.write(out)
    return 0


def cmd_map(args) -> int:
    cfg = load_config(args.config)
    rec = _recorder(args, cfg, "map")
    rec.add_input(args.pivots)
    corpus = _prepare_corpus(cfg)
    pivot_set = _pivot_set_from_args(cfg, corpus, args)
    head = _head_from_json(corpus, args.head) if args.head else pivot_set.head
    out = _out_dir(args, cfg)
    started = time.time()
    rec.add_outputs(stage_map(cfg, corpus, pivot_set, head, out))
    rec.time_stage("map", started)
    rec.write(out)
    return 0


def cmd_project(args) -> int:
    cfg = load_config(args.config)
    rec = _recorder(args, cfg, "project")
    rec.add_input(args.verses)
    corpus = _prepare_corpus(cfg)
    verse_ids = [
        line.strip()
        for line in Path(args.verses).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    projected = project_cluster(corpus, verse_ids, args.translation)
    missing = sum(1 for _, text in projected if text is None)
    if missing:
        logger.warning(
            "%d of %d verses missing from %s", missing, len(projected), args.translation
        )
    out = _out_dir(args, cfg)
    started = time.time()
    out.mkdir(parents=True, exist_ok=True)
    path = out / "projection.tsv"
    write_projection(projected, path)
    rec.add_outputs([path])
    rec.time_stage("project", started)
    rec.write(out)
    return 0


def cmd_eval_mrr(args) -> int:
    cfg = load_config(args.config)
    rec = _recorder(args, cfg, "eval-mrr")
    features = [f for f in args.features.split(",") if f]
    if not features:
        raise ConfigError("no features given")
    out = _out_dir(args, cfg)
    started = time.time()
    rec.add_outputs(stage_eval_mrr(cfg, features, Path(args.from_dir), out))
    rec.time_stage("eval-mrr", started)
    rec.write(out)
    return 0


def cmd_eval_family(args) -> int:
    cfg = load_config(args.config)
    rec = _recorder(args, cfg, "eval-family")
    rec.add_input(args.distances)
    if not cfg.families:
        raise ConfigError("no families file configured")
    families = read_families(cfg.families)
    dm = read_distance_tsv(args.distances)
    metrics = evaluate_family_prediction(dm, families, cfg.jsd_threshold)
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    rec.add_outputs([_write_json(out / "family_metrics.json", metrics)])
    rec.time_stage("eval-family", started)
    rec.write(out)
    return 0


def cmd_pipeline(args) -> int:
    cfg = load_config(args.config)
    rec = _recorder(args, cfg, "pipeline")
    out = _out_dir(args, cfg)
    feature = args.feature

    t0 = time.time()
    corpus = _prepare_corpus(cfg)
    rec.time_stage("load", t0)

    t0 = time.time()
    rec.add_outputs(stage_ingest(cfg, corpus, out))
    rec.time_stage("ingest", t0)

    t0 = time.time()
    head, written = stage_head(cfg, corpus, feature, out)
    rec.add_outputs(written)
    rec.time_stage("head-pivot", t0)

    t0 = time.time()
    pivot_set, written = stage_expand(cfg, corpus, feature, head, out)
    rec.add_outputs(written)
    rec.time_stage("expand-pivots", t0)

    t0 = time.time()
    rec.add_outputs(stage_mine(cfg, corpus, pivot_set, out))
    rec.time_stage("mine-ngrams", t0)

    t0 = time.time()
    rec.add_outputs(stage_cluster_markers(cfg, corpus, pivot_set, out))
    rec.time_stage("cluster-markers", t0)

    t0 = time.time()
    rec.add_outputs(stage_map(cfg, corpus, pivot_set, head, out))
    rec.time_stage("map", t0)

    if cfg.gold:
        t0 = time.time()
        gold = read_gold(cfg.gold)
        ngram_dir = out / "ngrams"
        ranked = {
            p.stem: read_ngrams_tsv(p) for p in sorted(ngram_dir.glob("*.tsv"))
        }
        result = mrr(ranked, gold, feature, cfg.match_mode)
        rec.add_outputs([_write_json(out / "mrr.json", mrr_table([result]))])
        rec.time_stage("eval-mrr", t0)

    rec.write(out)
    logger.info("pipeline for %r finished in %s", feature, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pivotmine",
        description="Crosslingual surface-marker discovery over verse-parallel corpora",
    )
    parser.add_argument("--version", action="version", version=f"pivotmine {__version__}")
    parser.add_argument(
        "--verbose", action="store_true", help="log at DEBUG instead of INFO"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        return p

    p = add("synth", cmd_synth, "generate a synthetic corpus with planted markers")
    p.add_argument("--preset", help=f"one of: {', '.join(sorted(PRESETS))}")
    p.add_argument("--spec", help="path to a synth spec JSON")
    p.add_argument("--seed", type=int, default=None, help="override the preset seed")
    p.add_argument("--out", required=True, help="output directory")

    p = add("ingest", cmd_ingest, "load a corpus and report verse coverage")
    p.add_argument("--config", required=True)
    p.add_argument("--corpus", help="override the configured corpus directory")
    p.add_argument("--out", help="output directory (default: config out_dir)")

    p = add("head-pivot", cmd_head_pivot, "find the head pivot for a feature")
    p.add_argument("--config", required=True)
    p.add_argument("--feature", required=True)
    p.add_argument("--out", help="output directory (default: config out_dir)")

    p = add("expand-pivots", cmd_expand_pivots, "grow the k-pivot set from a head")
    p.add_argument("--config", required=True)
    p.add_argument("--feature", required=True)
    p.add_argument("--head", required=True, help="head.json from head-pivot")
    p.add_argument("--out", help="output directory (default: config out_dir)")

    p = add("mine-ngrams", cmd_mine_ngrams, "mine marker n-grams per translation")
    p.add_argument("--config", required=True)
    p.add_argument("--feature", required=True)
    p.add_argument("--pivots", required=True, help="pivots.tsv from expand-pivots")
    p.add_argument("--head", help="head.json (marks the head member)")
    p.add_argument("--targets", help="comma-separated translation ids")
    p.add_argument("--out", help="output directory (default: config out_dir)")

    p = add("cluster-markers", cmd_cluster_markers, "cluster pivot markers by JSD")
    p.add_argument("--config", required=True)
    p.add_argument("--feature", required=True)
    p.add_argument("--pivots", required=True)
    p.add_argument("--head", help="head.json (marks the head member)")
    p.add_argument("--out", help="output directory (default: config out_dir)")

    p = add(
        "cluster-languages",
        cmd_cluster_languages,
        "cluster languages from per-feature rankings",
    )
    p.add_argument("--config", required=True)
    p.add_argument("--features", required=True, help="comma-separated feature names")
    p.add_argument(
        "--from", dest="from_dir", required=True,
        help="directory holding <feature>/head.json and <feature>/ranking.tsv",
    )
    p.add_argument("--out", help="output directory (default: config out_dir)")

    p = add("map", cmd_map, "partition verses by splitting-pivot signatures")
    p.add_argument("--config", required=True)
    p.add_argument("--feature", required=True)
    p.add_argument("--pivots", required=True)
    p.add_argument("--head", help="head.json (marks the head member)")
    p.add_argument("--out", help="output directory (default: config out_dir)")

    p = add("project", cmd_project, "project a verse cluster into a translation")
    p.add_argument("--config", required=True)
    p.add_argument("--verses", required=True, help="file with one verse id per line")
    p.add_argument("--translation", required=True)
    p.add_argument("--out", help="output directory (default: config out_dir)")

    p = add("eval-mrr", cmd_eval_mrr, "score mined n-grams against gold markers")
    p.add_argument("--config", required=True)
    p.add_argument("--features", required=True, help="comma-separated feature names")
    p.add_argument(
        "--from", dest="from_dir", required=True,
        help="directory holding <feature>/ngrams/*.tsv",
    )
    p.add_argument("--out", help="output directory (default: config out_dir)")

    p = add("eval-family", cmd_eval_family, "same-family prediction from distances")
    p.add_argument("--config", required=True)
    p.add_argument("--distances", required=True, help="distance matrix TSV")
    p.add_argument("--out", help="output directory (default: config out_dir)")

    p = add("pipeline", cmd_pipeline, "run every stage for one feature")
    p.add_argument("--config", required=True)
    p.add_argument("--feature", required=True)
    p.add_argument("--out", help="output directory (default: config out_dir)")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
