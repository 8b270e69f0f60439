"""Command-line pipeline: subcommands over persisted stage artifacts.

Each stage reads the previous stage's artifact from the output directory
and writes its own atomically, so stages can be re-run independently and
re-running with unchanged inputs is byte-identical:

    ingest      corpus file            -> corpus.jsonl (filtered subcategory)
    match       corpus.jsonl + lexicon -> matched.json, lexicon_clean.txt
    preprocess  corpus.jsonl + matched -> dtm.json, preprocess_summary.txt
    train       dtm.json               -> model.bin
    sweep       dtm.json               -> sweep.csv
    report      model.bin + matched    -> report/*.csv or report/report.txt
    evaluate    model.bin + judgments  -> accuracy.csv
    pipeline    runs ingest .. report (+ evaluate when judgments are set)

Exit codes: 0 success; 2 missing input or upstream artifact (the message
names the stage); 3 validation failure. Errors are one line on stderr:
``supptopics: error: <reason>``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import (
    ENV_PREFIX,
    REPORT_FORMATS,
    PipelineConfig,
    resolve_config,
)
from .corex import CorexConfig, load_model, save_model, sweep, train
from .corpus import CORPUS_FORMATS, filter_subcategory, load_corpus, save_corpus
from .dtm import load_dtm, save_dtm
from .errors import MissingArtifactError, SuppTopicsError, ValidationError
from .fileio import atomic_write_text
from .lexicon import (
    clean_lexicon,
    load_lexicon,
    load_matched,
    match_ingredients,
    save_lexicon,
    save_matched,
)
from .preprocess import (
    build_streams,
    build_vocabulary,
    load_stopwords,
    summarize,
    vectorize,
)
from .reports import (
    accuracy_report,
    accuracy_table_csv,
    assignment_map,
    build_topic_report,
    ingredient_table_csv,
    load_judgments,
    question_table_csv,
    render_text,
    topic_table_csv,
)
from .taxonomy import Taxonomy, load_taxonomy

CORPUS_ARTIFACT = "corpus.jsonl"
MATCHED_ARTIFACT = "matched.json"
LEXICON_ARTIFACT = "lexicon_clean.txt"
DTM_ARTIFACT = "dtm.json"
SUMMARY_ARTIFACT = "preprocess_summary.txt"
MODEL_ARTIFACT = "model.bin"
SWEEP_ARTIFACT = "sweep.csv"
REPORT_DIR = "report"
ACCURACY_ARTIFACT = "accuracy.csv"

DEFAULT_SWEEP_SIZES = (100, 150, 200, 250)


def _input_path(value: str | None, stage: str, what: str, flag: str) -> Path:
    """A configured input path that must exist; errors name the stage."""
    if value is None:
        raise MissingArtifactError(
            f"{stage}: no {what} configured (set {flag} or the config key)"
        )
    path = Path(value)
    if not path.exists():
        raise MissingArtifactError(f"{stage}: {what} not found: {path}")
    return path


def _artifact_path(cfg: PipelineConfig, name: str, stage: str, producer: str) -> Path:
    path = cfg.out / name
    if not path.exists():
        raise MissingArtifactError(f"{stage}: missing {path} (run {producer} first)")
    return path


def _ensure_out(cfg: PipelineConfig) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    return cfg.out


# --- stages -------------------------------------------------------------------


def run_ingest(cfg: PipelineConfig) -> None:
    src = _input_path(cfg.corpus, "ingest", "corpus file", "--corpus")
    corpus = load_corpus(src, cfg.corpus_format)
    kept = filter_subcategory(corpus, cfg.subcategory)
    out = _ensure_out(cfg) / CORPUS_ARTIFACT
    save_corpus(kept, out, "record-per-line")
    print(f"ingest: kept {len(kept)} of {len(corpus)} questions -> {out}")


def run_match(cfg: PipelineConfig) -> None:
    lex_path = _input_path(cfg.lexicon, "match", "lexicon file", "--lexicon")
    corpus_path = _artifact_path(cfg, CORPUS_ARTIFACT, "match", "ingest")
    corpus = load_corpus(corpus_path, "record-per-line")
    lexicon = load_lexicon(lex_path, cfg.min_questions)
    matched = match_ingredients(corpus, lexicon)
    reduced, cleaned = clean_lexicon(matched, lexicon)
    out = _ensure_out(cfg)
    save_matched(cleaned, out / MATCHED_ARTIFACT)
    save_lexicon(reduced, out / LEXICON_ARTIFACT)
    print(
        f"match: {len(cleaned)} questions matched, {len(reduced)} of "
        f"{len(lexicon)} ingredients retained -> {out / MATCHED_ARTIFACT}"
    )


def run_preprocess(cfg: PipelineConfig) -> None:
    corpus_path = _artifact_path(cfg, CORPUS_ARTIFACT, "preprocess", "ingest")
    matched_path = _artifact_path(cfg, MATCHED_ARTIFACT, "preprocess", "match")
    stopword_path = (
        _input_path(cfg.stopwords, "preprocess", "stopword file", "--stopwords")
        if cfg.stopwords is not None
        else None
    )
    corpus = load_corpus(corpus_path, "record-per-line")
    matched = load_matched(matched_path)
    stops = load_stopwords(stopword_path)
    streams = build_streams(corpus, matched, stops, min_word_len=cfg.min_word_len)
    vocabulary, filtered = build_vocabulary(streams, cfg.min_count, cfg.max_doc_frac)
    matrix, dropped = vectorize(filtered, vocabulary)
    out = _ensure_out(cfg)
    save_dtm(matrix, list(vocabulary.words), out / DTM_ARTIFACT, dropped)
    summary = summarize(len(streams), filtered, vocabulary, dropped)
    atomic_write_text(out / SUMMARY_ARTIFACT, summary.render())
    print(
        f"preprocess: {matrix.n_docs} documents x {matrix.n_words} words"
        f" (dropped {len(dropped)} empty) -> {out / DTM_ARTIFACT}"
    )


def _corex_config(cfg: PipelineConfig, n_topics: int | None = None) -> CorexConfig:
    return CorexConfig(
        n_topics=cfg.n_topics if n_topics is None else n_topics,
        max_iter=cfg.max_iter,
        tol=cfg.tol,
        seed=cfg.seed,
    )


def run_train(cfg: PipelineConfig) -> None:
    dtm_path = _artifact_path(cfg, DTM_ARTIFACT, "train", "preprocess")
    matrix, vocabulary, _ = load_dtm(dtm_path)
    model = train(matrix, _corex_config(cfg), vocabulary)
    out = _ensure_out(cfg) / MODEL_ARTIFACT
    save_model(model, out)
    print(
        f"train: {model.n_topics} topics over {model.n_docs} documents,"
        f" objective {model.objective_trace[-1]:.6f},"
        f" converged={str(model.converged).lower()} -> {out}"
    )


def run_sweep(cfg: PipelineConfig, sizes: tuple[int, ...] = DEFAULT_SWEEP_SIZES) -> None:
    dtm_path = _artifact_path(cfg, DTM_ARTIFACT, "sweep", "preprocess")
    matrix, vocabulary, _ = load_dtm(dtm_path)
    entries = sweep(matrix, sizes, _corex_config(cfg, n_topics=sizes[0]), vocabulary)
    lines = ["n_topics,total_tc,mean_tc"]
    lines.extend(
        f"{e.n_topics},{e.total_tc:.6f},{e.mean_tc:.6f}" for e in entries
    )
    out = _ensure_out(cfg) / SWEEP_ARTIFACT
    atomic_write_text(out, "\n".join(lines) + "\n")
    print(f"sweep: {len(entries)} sizes -> {out}")


def run_report(cfg: PipelineConfig, topics: tuple[int, ...] | None = None) -> None:
    model_path = _artifact_path(cfg, MODEL_ARTIFACT, "report", "train")
    matched_path = _artifact_path(cfg, MATCHED_ARTIFACT, "report", "match")
    model = load_model(model_path)
    matched = load_matched(matched_path)
    if cfg.taxonomy is not None:
        taxonomy_path = _input_path(cfg.taxonomy, "report", "taxonomy file", "--taxonomy")
        taxonomy = load_taxonomy(taxonomy_path, model.n_topics)
    else:
        taxonomy = Taxonomy(model.n_topics, (), (), ())
    assignments = assignment_map(model, cfg.assign_threshold)
    if topics is None:
        populated = set().union(*assignments.values()) if assignments else set()
        topics = tuple(t for t in range(model.n_topics) if t in populated)
    rows = build_topic_report(
        model,
        taxonomy,
        matched,
        assignments,
        topics,
        top_k_words=cfg.top_k_words,
        top_k_docs=cfg.top_k_docs,
        min_frac=cfg.min_frac,
    )
    report_dir = _ensure_out(cfg) / REPORT_DIR
    report_dir.mkdir(parents=True, exist_ok=True)
    if cfg.report_format == "csv":
        atomic_write_text(report_dir / "topics.csv", topic_table_csv(rows))
        atomic_write_text(report_dir / "top_questions.csv", question_table_csv(rows))
        atomic_write_text(report_dir / "ingredients.csv", ingredient_table_csv(rows))
    else:
        atomic_write_text(report_dir / "report.txt", render_text(rows))
    print(f"report: {len(rows)} topics ({cfg.report_format}) -> {report_dir}")


def run_evaluate(cfg: PipelineConfig) -> None:
    model_path = _artifact_path(cfg, MODEL_ARTIFACT, "evaluate", "train")
    judgment_path = _input_path(cfg.judgments, "evaluate", "judgment file", "--judgments")
    model = load_model(model_path)
    judgments = load_judgments(judgment_path)
    records = accuracy_report(judgments, model)
    out = _ensure_out(cfg) / ACCURACY_ARTIFACT
    atomic_write_text(out, accuracy_table_csv(records))
    print(f"evaluate: {len(records)} topics judged -> {out}")


def run_pipeline(cfg: PipelineConfig) -> None:
    run_ingest(cfg)
    run_match(cfg)
    run_preprocess(cfg)
    run_train(cfg)
    run_report(cfg)
    if cfg.judgments is not None:
        run_evaluate(cfg)
    else:
        print("pipeline: no judgments configured; evaluation skipped")


# --- argument parsing -----------------------------------------------------------


def _parse_int_list(raw: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ValidationError(f"{flag} expects comma-separated integers, got {raw!r}") from None
    if not values:
        raise ValidationError(f"{flag} expects at least one integer")
    return values


_OVERRIDE_FIELDS = (
    "corpus", "lexicon", "stopwords", "taxonomy", "judgments", "output_dir",
    "corpus_format", "subcategory", "min_questions", "min_word_len",
    "min_count", "max_doc_frac", "n_topics", "seed", "max_iter", "tol",
    "top_k_words", "top_k_docs", "assign_threshold", "min_frac",
    "report_format",
)


def _shared_options() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", metavar="PATH", help="config file to load")
    g = shared.add_argument_group(
        "overrides", f"each flag overrides its config key (env prefix {ENV_PREFIX})"
    )
    g.add_argument("--corpus", help="input corpus file")
    g.add_argument("--lexicon", help="ingredient lexicon file")
    g.add_argument("--stopwords", help="stopword list (default: packaged)")
    g.add_argument("--taxonomy", help="taxonomy file for report labels")
    g.add_argument("--judgments", help="human judgment file")
    g.add_argument("--output-dir", dest="output_dir", help="artifact directory")
    g.add_argument("--corpus-format", dest="corpus_format", choices=CORPUS_FORMATS)
    g.add_argument("--subcategory", help="subcategory to keep at ingest")
    g.add_argument("--min-questions", dest="min_questions", type=int,
                   help="ingredient question-count threshold")
    g.add_argument("--min-word-len", dest="min_word_len", type=int,
                   help="minimum token length")
    g.add_argument("--min-count", dest="min_count", type=int,
                   help="minimum corpus word count")
    g.add_argument("--max-doc-frac", dest="max_doc_frac", type=float,
                   help="maximum document frequency fraction")
    g.add_argument("--n-topics", dest="n_topics", type=int, help="model size")
    g.add_argument("--seed", type=int, help="random seed")
    g.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap")
    g.add_argument("--tol", type=float, help="convergence tolerance")
    g.add_argument("--top-k-words", dest="top_k_words", type=int,
                   help="keywords per topic in reports")
    g.add_argument("--top-k-docs", dest="top_k_docs", type=int,
                   help="questions per topic in reports")
    g.add_argument("--assign-threshold", dest="assign_threshold", type=float,
                   help="posterior threshold for topic assignment")
    g.add_argument("--min-frac", dest="min_frac", type=float,
                   help="ingredient reporting threshold")
    g.add_argument("--report-format", dest="report_format", choices=REPORT_FORMATS)
    return shared


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supptopics",
        description="Mine supplement-related information-need topics from question corpora.",
    )
    shared = _shared_options()
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("ingest", parents=[shared],
                       help="load the corpus and filter to the target subcategory")
    p.add_argument("--format", dest="corpus_format", choices=CORPUS_FORMATS,
                   help="input corpus format")
    sub.add_parser("match", parents=[shared],
                   help="match and clean the ingredient lexicon")
    sub.add_parser("preprocess", parents=[shared],
                   help="mask, tokenize, filter, and vectorize")
    sub.add_parser("train", parents=[shared], help="train the topic model")
    p = sub.add_parser("sweep", parents=[shared],
                       help="train one model per candidate size")
    p.add_argument("--sizes", default=None,
                   help="comma-separated topic counts (default 100,150,200,250)")
    p = sub.add_parser("report", parents=[shared], help="write report tables")
    p.add_argument("--format", dest="report_format", choices=REPORT_FORMATS,
                   help="report output format")
    p.add_argument("--topics", default=None,
                   help="comma-separated topic indices (default: all assigned)")
    sub.add_parser("evaluate", parents=[shared],
                   help="score human judgments against the model")
    sub.add_parser("pipeline", parents=[shared], help="run every stage in order")

    p_tax = sub.add_parser("taxonomy", help="taxonomy utilities")
    tax_sub = p_tax.add_subparsers(dest="taxonomy_command", required=True)
    p = tax_sub.add_parser("validate", help="parse and validate a taxonomy file")
    p.add_argument("path", help="taxonomy file")
    p.add_argument("--n-topics", dest="n_topics", type=int, default=200,
                   help="model size the taxonomy must fit (default 200)")
    return parser


def _flag_overrides(args: argparse.Namespace) -> dict[str, object]:
    overrides: dict[str, object] = {}
    for field in _OVERRIDE_FIELDS:
        value = getattr(args, field, None)
        if value is not None:
            overrides[field] = value
    return overrides


def _cmd_taxonomy(args: argparse.Namespace) -> int:
    taxonomy = load_taxonomy(args.path, args.n_topics)
    categories, groups = taxonomy.cardinality
    print(
        f"taxonomy: {len(taxonomy.topics)} mapped topics,"
        f" categories={categories}, groups={groups}"
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "taxonomy":
            return _cmd_taxonomy(args)
        cfg = resolve_config(args.config, _flag_overrides(args))
        if args.command == "ingest":
            run_ingest(cfg)
        elif args.command == "match":
            run_match(cfg)
        elif args.command == "preprocess":
            run_preprocess(cfg)
        elif args.command == "train":
            run_train(cfg)
        elif args.command == "sweep":
            sizes = (
                _parse_int_list(args.sizes, "--sizes")
                if args.sizes is not None
                else DEFAULT_SWEEP_SIZES
            )
            run_sweep(cfg, sizes)
        elif args.command == "report":
            topics = (
                _parse_int_list(args.topics, "--topics")
                if args.topics is not None
                else None
            )
            run_report(cfg, topics)
        elif args.command == "evaluate":
            run_evaluate(cfg)
        elif args.command == "pipeline":
            run_pipeline(cfg)
        else:  # pragma: no cover - argparse enforces the choices
            raise ValidationError(f"unknown command {args.command!r}")
    except MissingArtifactError as exc:
        print(f"supptopics: error: {exc}", file=sys.stderr)
        return 2
    except SuppTopicsError as exc:
        print(f"supptopics: error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
