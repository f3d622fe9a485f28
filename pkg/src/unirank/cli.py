"""Command-line entry point.

Subcommands: ``ingest`` (corpus TSVs -> normalized JSON), ``index``
(persist fitted vectors), ``rank`` (per-question rankings + submission
file), ``eval`` (MAP report, ablations, figure CSVs and PNG renderings),
``export-qa`` (question/candidate/top-K-explanation records) and
``sweep`` (MAP vs neighbour count).

Exit codes: 0 success, 1 internal error, 2 usage or input error. Every
run writes a manifest next to its outputs; flags override the --config
file and the effective configuration is echoed into the manifest.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

from . import evaluation, plots
from .corpus import (
    CorpusError,
    IngestReport,
    Split,
    build_hypothesis,
    dump_corpus,
    load_corpus,
    parse_fact_tables,
    parse_questions,
)
from .ranker import RankerConfig, config_from_dict
from .runner import (
    PhaseTimer,
    RunManifest,
    batch_rank,
    build_pipeline,
    build_ranker,
    resolve_path,
    tool_version,
)
from .vectors import fit, save_index, scheme_from_name, vectorize


class UsageError(Exception):
    """Input or usage problem: reported on stderr, exit code 2."""


# ---------------------------------------------------------------------------
# Argument plumbing


def _add_preprocessing_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--stopwords",
        default=None,
        help="stopword file, 'default' for the bundled list, or 'none'",
    )
    parser.add_argument("--lemmas", default=None, help="optional surface<TAB>lemma map file")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="JSON config file (flags override it)")
    parser.add_argument("--model", choices=["rs", "us", "joint"], default=None,
                        help="preset: rs (lambda1=1), us (lambda1=0), joint (default)")
    parser.add_argument("--lambda1", type=float, default=None,
                        help="weight of the relevance score in the combination")
    parser.add_argument("--k", type=int, default=None, help="number of nearest hypotheses")
    parser.add_argument("--rs-scheme", choices=["tfidf", "bm25"], default=None)
    parser.add_argument("--us-scheme", choices=["tfidf", "bm25"], default=None)
    parser.add_argument("--bm25-k1", type=float, default=None)
    parser.add_argument("--bm25-b", type=float, default=None)
    parser.add_argument("--normalization", choices=["max", "none"], default=None)
    parser.add_argument("--fit-scope", choices=["facts+train", "facts"], default=None)
    _add_preprocessing_flags(parser)


def _load_config_file(args: argparse.Namespace) -> dict:
    if not getattr(args, "config", None):
        return {}
    path = resolve_path(args.config)
    if not path.is_file():
        raise UsageError(f"config file not found: {args.config}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {args.config} is not valid JSON: {exc}") from exc


_CONFIG_KEYS = frozenset(
    {"lambda1", "k", "rs_scheme", "us_scheme", "bm25_k1", "bm25_b",
     "normalization", "fit_scope", "stopwords", "lemmas"}
)


def _config_from_args(args: argparse.Namespace, raw: dict | None = None) -> RankerConfig:
    raw = dict(raw) if raw is not None else _load_config_file(args)
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config file key(s): {', '.join(sorted(unknown))}")
    raw.pop("stopwords", None)
    raw.pop("lemmas", None)
    default_k1 = raw.pop("bm25_k1", 1.2)
    default_b = raw.pop("bm25_b", 0.75)

    if args.model == "rs":
        raw["lambda1"] = 1.0
    elif args.model == "us":
        raw["lambda1"] = 0.0
    if args.lambda1 is not None:
        raw["lambda1"] = args.lambda1
    if args.k is not None:
        raw["k"] = args.k
    if args.rs_scheme is not None:
        raw["rs_scheme"] = args.rs_scheme
    if args.us_scheme is not None:
        raw["us_scheme"] = args.us_scheme
    if args.normalization is not None:
        raw["normalization"] = args.normalization
    if args.fit_scope is not None:
        raw["fit_scope"] = args.fit_scope

    for key in ("rs_scheme", "us_scheme"):
        scheme = raw.get(key, "bm25")
        if isinstance(scheme, dict):
            name = scheme.get("scheme", "bm25")
            k1, b = scheme.get("k1", default_k1), scheme.get("b", default_b)
        else:
            name, k1, b = scheme, default_k1, default_b
        if args.bm25_k1 is not None:
            k1 = args.bm25_k1
        if args.bm25_b is not None:
            b = args.bm25_b
        raw[key] = {"scheme": name, "k1": k1, "b": b} if name == "bm25" else {"scheme": name}
    try:
        return config_from_dict(raw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _pipeline_settings(args: argparse.Namespace, raw: dict | None = None) -> dict:
    """Effective preprocessing settings: flags override the config file."""
    raw = raw if raw is not None else _load_config_file(args)
    stopwords = args.stopwords if args.stopwords is not None else raw.get("stopwords", "default")
    lemmas = args.lemmas if args.lemmas is not None else raw.get("lemmas")
    return {"stopwords": stopwords, "lemmas": lemmas}


def _pipeline_from_args(args: argparse.Namespace, raw: dict | None = None):
    settings = _pipeline_settings(args, raw)
    try:
        return settings, build_pipeline(**settings)
    except (OSError, ValueError) as exc:
        raise UsageError(f"failed to load preprocessing files: {exc}") from exc


def _preprocessing_snapshot(settings: dict, pipeline) -> dict:
    snapshot = dict(settings)
    snapshot.update(pipeline.describe())
    return snapshot


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"{flag} expects a comma-separated integer list, got {text!r}") from exc
    if not values:
        raise UsageError(f"{flag} expects at least one value")
    return values


def _parse_length_bins(text: str) -> tuple:
    """Parse '1-2,3-5,6+' style bucket declarations."""
    bins = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if part.endswith("+"):
                bins.append((int(part[:-1]), None))
            elif "-" in part:
                lo, hi = part.split("-", 1)
                bins.append((int(lo), int(hi)))
            else:
                bins.append((int(part), int(part)))
        except ValueError as exc:
            raise UsageError(f"bad length bin {part!r} (use '3', '3-5' or '6+')") from exc
    if not bins:
        raise UsageError("--length-bins expects at least one bucket")
    return tuple(bins)


# ---------------------------------------------------------------------------
# Commands


def cmd_ingest(args: argparse.Namespace) -> int:
    timer = PhaseTimer()
    timer.start("ingest")
    tables_dir = resolve_path(args.tables)
    questions_path = resolve_path(args.questions)
    if not tables_dir.is_dir():
        raise UsageError(f"tables directory not found: {args.tables}")
    if not questions_path.is_file():
        raise UsageError(f"questions file not found: {args.questions}")
    split = Split(args.split)

    report = IngestReport()
    try:
        fact_kb, _ = parse_fact_tables(tables_dir, report, args.type_map)
        questions, _ = parse_questions(questions_path, split, report)
    except CorpusError as exc:
        raise UsageError(str(exc)) from exc
    dump_corpus(args.out, fact_kb, questions, split)
    timer.stop("ingest")

    for message in report.warnings:
        print(f"warning: {message}", file=sys.stderr)
    manifest = RunManifest(
        command="ingest",
        config={"split": split.value, "tables": str(tables_dir), "questions": str(questions_path)},
        preprocessing={},
        warnings=len(report),
        timings_s=timer.timings,
        outputs=[str(args.out)],
    )
    for path in sorted(tables_dir.glob("*.tsv")):
        manifest.add_input(path)
    manifest.add_input(questions_path)
    manifest.write(Path(args.out).with_suffix(".manifest.json"))
    print(
        f"ingested {len(fact_kb)} facts, {len(questions)} questions "
        f"({split.value}) -> {args.out} [{len(report)} warning(s)]"
    )
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    settings, pipeline = _pipeline_from_args(args)
    corpus_path = resolve_path(args.corpus)
    if not corpus_path.is_file():
        raise UsageError(f"corpus file not found: {args.corpus}")
    scheme = scheme_from_name(
        args.scheme,
        k1=args.bm25_k1 if args.bm25_k1 is not None else 1.2,
        b=args.bm25_b if args.bm25_b is not None else 0.75,
    )

    timer = PhaseTimer()
    timer.start("index")
    fact_kb, _, _ = load_corpus(corpus_path)
    facts = sorted(fact_kb.facts(), key=lambda f: f.uid)
    docs = [pipeline.tokens(f.text) for f in facts]
    if args.train:
        train_path = resolve_path(args.train)
        _, train_questions, _ = load_corpus(train_path)
        docs = docs + [
            pipeline.tokens(build_hypothesis(q, q.answer_key).text)
            for q in train_questions
            if q.explanation is not None
        ]
    stats = fit(docs)
    vectors = {
        f.uid: vectorize(pipeline.tokens(f.text), stats, scheme) for f in facts
    }
    save_index(args.out, stats, scheme, vectors)
    timer.stop("index")

    manifest = RunManifest(
        command="index",
        config={"scheme": scheme.describe(), "fit_scope": "facts+train" if args.train else "facts"},
        preprocessing=_preprocessing_snapshot(settings, pipeline),
        timings_s=timer.timings,
        outputs=[str(args.out)],
    )
    manifest.add_input(corpus_path)
    if args.train:
        manifest.add_input(resolve_path(args.train))
    manifest.write(Path(args.out).with_suffix(".manifest.json"))
    print(f"indexed {len(vectors)} facts ({scheme.name}) -> {args.out}")
    return 0


class RunContext:
    """Shared rank/eval/export setup: pipeline, ranker, questions."""

    def __init__(self, args: argparse.Namespace):
        raw = _load_config_file(args)
        self.config = _config_from_args(args, raw)
        settings, self.pipeline = _pipeline_from_args(args, raw)
        self.preprocessing = _preprocessing_snapshot(settings, self.pipeline)
        self.corpus_path = resolve_path(args.corpus)
        if not self.corpus_path.is_file():
            raise UsageError(f"corpus file not found: {args.corpus}")
        self.train_path = resolve_path(args.train) if args.train else None
        if args.train and not self.train_path.is_file():
            raise UsageError(f"train corpus file not found: {args.train}")
        try:
            self.ranker, self.questions, self.split, self.report = build_ranker(
                self.corpus_path, self.train_path, self.pipeline, self.config
            )
        except CorpusError as exc:
            raise UsageError(str(exc)) from exc

    def manifest_inputs(self, manifest: RunManifest) -> None:
        manifest.add_input(self.corpus_path)
        if self.train_path:
            manifest.add_input(self.train_path)


def cmd_rank(args: argparse.Namespace) -> int:
    timer = PhaseTimer()
    timer.start("build")
    run = RunContext(args)
    timer.stop("build")

    questions = run.questions
    if args.qids:
        wanted = [q.strip() for q in args.qids.split(",") if q.strip()]
        by_qid = {q.qid: q for q in questions}
        missing = [qid for qid in wanted if qid not in by_qid]
        if missing:
            raise UsageError(f"unknown question id(s): {', '.join(missing)}")
        questions = [by_qid[qid] for qid in wanted]
    if not questions:
        raise UsageError(f"no questions to rank in {run.corpus_path}")

    timer.start("rank")
    ranked, mean_latency = batch_rank(run.ranker, questions, workers=args.workers)
    timer.stop("rank")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    top_n = None if args.full else args.top_n
    timer.start("write")
    evaluation.write_rankings_tsv(out_dir / "rankings.tsv", ranked, top_n)
    evaluation.write_submission(out_dir / "submission.tsv", ranked, top_n)
    timer.stop("write")

    manifest = RunManifest(
        command="rank",
        config=run.config.describe(),
        preprocessing=run.preprocessing,
        warnings=len(run.report),
        timings_s=timer.timings,
        outputs=["rankings.tsv", "submission.tsv"],
    )
    manifest.config["top_n"] = top_n
    run.manifest_inputs(manifest)
    manifest.write(out_dir / "manifest.json")

    print(
        f"ranked {len(questions)} question(s) over {len(run.ranker.fact_kb)} facts; "
        f"mean per-question latency {mean_latency * 1000:.1f} ms"
    )
    return 0


_ABLATION_MODELS: tuple[tuple[str, dict], ...] = (
    ("rs_tfidf", {"lambda1": 1.0, "rs_scheme": "tfidf"}),
    ("rs_bm25", {"lambda1": 1.0, "rs_scheme": "bm25"}),
    ("us_tfidf", {"lambda1": 0.0, "us_scheme": "tfidf"}),
    ("us_bm25", {"lambda1": 0.0, "us_scheme": "bm25"}),
    ("rs_tfidf+us_tfidf", {"rs_scheme": "tfidf", "us_scheme": "tfidf"}),
    ("rs_tfidf+us_bm25", {"rs_scheme": "tfidf", "us_scheme": "bm25"}),
    ("rs_bm25+us_tfidf", {"rs_scheme": "bm25", "us_scheme": "tfidf"}),
    ("rs_bm25+us_bm25", {"rs_scheme": "bm25", "us_scheme": "bm25"}),
)


def _ablation_configs(base: RankerConfig) -> list[RankerConfig]:
    base_dict = {
        "lambda1": base.lambda1,
        "k": base.k,
        "normalization": base.normalization,
        "fit_scope": base.fit_scope,
    }
    k1, b = 1.2, 0.75
    for scheme in (base.rs_scheme, base.us_scheme):
        if hasattr(scheme, "k1"):
            k1, b = scheme.k1, scheme.b
            break
    configs = []
    for _, overrides in _ABLATION_MODELS:
        raw = dict(base_dict)
        raw.update(overrides)
        for key in ("rs_scheme", "us_scheme"):
            name = raw.get(key, "bm25")
            raw[key] = {"scheme": name, "k1": k1, "b": b} if name == "bm25" else {"scheme": name}
        configs.append(config_from_dict(raw))
    return configs


def cmd_eval(args: argparse.Namespace) -> int:
    timer = PhaseTimer()
    timer.start("build")
    run = RunContext(args)
    config, ranker, questions = run.config, run.ranker, run.questions
    gold_sets, gold_warnings = evaluation.build_gold_sets(questions, ranker.fact_kb, run.pipeline)
    if not gold_sets:
        raise UsageError(f"no gold explanations available in {run.corpus_path}; cannot evaluate")
    timer.stop("build")

    ks = tuple(_parse_int_list(args.precision_ks, "--precision-ks")) \
        if args.precision_ks else evaluation.DEFAULT_PRECISION_KS
    length_bins = _parse_length_bins(args.length_bins) \
        if args.length_bins else evaluation.DEFAULT_LENGTH_BINS

    def pooled(r, queries):
        ranked, _ = batch_rank(r, queries, workers=args.workers)
        return {rl.query_qid: list(rl.uids) for rl in ranked}

    reports = []
    timer.start("evaluate")
    if args.rankings:
        rankings_path = resolve_path(args.rankings)
        if not rankings_path.is_file():
            raise UsageError(f"rankings file not found: {args.rankings}")
        rankings = evaluation.read_submission(rankings_path)
        reports.append(
            evaluation.evaluate_rankings(
                rankings, gold_sets,
                model=config.model_name, config=config.describe(),
                num_facts=len(ranker.fact_kb), ks=ks, length_bins=length_bins,
                warnings=gold_warnings,
            )
        )
    elif args.ablate:
        for ablate_config in _ablation_configs(config):
            swept = ranker.with_config(
                lambda1=ablate_config.lambda1,
                k=ablate_config.k,
                normalization=ablate_config.normalization,
                rs_scheme=ablate_config.rs_scheme,
                us_scheme=ablate_config.us_scheme,
            )
            reports.append(
                evaluation.run_eval(swept, questions, gold_sets, ks=ks,
                                    length_bins=length_bins, rank_worker=pooled)
            )
        reports[0].warnings = gold_warnings + reports[0].warnings
    else:
        model_report = evaluation.run_eval(ranker, questions, gold_sets, ks=ks,
                                           length_bins=length_bins, rank_worker=pooled)
        model_report.warnings = gold_warnings + model_report.warnings
        reports.append(model_report)
    timer.stop("evaluate")

    out_dir = Path(args.out_dir)
    figures_dir = out_dir / "figures"
    figures_dir.mkdir(parents=True, exist_ok=True)

    sweep = None
    if args.sweep_k:
        k_values = _parse_int_list(args.sweep_k, "--sweep-k")
        timer.start("sweep")
        sweep = evaluation.knn_sweep(ranker, questions, gold_sets, k_values, rank_worker=pooled)
        timer.stop("sweep")

    timer.start("write")
    if sweep is not None:
        evaluation.write_sweep_csv(figures_dir / "knn_sweep.csv", sweep, config.model_name)

    evaluation.write_report(out_dir / "report.json", reports, run.preprocessing)
    evaluation.write_length_csv(figures_dir / "map_by_length.csv", reports, length_bins)
    evaluation.write_precision_csv(figures_dir / "precision_at_k.csv", reports, ks)
    rendered: list[Path] = []
    if not args.no_plots:
        rendered = plots.render_figures(figures_dir)
    timer.stop("write")

    manifest = RunManifest(
        command="eval",
        config=config.describe(),
        preprocessing=run.preprocessing,
        warnings=len(run.report) + sum(len(r.warnings) for r in reports),
        timings_s=timer.timings,
        outputs=["report.json", "figures/map_by_length.csv", "figures/precision_at_k.csv"]
        + (["figures/knn_sweep.csv"] if sweep is not None else [])
        + [f"figures/{p.name}" for p in rendered],
    )
    run.manifest_inputs(manifest)
    if args.rankings:
        manifest.add_input(resolve_path(args.rankings))
    manifest.write(out_dir / "manifest.json")

    for r in reports:
        print(f"{r.model}: MAP {r.overall_map:.4f} over {r.num_questions} question(s)")
    return 0


def cmd_export_qa(args: argparse.Namespace) -> int:
    timer = PhaseTimer()
    timer.start("build")
    run = RunContext(args)
    timer.stop("build")
    if args.top_k < 1:
        raise UsageError(f"--top-k must be >= 1, got {args.top_k}")

    timer.start("export")
    records = []
    for question in run.questions:
        for choice in question.choices:
            hypothesis = build_hypothesis(question, choice.label)
            top = run.ranker.explain_topk(hypothesis, args.top_k)
            records.append(
                {
                    "qid": question.qid,
                    "label": choice.label,
                    "question": question.stem,
                    "candidate": choice.text,
                    "is_correct": hypothesis.is_correct_candidate,
                    "explanation": [run.ranker.fact_kb[uid].text for uid in top],
                    "explanation_uids": top,
                }
            )
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
    timer.stop("export")

    manifest = RunManifest(
        command="export-qa",
        config={**run.config.describe(), "top_k": args.top_k},
        preprocessing=run.preprocessing,
        warnings=len(run.report),
        timings_s=timer.timings,
        outputs=[str(out_path)],
    )
    run.manifest_inputs(manifest)
    manifest.write(out_path.with_suffix(".manifest.json"))
    print(f"exported {len(records)} question/candidate record(s) -> {out_path}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    timer = PhaseTimer()
    timer.start("build")
    run = RunContext(args)
    gold_sets, gold_warnings = evaluation.build_gold_sets(
        run.questions, run.ranker.fact_kb, run.pipeline
    )
    if not gold_sets:
        raise UsageError(f"no gold explanations available in {run.corpus_path}; cannot sweep")
    timer.stop("build")

    k_values = _parse_int_list(args.k_values, "--k-values")

    def pooled(r, queries):
        ranked, _ = batch_rank(r, queries, workers=args.workers)
        return {rl.query_qid: list(rl.uids) for rl in ranked}

    timer.start("sweep")
    sweep = evaluation.knn_sweep(run.ranker, run.questions, gold_sets, k_values,
                                 rank_worker=pooled)
    timer.stop("sweep")

    out_dir = Path(args.out_dir)
    figures_dir = out_dir / "figures"
    figures_dir.mkdir(parents=True, exist_ok=True)
    evaluation.write_sweep_csv(figures_dir / "knn_sweep.csv", sweep, run.config.model_name)
    rendered = [] if args.no_plots else plots.render_figures(figures_dir)

    manifest = RunManifest(
        command="sweep",
        config={**run.config.describe(), "k_values": k_values},
        preprocessing=run.preprocessing,
        warnings=len(run.report) + len(gold_warnings),
        timings_s=timer.timings,
        outputs=["figures/knn_sweep.csv"] + [f"figures/{p.name}" for p in rendered],
    )
    run.manifest_inputs(manifest)
    manifest.write(out_dir / "manifest.json")

    for k in sorted(sweep):
        print(f"k={k}: MAP {sweep[k]:.4f}")
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unirank",
        description="Explanation reconstruction: joint relevance + unification ranking",
    )
    parser.add_argument("--version", action="version", version=f"unirank {tool_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse corpus TSVs into normalized JSON")
    p.add_argument("--tables", required=True, help="directory of fact table TSVs")
    p.add_argument("--questions", required=True, help="questions TSV for one split")
    p.add_argument("--split", required=True, choices=["train", "dev", "test"])
    p.add_argument("--out", required=True, help="normalized corpus JSON output path")
    p.add_argument("--type-map", default=None, help="table-name -> inference-type JSON file")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="fit and persist fact vectors")
    p.add_argument("--corpus", required=True, help="normalized corpus JSON")
    p.add_argument("--train", default=None, help="normalized train corpus (extends fit scope)")
    p.add_argument("--scheme", required=True, choices=["tfidf", "bm25"])
    p.add_argument("--bm25-k1", type=float, default=None)
    p.add_argument("--bm25-b", type=float, default=None)
    p.add_argument("--out", required=True)
    _add_preprocessing_flags(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("rank", help="rank the fact KB for each question")
    p.add_argument("--corpus", required=True, help="normalized corpus JSON to rank")
    p.add_argument("--train", default=None, help="normalized train corpus (explanation bank)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--qids", default=None, help="comma-separated question id filter")
    p.add_argument("--top-n", type=int, default=500,
                   help="ranks kept per question in output files (default 500)")
    p.add_argument("--full", action="store_true", help="write the full KB ranking per question")
    p.add_argument("--workers", type=int, default=None)
    _add_config_flags(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("eval", help="score rankings and emit the report + figures")
    p.add_argument("--corpus", required=True, help="normalized corpus JSON with gold explanations")
    p.add_argument("--train", default=None, help="normalized train corpus (explanation bank)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--rankings", default=None,
                   help="score an existing qid<TAB>fact_uid submission file instead of ranking")
    p.add_argument("--ablate", action="store_true",
                   help="evaluate the pure models and all four scheme combinations")
    p.add_argument("--sweep-k", default=None, help="comma-separated k values for knn_sweep.csv")
    p.add_argument("--precision-ks", default=None, help="comma-separated K values for Precision@K")
    p.add_argument("--length-bins", default=None,
                   help="explanation-length buckets, e.g. '1-2,3-5,6+'")
    p.add_argument("--no-plots", action="store_true", help="skip PNG rendering of figure CSVs")
    p.add_argument("--workers", type=int, default=None)
    _add_config_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export-qa", help="export question/candidate/top-K explanation records")
    p.add_argument("--corpus", required=True)
    p.add_argument("--train", default=None)
    p.add_argument("--out", required=True, help="JSONL output path")
    p.add_argument("--top-k", type=int, default=3, help="explanation sentences per record")
    _add_config_flags(p)
    p.set_defaults(func=cmd_export_qa)

    p = sub.add_parser("sweep", help="MAP for a list of neighbour counts")
    p.add_argument("--corpus", required=True)
    p.add_argument("--train", default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--k-values", required=True, help="comma-separated k values")
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    _add_config_flags(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
