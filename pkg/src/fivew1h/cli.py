"""Command-line entry point.

Subcommands: extract, evaluate, sweep, baseline, explain, validate-corpus.
Exit codes: 0 success, 1 per-article failures occurred, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .baseline import BaselineParticipant, HttpChatClient, quotation_report, run_baseline
from .config import ConfigError, load_baseline_example, load_config, make_annotate_fn, make_options, make_resources
from .document import QUESTIONS, Span
from .evaluate import (
    AnnotatorParticipant,
    CorpusError,
    SystemParticipant,
    answer_count_stats,
    load_corpus,
    load_corpus_article,
    pairwise_agreement,
    read_manifest,
    threshold_sweep,
)
from .pipeline import run_document
from .selection import Answer, FactorContribution, answer_set_to_json, explain as explain_answer

EXIT_OK = 0
EXIT_ARTICLE_FAILURES = 1
EXIT_CONFIG = 2


def _dump_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def cmd_extract(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.jobs:
        config.jobs = args.jobs
    resources = make_resources(config)
    options = make_options(config)
    annotate_fn = make_annotate_fn(config, resources)
    out_dir = Path(args.out or config.output_dir)

    def process(article_id: str):
        article = load_corpus_article(args.corpus, article_id).article
        doc = annotate_fn(article)
        _scored, answers = run_document(doc, resources, options)
        return answer_set_to_json(article_id, answers)

    ids = sorted(read_manifest(args.corpus))
    errors: dict[str, str] = {}
    reports: dict[str, dict] = {}
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        for article_id, outcome in zip(ids, pool.map(lambda i: _capture(process, i), ids)):
            report, error = outcome
            if error is not None:
                errors[article_id] = error
            else:
                reports[article_id] = report
    for article_id in sorted(reports):
        _dump_json(out_dir / f"{article_id}.json", reports[article_id])
    if errors:
        for article_id in sorted(errors):
            print(f"error: {article_id}: {errors[article_id]}", file=sys.stderr)
        return EXIT_ARTICLE_FAILURES
    print(f"extracted answers for {len(reports)} article(s) into {out_dir}")
    return EXIT_OK


def _capture(fn, arg):
    try:
        return fn(arg), None
    except Exception as exc:
        return None, str(exc)


def _build_participants(args, config, corpus, resources, options):
    wanted = [p.strip() for p in args.participants.split(",") if p.strip()]
    if not wanted:
        raise CorpusError("empty participant list")
    participants = []
    for pid in wanted:
        if pid == "system":
            participants.append(SystemParticipant(corpus, resources, options,
                                                  make_annotate_fn(config, resources)))
        elif pid == "baseline":
            cache_dir = args.baseline_cache or config.baseline_cache_dir
            if not cache_dir:
                raise CorpusError("participant 'baseline' needs --baseline-cache or baseline.cache_dir")
            articles = [ca.article for ca in corpus.articles]
            results = run_baseline(articles, client=None, cache_dir=cache_dir)
            participants.append(BaselineParticipant(results))
        else:
            participants.append(AnnotatorParticipant(corpus, pid))
    return participants


def _agreement_table(report) -> str:
    lines = []
    for question in QUESTIONS:
        lines.append(f"[{question}]")
        for (a, b), value in sorted(report.per_question[question].items()):
            shown = "n/a" if value is None else f"{value:.4f}"
            lines.append(f"  {a:<12} vs {b:<12} {shown}")
    overall = "n/a" if report.overall_mean is None else f"{report.overall_mean:.4f}"
    lines.append(f"overall mean: {overall}")
    return "\n".join(lines)


def _counts_table(counts: dict) -> str:
    participants = sorted(counts)
    header = f"{'question':<10}" + "".join(f"{p:>14}" for p in participants)
    lines = [header]
    for question in (*QUESTIONS, "all"):
        row = f"{question:<10}"
        for participant in participants:
            value = counts[participant].get(question)
            row += f"{'n/a':>14}" if value is None else f"{value:>14.2f}"
        lines.append(row)
    return "\n".join(lines)


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    resources = make_resources(config)
    options = make_options(config)
    corpus = load_corpus(args.corpus)
    if not corpus.annotator_ids:
        print("error: corpus has no gold annotations", file=sys.stderr)
        return EXIT_CONFIG
    participants = _build_participants(args, config, corpus, resources, options)
    sim = config.similarity_threshold if config.similarity_threshold is not None else config.dedup_threshold
    report = pairwise_agreement(corpus, participants, sim)
    counts = answer_count_stats(corpus, participants)
    out_dir = Path(args.out or config.output_dir)
    _dump_json(out_dir / "agreement.json", report.to_json())
    _dump_json(out_dir / "answer_counts.json", counts)
    (out_dir / "agreement.txt").write_text(_agreement_table(report) + "\n", encoding="utf-8")
    (out_dir / "answer_counts.txt").write_text(_counts_table(counts) + "\n", encoding="utf-8")
    print(_agreement_table(report))
    print()
    print(_counts_table(counts))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    resources = make_resources(config)
    options = make_options(config)
    corpus = load_corpus(args.corpus)
    try:
        grid = [float(v) for v in args.grid.split(",") if v.strip() != ""]
    except ValueError:
        print(f"error: unparseable threshold grid {args.grid!r}", file=sys.stderr)
        return EXIT_CONFIG
    if not grid:
        print("error: empty threshold grid", file=sys.stderr)
        return EXIT_CONFIG
    system = SystemParticipant(corpus, resources, options, make_annotate_fn(config, resources))
    sim = config.similarity_threshold if config.similarity_threshold is not None else config.dedup_threshold
    result = threshold_sweep(corpus, system, grid, args.question, sim)
    out_dir = Path(args.out or config.output_dir)
    _dump_json(out_dir / f"sweep_{args.question}.json", result.to_json())
    snippet = {"thresholds": {args.question: result.best_tau}}
    _dump_json(out_dir / f"sweep_{args.question}_suggested.json", snippet)
    for tau, mean in result.curve:
        print(f"tau={tau:.3f}  mean_agreement={mean:.4f}")
    print(f"best tau for {args.question}: {result.best_tau}")
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    corpus = load_corpus(args.corpus)
    cache_dir = args.cache_dir or config.baseline_cache_dir
    if not cache_dir:
        print("error: baseline needs --cache-dir or baseline.cache_dir", file=sys.stderr)
        return EXIT_CONFIG
    client = None
    example = None
    if config.baseline_endpoint and config.baseline_model:
        client = HttpChatClient(config.baseline_endpoint, config.baseline_model)
    if config.baseline_example_path:
        example = load_baseline_example(config.baseline_example_path)
    articles = [ca.article for ca in corpus.articles]
    results = run_baseline(articles, client, cache_dir, example)
    out_dir = Path(args.out or config.output_dir)
    payload = {}
    failures = 0
    for article_id, result in sorted(results.items()):
        if result.answer is None:
            failures += 1
            payload[article_id] = {"error": result.error, "cached": result.cached}
        else:
            article = corpus.by_id(article_id).article
            payload[article_id] = {
                "answers": result.answer.by_question,
                "cached": result.cached,
                "non_verbatim": quotation_report(article, result.answer),
            }
    _dump_json(out_dir / "baseline_answers.json", payload)
    print(f"baseline answered {len(results) - failures}/{len(results)} article(s)")
    return EXIT_ARTICLE_FAILURES if failures else EXIT_OK


def cmd_explain(args: argparse.Namespace) -> int:
    report = json.loads(Path(args.report).read_text(encoding="utf-8"))
    answers = report["answers"].get(args.question, [])
    if not answers:
        print(f"no {args.question} answers in {args.report}")
        return EXIT_OK
    for rank, entry in enumerate(answers):
        if args.rank is not None and rank != args.rank:
            continue
        by_table_order = sorted(entry["factors"].items(), key=lambda kv: (-kv[1]["weight"], kv[0]))
        answer = Answer(
            question=args.question,
            text=entry["text"],
            span=Span(entry["span"]["start"], entry["span"]["end"], entry["text"]),
            sentence_index=entry["sentence_index"],
            total=entry["score"],
            factors={name: FactorContribution(weight=fc["weight"], score=fc["score"])
                     for name, fc in by_table_order},
            provenance=tuple(entry["provenance"]),
        )
        print(explain_answer(answer))
        print()
    return EXIT_OK


def cmd_validate_corpus(args: argparse.Namespace) -> int:
    try:
        corpus = load_corpus(args.corpus)
    except (CorpusError, json.JSONDecodeError) as exc:
        print(f"invalid corpus: {exc}", file=sys.stderr)
        return EXIT_ARTICLE_FAILURES
    print(f"corpus ok: {len(corpus.articles)} article(s), "
          f"annotators: {', '.join(corpus.annotator_ids) or '(none)'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fivew1h",
                                     description="who/what/when/where/why/how extraction for French news")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run the pipeline and write per-article answer reports")
    p.add_argument("--config", default=None)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(fn=cmd_extract)

    p = sub.add_parser("evaluate", help="agreement matrix and answer-count table")
    p.add_argument("--config", default=None)
    p.add_argument("--corpus", required=True)
    p.add_argument("--participants", required=True,
                   help="comma-separated ids; 'system' runs the pipeline, 'baseline' replays the cache")
    p.add_argument("--baseline-cache", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("sweep", help="threshold sweep for one question")
    p.add_argument("--config", default=None)
    p.add_argument("--corpus", required=True)
    p.add_argument("--question", required=True, choices=QUESTIONS)
    p.add_argument("--grid", required=True, help="comma-separated thresholds, e.g. 0,0.1,0.2")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("baseline", help="run or replay the chat-completion baseline")
    p.add_argument("--config", default=None)
    p.add_argument("--corpus", required=True)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_baseline)

    p = sub.add_parser("explain", help="print the factor breakdown of report answers")
    p.add_argument("--report", required=True)
    p.add_argument("--question", required=True, choices=QUESTIONS)
    p.add_argument("--rank", type=int, default=None)
    p.set_defaults(fn=cmd_explain)

    p = sub.add_parser("validate-corpus", help="check corpus structure and gold verbatim-ness")
    p.add_argument("--corpus", required=True)
    p.set_defaults(fn=cmd_validate_corpus)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CorpusError as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
