"""Command-line front end.

Exit codes: 0 on success, 1 for evaluation-level failures (bad parameter
combinations, empty evaluations and other domain errors), 2 for unusable
input (missing files, malformed file contents, bad command lines).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, prmu
from .corpus import (
    FormatError,
    load_corpus,
    load_predictions,
    load_qrels,
    load_run,
    load_topics,
    write_run,
)
from .eval import evaluate_run, grade_generation, paired_t_test, parse_metric
from .expansion import Rm3Params, search_rm3, search_topics_rm3
from .experiment import (
    DEFAULT_ROWS,
    ExperimentSpec,
    render_table,
    render_tsv,
    report_json_bytes,
    run_experiment,
)
from .index import IndexConfig, build_index, load_index, save_index
from .ranking import Bm25Params, query_from_text, search, search_topics

class UsageError(Exception):
    """A bad flag combination; maps to exit code 2 like argparse errors."""


CONFIG_KEYS = {
    "k1": float,
    "b": float,
    "fb_docs": int,
    "fb_terms": int,
    "orig_weight": float,
    "doc_weighting": str,
    "k": int,
    "metric": str,
}


def read_config_file(path: str) -> dict:
    """Parse the key=value settings file.

    One assignment per line, ``key = value``; blank lines and lines
    starting with ``#`` are ignored.  Unknown keys and unparseable values
    are format errors.
    """
    settings: dict = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise FormatError(path, lineno, "expected key = value")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise FormatError(path, lineno, f"unknown setting {key!r}")
        try:
            settings[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise FormatError(path, lineno, f"bad value for {key}: {value!r}") from None
    return settings


def resolve(args, name: str, hard_default):
    """Flag if given, else config-file value, else the built-in default."""
    flag = getattr(args, name.replace("-", "_"), None)
    if flag is not None:
        return flag
    config = getattr(args, "_config_values", {})
    return config.get(name, hard_default)


def bm25_params_from(args) -> Bm25Params:
    return Bm25Params(k1=resolve(args, "k1", 0.9), b=resolve(args, "b", 0.4))


def rm3_params_from(args) -> Rm3Params:
    return Rm3Params(
        fb_docs=resolve(args, "fb_docs", 10),
        fb_terms=resolve(args, "fb_terms", 10),
        orig_weight=resolve(args, "orig_weight", 0.5),
        doc_weighting=resolve(args, "doc_weighting", "score"),
    )


def _open_output(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def cmd_classify(args) -> int:
    corpus = load_corpus(args.corpus)
    out, should_close = _open_output(args.output)
    try:
        for doc in corpus:
            for keyphrase, category in prmu.classify_document(doc):
                record = {
                    "id": doc.id,
                    "keyphrase": keyphrase,
                    "category": category.value if category else None,
                }
                out.write(json.dumps(record, ensure_ascii=False) + "\n")
    finally:
        if should_close:
            out.close()
    return 0


def cmd_stats(args) -> int:
    corpus = load_corpus(args.corpus)
    report = prmu.corpus_distribution(corpus)
    print("%P %R %M %U %uw")
    print(
        f"{report.pct_p:.1f} {report.pct_r:.1f} {report.pct_m:.1f} "
        f"{report.pct_u:.1f} {report.pct_uw:.1f}"
    )
    print(
        f"({report.n_keyphrases} keyphrases over {report.n_docs} documents, "
        f"{report.n_skipped} skipped)"
    )
    if args.outdir:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        payload = json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n"
        (outdir / "stats.json").write_text(payload, encoding="utf-8")
        from . import figures

        figures.distribution_figure(report, outdir / "distribution.png")
        print(f"wrote {outdir / 'stats.json'} and {outdir / 'distribution.png'}")
    return 0


def cmd_index(args) -> int:
    corpus = load_corpus(args.corpus)
    config = IndexConfig.from_codes(args.categories)
    index = build_index(corpus, config)
    save_index(index, args.output)
    print(
        f"indexed {index.n_docs} documents, {len(index.postings)} terms, "
        f"avgdl {index.avgdl:.2f}, config {config.codes or '(none)'!s}, "
        f"#kp {index.kp_appended:.2f} -> {args.output}"
    )
    return 0


def _load_snapshot(path):
    try:
        return load_index(path)
    except FileNotFoundError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_search(args) -> int:
    index = _load_snapshot(args.index)
    k = resolve(args, "k", 1000)
    bm25 = bm25_params_from(args)
    rm3 = rm3_params_from(args) if args.rm3 else None
    tag = args.tag or ("bm25+rm3" if args.rm3 else "bm25")
    if args.topics:
        if not args.output:
            raise UsageError("--topics needs --output for the run file")
        topics = load_topics(args.topics)
        if args.rm3:
            run = search_topics_rm3(
                index, topics, k=k, bm25_params=bm25, rm3_params=rm3, tag=tag
            )
        else:
            run = search_topics(index, topics, k=k, params=bm25, tag=tag)
        write_run(run, args.output)
        n = sum(len(run.rankings[t]) for t in run.topic_ids())
        print(f"wrote {n} entries for {len(topics)} topics -> {args.output}")
        return 0
    if not args.query:
        raise UsageError("need a query string or --topics")
    query = query_from_text(args.query)
    if args.rm3:
        hits = search_rm3(index, query, k=k, bm25_params=bm25, rm3_params=rm3)
    else:
        hits = search(index, query, k=k, params=bm25)
    for hit in hits:
        print(f"{hit.rank}\t{hit.doc_id}\t{hit.score!r}")
    return 0


def cmd_evaluate(args) -> int:
    run = load_run(args.run)
    qrels = load_qrels(args.qrels)
    metric = resolve(args, "metric", "map@1000")
    report = evaluate_run(run, qrels, metric)
    if args.per_topic:
        for topic_id in sorted(report.per_topic):
            print(f"{topic_id}\t{report.per_topic[topic_id]:.4f}")
    print(
        f"{report.metric}\t{report.aggregate:.4f}\t"
        f"({report.n_topics} topics, {report.n_skipped} skipped)"
    )
    return 0


def cmd_significance(args) -> int:
    run_a = load_run(args.run_a)
    run_b = load_run(args.run_b)
    qrels = load_qrels(args.qrels)
    metric = resolve(args, "metric", "map@1000")
    eval_a = evaluate_run(run_a, qrels, metric)
    eval_b = evaluate_run(run_b, qrels, metric)
    topics = sorted(eval_a.per_topic)
    result = paired_t_test(
        [eval_a.per_topic[t] for t in topics],
        [eval_b.per_topic[t] for t in topics],
    )
    print(f"{metric}: {eval_a.aggregate:.4f} ({run_a.tag}) vs {eval_b.aggregate:.4f} ({run_b.tag})")
    flags = "significant" if result.significant else "not significant"
    if result.degenerate:
        flags += ", degenerate (constant difference)"
    print(f"t = {result.t_statistic:.4f}, p = {result.p_value:.6f}, n = {result.n} ({flags})")
    return 0


def cmd_experiment(args) -> int:
    spec = ExperimentSpec(
        corpus_path=args.corpus,
        topics_path=args.topics,
        qrels_path=args.qrels,
        metric=resolve(args, "metric", "map@1000"),
        k=resolve(args, "k", 1000),
        bm25=bm25_params_from(args),
        rm3=rm3_params_from(args),
        rows=DEFAULT_ROWS,
        outdir=args.outdir,
    )
    result = run_experiment(spec)
    sys.stdout.write(render_table(result.report))
    if args.outdir:
        outdir = Path(args.outdir)
        (outdir / "runs").mkdir(parents=True, exist_ok=True)
        (outdir / "report.json").write_bytes(report_json_bytes(result.report))
        (outdir / "report.tsv").write_text(render_tsv(result.report), encoding="utf-8")
        (outdir / "report.txt").write_text(render_table(result.report), encoding="utf-8")
        for (name, ranker), run in sorted(result.runs.items()):
            write_run(run, outdir / "runs" / f"{name}.{ranker}.run")
        from . import figures

        figures.experiment_figure(result.report, outdir / "experiment.png")
        print(f"wrote report.json, report.tsv, report.txt, experiment.png, runs/ -> {outdir}")
    return 0


def cmd_eval_gen(args) -> int:
    corpus = load_corpus(args.corpus)
    predictions = load_predictions(args.predictions)
    report = grade_generation(
        predictions, corpus, k=resolve(args, "k", 5), averaging=args.averaging
    )
    print(f"F@{report.k} ({report.averaging}): {report.f_at_k:.4f}")
    print(f"macro {report.f_macro:.4f}, micro {report.f_micro:.4f}")
    print(
        f"%P %R %M %U over {report.n_predictions} predictions: "
        f"{report.pct_p:.1f} {report.pct_r:.1f} {report.pct_m:.1f} {report.pct_u:.1f}"
    )
    if report.n_docs_without_gold:
        print(f"{report.n_docs_without_gold} documents had no gold keyphrases")
    if report.n_skipped_predictions:
        print(f"{report.n_skipped_predictions} predictions normalized to nothing")
    if args.outdir:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        payload = json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n"
        (outdir / "eval-gen.json").write_text(payload, encoding="utf-8")
        from . import figures

        figures.generation_figure(report, outdir / "generation.png")
        print(f"wrote {outdir / 'eval-gen.json'} and {outdir / 'generation.png'}")
    return 0


def _add_config_flag(parser):
    parser.add_argument(
        "--config",
        metavar="FILE",
        help="settings file, one 'key = value' per line; flags override it",
    )


def _add_bm25_flags(parser):
    parser.add_argument("--k1", type=float, help="BM25 k1 (default 0.9)")
    parser.add_argument("--b", type=float, help="BM25 b (default 0.4)")


def _add_rm3_flags(parser):
    parser.add_argument("--fb-docs", type=int, help="feedback documents (default 10)")
    parser.add_argument("--fb-terms", type=int, help="feedback terms (default 10)")
    parser.add_argument(
        "--orig-weight", type=float, help="original query weight (default 0.5)"
    )
    parser.add_argument(
        "--doc-weighting",
        choices=["score", "uniform"],
        help="feedback document weighting (default score)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prmukit",
        description=(
            "Classify keyphrases against their source documents, index "
            "keyphrase-augmented corpora, and run retrieval ablations."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="label every (document, keyphrase) pair")
    p.add_argument("corpus", help="corpus JSONL file")
    p.add_argument("-o", "--output", help="output JSONL file (default stdout)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("stats", help="category distribution over a corpus")
    p.add_argument("corpus", help="corpus JSONL file")
    p.add_argument("--outdir", help="also write stats.json and a figure here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("index", help="build and save an inverted index")
    p.add_argument("corpus", help="corpus JSONL file")
    p.add_argument("-o", "--output", required=True, help="snapshot file to write")
    p.add_argument(
        "--categories",
        default="",
        help="keyphrase categories to append: letters from PRMU (default none)",
    )
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="query a saved index")
    p.add_argument("index", help="index snapshot file")
    p.add_argument("query", nargs="?", help="query text (or use --topics)")
    p.add_argument("--topics", help="topics TSV file; runs every topic")
    p.add_argument("-o", "--output", help="run file to write (with --topics)")
    p.add_argument("--tag", help="run tag (default bm25, or bm25+rm3 with --rm3)")
    p.add_argument("--k", type=int, help="result depth (default 1000)")
    p.add_argument("--rm3", action="store_true", help="apply RM3 feedback")
    _add_bm25_flags(p)
    _add_rm3_flags(p)
    _add_config_flag(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("evaluate", help="score a run file against qrels")
    p.add_argument("run", help="run file")
    p.add_argument("qrels", help="qrels file")
    p.add_argument("--metric", help="map@K or recall@K (default map@1000)")
    p.add_argument("--per-topic", action="store_true", help="print per-topic scores")
    _add_config_flag(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("significance", help="paired t-test between two runs")
    p.add_argument("run_a", help="first run file")
    p.add_argument("run_b", help="second run file")
    p.add_argument("qrels", help="qrels file")
    p.add_argument("--metric", help="map@K or recall@K (default map@1000)")
    _add_config_flag(p)
    p.set_defaults(func=cmd_significance)

    p = sub.add_parser(
        "experiment",
        help="nine-configuration ablation with BM25 and BM25+RM3",
    )
    p.add_argument("corpus", help="corpus JSONL file")
    p.add_argument("topics", help="topics TSV file")
    p.add_argument("qrels", help="qrels file")
    p.add_argument("--metric", help="map@K or recall@K (default map@1000)")
    p.add_argument("--k", type=int, help="result depth (default 1000)")
    p.add_argument("--outdir", help="write report files, runs and figure here")
    _add_bm25_flags(p)
    _add_rm3_flags(p)
    _add_config_flag(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("eval-gen", help="grade generated keyphrases against gold")
    p.add_argument("predictions", help="predictions JSONL file")
    p.add_argument("corpus", help="corpus JSONL file with gold keyphrases")
    p.add_argument("--k", type=int, help="cutoff (default 5)")
    p.add_argument(
        "--averaging",
        choices=["macro", "micro"],
        default="macro",
        help="headline F averaging (default macro)",
    )
    p.add_argument("--outdir", help="also write eval-gen.json and a figure here")
    _add_config_flag(p)
    p.set_defaults(func=cmd_eval_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args._config_values = (
            read_config_file(args.config) if getattr(args, "config", None) else {}
        )
        return args.func(args)
    except (FormatError, UsageError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
