"""Ablation experiment over keyphrase-augmented indexing configurations.

Builds one index per configuration row, runs BM25 and BM25+RM3 over the
same topics, evaluates both, and tests each row against the baseline row
and against the row that appends Present keyphrases.  The machine-readable
report is byte-deterministic: fixed row order, sorted JSON keys, no
timestamps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .corpus import load_corpus, load_qrels, load_topics
from .eval import evaluate_run, paired_t_test, parse_metric
from .expansion import DEFAULT_RM3, Rm3Params, search_topics_rm3
from .index import IndexConfig, build_index
from .ranking import DEFAULT_PARAMS, Bm25Params, search_topics

ALPHA = 0.05

# row name -> category codes appended at indexing time
DEFAULT_ROWS: tuple[tuple[str, str], ...] = (
    ("baseline", ""),
    ("+P", "P"),
    ("+R", "R"),
    ("+M", "M"),
    ("+U", "U"),
    ("+Absent", "RMU"),
    ("+Highlight", "PR"),
    ("+Expand", "MU"),
    ("+all", "PRMU"),
)

BASELINE_ROW = "baseline"
PRESENT_ROW = "+P"


@dataclass
class ExperimentSpec:
    corpus_path: str
    topics_path: str
    qrels_path: str
    metric: str = "map@1000"
    k: int = 1000
    bm25: Bm25Params = DEFAULT_PARAMS
    rm3: Rm3Params = DEFAULT_RM3
    rows: tuple[tuple[str, str], ...] = DEFAULT_ROWS
    outdir: str | None = None

    def __post_init__(self):
        parse_metric(self.metric)
        if not self.rows:
            raise ValueError("experiment needs at least one configuration row")
        names = [name for name, _ in self.rows]
        if len(set(names)) != len(names):
            raise ValueError("duplicate row names in experiment spec")
        if names.count(BASELINE_ROW) != 1:
            raise ValueError(f"exactly one {BASELINE_ROW!r} row is required")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass
class ExperimentResult:
    report: dict
    runs: dict = field(default_factory=dict)  # (row name, ranker) -> Run


def _aligned_scores(eval_report) -> list[float]:
    return [eval_report.per_topic[t] for t in sorted(eval_report.per_topic)]


def _cell(score: float, row_scores, baseline_scores, present_scores) -> dict:
    cell = {
        "score": score,
        "p_vs_baseline": None,
        "significant_vs_baseline": None,
        "p_vs_present": None,
        "significant_vs_present": None,
    }
    if baseline_scores is not None:
        res = paired_t_test(row_scores, baseline_scores)
        cell["p_vs_baseline"] = res.p_value
        cell["significant_vs_baseline"] = res.p_value < ALPHA
    if present_scores is not None:
        res = paired_t_test(row_scores, present_scores)
        cell["p_vs_present"] = res.p_value
        cell["significant_vs_present"] = res.p_value < ALPHA
    return cell


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    corpus = load_corpus(spec.corpus_path)
    topics = load_topics(spec.topics_path)
    qrels = load_qrels(spec.qrels_path)

    staged = []  # (name, codes, kp_appended, bm25 eval, rm3 eval, runs)
    runs: dict = {}
    for name, codes in spec.rows:
        try:
            index = build_index(corpus, IndexConfig.from_codes(codes))
            bm25_run = search_topics(index, topics, k=spec.k, params=spec.bm25)
            rm3_run = search_topics_rm3(
                index, topics, k=spec.k, bm25_params=spec.bm25, rm3_params=spec.rm3
            )
            bm25_eval = evaluate_run(bm25_run, qrels, spec.metric)
            rm3_eval = evaluate_run(rm3_run, qrels, spec.metric)
        except ValueError as exc:
            raise ValueError(f"row {name!r}: {exc}") from exc
        staged.append((name, index.config.codes, index.kp_appended, bm25_eval, rm3_eval))
        runs[(name, "bm25")] = bm25_run
        runs[(name, "bm25_rm3")] = rm3_run

    by_name = {entry[0]: entry for entry in staged}
    baseline = by_name[BASELINE_ROW]
    present = by_name.get(PRESENT_ROW)

    rows_out = []
    for name, codes, kp_appended, bm25_eval, rm3_eval in staged:
        row = {"name": name, "categories": codes, "kp_appended": kp_appended}
        for key, this_eval, base_eval, pres_eval in (
            ("bm25", bm25_eval, baseline[3], present[3] if present else None),
            ("bm25_rm3", rm3_eval, baseline[4], present[4] if present else None),
        ):
            base_scores = (
                _aligned_scores(base_eval) if name != BASELINE_ROW else None
            )
            pres_scores = (
                _aligned_scores(pres_eval)
                if pres_eval is not None and name != PRESENT_ROW
                else None
            )
            try:
                row[key] = _cell(
                    this_eval.aggregate,
                    _aligned_scores(this_eval),
                    base_scores,
                    pres_scores,
                )
            except ValueError as exc:
                raise ValueError(f"row {name!r}: {exc}") from exc
        rows_out.append(row)

    report = {
        "metric": spec.metric,
        "config": {
            "corpus": spec.corpus_path,
            "topics": spec.topics_path,
            "qrels": spec.qrels_path,
            "k": spec.k,
            "k1": spec.bm25.k1,
            "b": spec.bm25.b,
            "fb_docs": spec.rm3.fb_docs,
            "fb_terms": spec.rm3.fb_terms,
            "orig_weight": spec.rm3.orig_weight,
            "doc_weighting": spec.rm3.doc_weighting,
            "alpha": ALPHA,
            "n_docs": len(corpus),
            "n_topics": len(topics),
        },
        "rows": rows_out,
    }
    return ExperimentResult(report=report, runs=runs)


def report_json_bytes(report: dict) -> bytes:
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _markers(cell: dict) -> str:
    marks = ""
    if cell["significant_vs_baseline"]:
        marks += "†"
    if cell["significant_vs_present"]:
        marks += "‡"
    return marks


def render_tsv(report: dict) -> str:
    lines = ["name\tcategories\tkp_appended\tbm25\tbm25_marks\tbm25_rm3\tbm25_rm3_marks"]
    for row in report["rows"]:
        lines.append(
            "\t".join(
                [
                    row["name"],
                    row["categories"],
                    f"{row['kp_appended']:.2f}",
                    f"{row['bm25']['score']:.4f}",
                    _markers(row["bm25"]),
                    f"{row['bm25_rm3']['score']:.4f}",
                    _markers(row["bm25_rm3"]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def render_table(report: dict) -> str:
    """Aligned human-readable table; scores are scaled by 100."""
    header = ("config", "#kp", "bm25", "bm25+rm3")
    body = []
    for row in report["rows"]:
        body.append(
            (
                row["name"],
                f"{row['kp_appended']:.2f}",
                f"{100 * row['bm25']['score']:.2f}{_markers(row['bm25'])}",
                f"{100 * row['bm25_rm3']['score']:.2f}{_markers(row['bm25_rm3'])}",
            )
        )
    widths = [
        max(len(r[i]) for r in [header] + body) for i in range(len(header))
    ]
    lines = []
    for r in [header] + body:
        lines.append(
            "  ".join(
                r[i].ljust(widths[i]) if i == 0 else r[i].rjust(widths[i])
                for i in range(len(header))
            ).rstrip()
        )
    lines.insert(1, "-" * max(len(line) for line in lines))
    footer = (
        f"metric: {report['metric']} x100; "
        "† differs from baseline, ‡ differs from +P "
        f"(paired t-test, p < {report['config']['alpha']})"
    )
    return "\n".join(lines) + "\n" + footer + "\n"
