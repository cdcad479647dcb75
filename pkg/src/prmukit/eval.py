"""Retrieval evaluation (mAP, recall@k), paired significance testing, and
grading of keyphrase-generation output (F@k plus category distribution)."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from . import textnorm
from .corpus import Corpus, Qrels, Run
from .prmu import PrmuCategory, _classify

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalReport:
    metric: str
    cutoff: int
    aggregate: float
    per_topic: dict[str, float]
    n_topics: int
    n_skipped: int


@dataclass(frozen=True)
class SignificanceResult:
    t_statistic: float
    p_value: float
    n: int
    significant: bool
    degenerate: bool


@dataclass(frozen=True)
class GenEvalReport:
    k: int
    f_at_k: float
    f_macro: float
    f_micro: float
    averaging: str
    pct_p: float
    pct_r: float
    pct_m: float
    pct_u: float
    n_predictions: int
    n_docs: int
    n_docs_without_gold: int
    n_skipped_predictions: int

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "f_at_k": self.f_at_k,
            "f_macro": self.f_macro,
            "f_micro": self.f_micro,
            "averaging": self.averaging,
            "pct_present": self.pct_p,
            "pct_reordered": self.pct_r,
            "pct_mixed": self.pct_m,
            "pct_unseen": self.pct_u,
            "n_predictions": self.n_predictions,
            "n_docs": self.n_docs,
            "n_docs_without_gold": self.n_docs_without_gold,
            "n_skipped_predictions": self.n_skipped_predictions,
        }


def parse_metric(name: str) -> tuple[str, int]:
    """Parse "map@1000" or "recall@10" into (kind, cutoff)."""
    kind, sep, cutoff_str = name.partition("@")
    if not sep or kind not in ("map", "recall"):
        raise ValueError(f"unknown metric {name!r} (expected map@K or recall@K)")
    try:
        cutoff = int(cutoff_str)
    except ValueError as exc:
        raise ValueError(f"bad metric cutoff in {name!r}") from exc
    if cutoff < 1:
        raise ValueError(f"metric cutoff must be >= 1 in {name!r}")
    return kind, cutoff


def average_precision(ranked_ids: list[str], relevant: frozenset, cutoff: int = 1000) -> float:
    """Sum of precisions at relevant ranks within the cutoff, divided by
    the total number of relevant documents."""
    if not relevant:
        raise ValueError("empty relevant set")
    hits = 0
    total = 0.0
    for pos, doc_id in enumerate(ranked_ids[:cutoff], start=1):
        if doc_id in relevant:
            hits += 1
            total += hits / pos
    return total / len(relevant)


def recall_at_k(ranked_ids: list[str], relevant: frozenset, k: int = 10) -> float:
    if not relevant:
        raise ValueError("empty relevant set")
    found = sum(1 for d in ranked_ids[:k] if d in relevant)
    return found / len(relevant)


def evaluate_run(run: Run, qrels: Qrels, metric: str = "map@1000") -> EvalReport:
    """Score a run topic by topic.

    Topics with no relevant documents are skipped with a warning; topics
    judged but absent from the run score 0 so that paired comparisons
    across runs stay aligned.
    """
    kind, cutoff = parse_metric(metric)
    per_topic: dict[str, float] = {}
    skipped = 0
    for topic_id in qrels.topic_ids():
        relevant = qrels.relevant(topic_id)
        if not relevant:
            logger.warning("topic %s has no relevant documents; skipped", topic_id)
            skipped += 1
            continue
        ranked = run.ranked_ids(topic_id)
        if kind == "map":
            per_topic[topic_id] = average_precision(ranked, relevant, cutoff)
        else:
            per_topic[topic_id] = recall_at_k(ranked, relevant, cutoff)
    if not per_topic:
        raise ValueError("no topics with relevance judgments to evaluate")
    aggregate = sum(per_topic.values()) / len(per_topic)
    return EvalReport(
        metric=metric,
        cutoff=cutoff,
        aggregate=aggregate,
        per_topic=per_topic,
        n_topics=len(per_topic),
        n_skipped=skipped,
    )


# --- Student t distribution -------------------------------------------------

_BETACF_MAX_ITER = 300
_BETACF_EPS = 1e-15
_BETACF_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified
    Lentz iteration)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETACF_TINY:
        d = _BETACF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_TINY:
            d = _BETACF_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETACF_TINY:
            c = _BETACF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_TINY:
            d = _BETACF_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETACF_TINY:
            c = _BETACF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_tailed_p(t: float, df: int) -> float:
    """P(|T| >= |t|) for T Student-t distributed with df degrees of
    freedom, via I_x(df/2, 1/2) with x = df/(df + t^2)."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def paired_t_test(scores_a: list[float], scores_b: list[float]) -> SignificanceResult:
    """Two-tailed paired Student t-test on aligned score vectors."""
    n = len(scores_a)
    if len(scores_b) != n:
        raise ValueError(
            f"paired samples differ in length: {n} vs {len(scores_b)}"
        )
    if n < 2:
        raise ValueError(f"need at least 2 pairs, got {n}")
    diffs = [a - b for a, b in zip(scores_a, scores_b)]
    mean = sum(diffs) / n
    variance = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(variance)
    if sd == 0.0:
        if mean == 0.0:
            return SignificanceResult(0.0, 1.0, n, False, False)
        t = math.inf if mean > 0 else -math.inf
        return SignificanceResult(t, 0.0, n, True, True)
    t = mean / (sd / math.sqrt(n))
    p = student_t_two_tailed_p(t, n - 1)
    return SignificanceResult(t, p, n, p < 0.05, False)


# --- keyphrase-generation grading -------------------------------------------


def grade_generation(
    predictions: dict[str, list[str]],
    corpus: Corpus,
    k: int = 5,
    averaging: str = "macro",
) -> GenEvalReport:
    """Grade top-k predicted keyphrases per document.

    A prediction matches when its stemmed token sequence equals that of
    any gold keyphrase (each distinct sequence counted once).  Precision
    divides by the number of predictions actually emitted when fewer than
    k.  The headline F@k is the macro average over documents that have
    gold keyphrases; micro pooling is available via averaging="micro".
    Every valid prediction is also classified PRMU against its document,
    pooled over all documents.
    """
    if averaging not in ("macro", "micro"):
        raise ValueError(f"unknown averaging {averaging!r}")
    unknown = sorted(d for d in predictions if d not in corpus)
    if unknown:
        raise ValueError(f"predictions reference unknown doc ids: {unknown}")
    counts = {cat: 0 for cat in PrmuCategory}
    f_scores: list[float] = []
    micro_matches = 0
    micro_emitted = 0
    micro_gold = 0
    n_predictions = 0
    n_skipped = 0
    n_without_gold = 0
    for doc_id in sorted(predictions):
        doc = corpus[doc_id]
        top = predictions[doc_id][:k]
        pred_seqs = [tuple(textnorm.normalize(p)) for p in top]
        valid = [s for s in pred_seqs if s]
        n_skipped += len(pred_seqs) - len(valid)
        doc_terms = doc.term_seq
        doc_term_set = set(doc.term_set)
        for seq in valid:
            counts[_classify(list(seq), doc_terms, doc_term_set)] += 1
            n_predictions += 1
        gold_seqs = {tuple(seq) for seq in doc.kp_term_seqs if seq}
        if not gold_seqs:
            n_without_gold += 1
            continue
        matches = len(set(valid) & gold_seqs)
        emitted = len(pred_seqs)
        precision = matches / emitted if emitted else 0.0
        recall = matches / len(gold_seqs)
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        f_scores.append(f1)
        micro_matches += matches
        micro_emitted += emitted
        micro_gold += len(gold_seqs)
    f_macro = sum(f_scores) / len(f_scores) if f_scores else 0.0
    micro_p = micro_matches / micro_emitted if micro_emitted else 0.0
    micro_r = micro_matches / micro_gold if micro_gold else 0.0
    f_micro = 2 * micro_p * micro_r / (micro_p + micro_r) if micro_p + micro_r else 0.0
    total = sum(counts.values())
    pct = {
        cat: (100.0 * counts[cat] / total if total else 0.0) for cat in PrmuCategory
    }
    return GenEvalReport(
        k=k,
        f_at_k=f_macro if averaging == "macro" else f_micro,
        f_macro=f_macro,
        f_micro=f_micro,
        averaging=averaging,
        pct_p=pct[PrmuCategory.PRESENT],
        pct_r=pct[PrmuCategory.REORDERED],
        pct_m=pct[PrmuCategory.MIXED],
        pct_u=pct[PrmuCategory.UNSEEN],
        n_predictions=n_predictions,
        n_docs=len(predictions),
        n_docs_without_gold=n_without_gold,
        n_skipped_predictions=n_skipped,
    )
