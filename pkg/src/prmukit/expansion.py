"""RM3 pseudo-relevance feedback.

A relevance model is estimated from the top-ranked documents of a first
BM25 pass, truncated to the heaviest terms, interpolated with the
normalized original query, and used as term weights for a second pass.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .corpus import Run, RunEntry, Topic
from .index import InvertedIndex
from .ranking import DEFAULT_PARAMS, Bm25Params, ScoredHit, query_from_text, search

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Rm3Params:
    fb_docs: int = 10
    fb_terms: int = 10
    orig_weight: float = 0.5
    doc_weighting: str = "score"  # "score" or "uniform"

    def __post_init__(self):
        if self.fb_docs < 1:
            raise ValueError(f"fb_docs must be >= 1, got {self.fb_docs}")
        if self.fb_terms < 1:
            raise ValueError(f"fb_terms must be >= 1, got {self.fb_terms}")
        if not 0.0 <= self.orig_weight <= 1.0:
            raise ValueError(f"orig_weight must be in [0, 1], got {self.orig_weight}")
        if self.doc_weighting not in ("score", "uniform"):
            raise ValueError(f"unknown doc_weighting {self.doc_weighting!r}")


DEFAULT_RM3 = Rm3Params()


def estimate_relevance_model(
    index: InvertedIndex,
    initial_hits: list[ScoredHit],
    params: Rm3Params = DEFAULT_RM3,
) -> dict[str, float]:
    """Feedback term distribution from the top min(fb_docs, |hits|) docs.

    weight(t) is proportional to the sum over feedback documents of
    P(t|d) * s(d), with P(t|d) = tf/doc_len and s(d) the min-shifted,
    sum-normalized first-pass score (or uniform under that weighting
    mode).  Single-character terms are excluded.  The top fb_terms terms
    are kept (ties broken lexicographically) and renormalized to sum 1.
    """
    if not initial_hits:
        raise ValueError("no feedback documents")
    feedback = initial_hits[: params.fb_docs]
    if params.doc_weighting == "uniform":
        doc_weight = {h.doc_id: 1.0 / len(feedback) for h in feedback}
    else:
        raw = [h.score for h in feedback]
        low = min(raw)
        shifted = [s - low for s in raw] if low < 0 else list(raw)
        z = sum(shifted)
        if z == 0:
            doc_weight = {h.doc_id: 1.0 / len(feedback) for h in feedback}
        else:
            doc_weight = {h.doc_id: s / z for h, s in zip(feedback, shifted)}
    weights: dict[str, float] = {}
    for hit in feedback:
        vector = index.doc_vectors[hit.doc_id]
        dl = index.doc_len[hit.doc_id]
        w_d = doc_weight[hit.doc_id]
        for term, tf in vector.items():
            if len(term) < 2:
                continue
            weights[term] = weights.get(term, 0.0) + w_d * tf / dl
    top = sorted(weights.items(), key=lambda item: (-item[1], item[0]))[: params.fb_terms]
    z = sum(w for _, w in top)
    if z <= 0:
        return {}
    return {term: w / z for term, w in top}


def interpolate(
    original: dict[str, float],
    feedback: dict[str, float],
    orig_weight: float,
) -> dict[str, float]:
    """orig_weight * normalized-original + (1 - orig_weight) * feedback."""
    qz = sum(original.values())
    if qz <= 0:
        raise ValueError("original query model has no positive mass")
    normalized = {t: c / qz for t, c in original.items()}
    merged: dict[str, float] = {}
    for term in sorted(set(normalized) | set(feedback)):
        merged[term] = orig_weight * normalized.get(term, 0.0) + (
            1.0 - orig_weight
        ) * feedback.get(term, 0.0)
    return merged


def search_rm3(
    index: InvertedIndex,
    query: dict[str, float],
    k: int = 1000,
    bm25_params: Bm25Params = DEFAULT_PARAMS,
    rm3_params: Rm3Params = DEFAULT_RM3,
) -> list[ScoredHit]:
    """BM25 first pass, relevance model, interpolation, weighted second pass.

    With orig_weight exactly 1.0 the interpolation is the identity on the
    (rescaled) original query, so the first-pass ranking is returned
    as-is; rescoring would only rescale scores and invite spurious
    floating-point tie churn.
    """
    first_pass = search(index, query, k=k, params=bm25_params)
    if not first_pass:
        logger.warning("first pass returned nothing; skipping feedback")
        return []
    if rm3_params.orig_weight == 1.0:
        return first_pass
    feedback_model = estimate_relevance_model(index, first_pass, rm3_params)
    expanded = interpolate(query, feedback_model, rm3_params.orig_weight)
    return search(index, expanded, k=k, params=bm25_params)


def search_topics_rm3(
    index: InvertedIndex,
    topics: list[Topic],
    k: int = 1000,
    bm25_params: Bm25Params = DEFAULT_PARAMS,
    rm3_params: Rm3Params = DEFAULT_RM3,
    tag: str = "bm25+rm3",
) -> Run:
    run = Run(tag)
    for topic in topics:
        hits = search_rm3(
            index,
            query_from_text(topic.text),
            k=k,
            bm25_params=bm25_params,
            rm3_params=rm3_params,
        )
        run.add_topic(topic.id, [RunEntry(h.doc_id, h.rank, h.score) for h in hits])
    return run
