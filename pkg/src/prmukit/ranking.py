"""BM25 scoring and top-k retrieval over an inverted index."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from . import textnorm
from .corpus import Run, RunEntry, Topic
from .index import InvertedIndex

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 0.9
    b: float = 0.4

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError(f"k1 must be non-negative, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


DEFAULT_PARAMS = Bm25Params()


@dataclass(frozen=True)
class ScoredHit:
    doc_id: str
    score: float
    rank: int


def bm25_term_score(
    tf: int,
    doc_len: int,
    df: int,
    n_docs: int,
    avgdl: float,
    params: Bm25Params = DEFAULT_PARAMS,
) -> float:
    """One term's contribution for one document.

    idf uses the non-negative form ln(1 + (N - df + 0.5)/(df + 0.5)).
    """
    if tf < 1:
        raise ValueError(f"tf must be >= 1, got {tf}")
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if n_docs < df:
        raise ValueError(f"n_docs ({n_docs}) must be >= df ({df})")
    if doc_len < 1:
        raise ValueError(f"doc_len must be >= 1, got {doc_len}")
    if avgdl <= 0:
        raise ValueError(f"avgdl must be positive, got {avgdl}")
    idf = math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))
    tf_part = tf * (params.k1 + 1.0) / (
        tf + params.k1 * (1.0 - params.b + params.b * doc_len / avgdl)
    )
    return idf * tf_part


def search(
    index: InvertedIndex,
    query: dict[str, float],
    k: int = 1000,
    params: Bm25Params = DEFAULT_PARAMS,
) -> list[ScoredHit]:
    """Top-k documents for a weighted query.

    Document score is the weighted sum of per-term scores over the query
    terms present in the document; documents matching no query term are
    excluded.  Ties break by ascending doc id.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    for term, weight in query.items():
        if weight < 0:
            raise ValueError(f"negative query weight for {term!r}")
    if not any(w > 0 for w in query.values()):
        logger.warning("query has no positively weighted terms; empty result")
        return []
    accumulator: dict[str, float] = {}
    n = index.n_docs
    for term in sorted(query):
        weight = query[term]
        if weight <= 0:
            continue
        plist = index.postings.get(term)
        if not plist:
            continue
        df = len(plist)
        for doc_id, tf in plist:
            contribution = weight * bm25_term_score(
                tf, index.doc_len[doc_id], df, n, index.avgdl, params
            )
            accumulator[doc_id] = accumulator.get(doc_id, 0.0) + contribution
    ranked = sorted(accumulator.items(), key=lambda item: (-item[1], item[0]))[:k]
    return [
        ScoredHit(doc_id=doc_id, score=score, rank=rank)
        for rank, (doc_id, score) in enumerate(ranked, start=1)
    ]


def query_from_text(text: str) -> dict[str, int]:
    """Raw term counts of the normalized query text."""
    counts: dict[str, int] = {}
    for term in textnorm.normalize(text):
        counts[term] = counts.get(term, 0) + 1
    return counts


def search_topics(
    index: InvertedIndex,
    topics: list[Topic],
    k: int = 1000,
    params: Bm25Params = DEFAULT_PARAMS,
    tag: str = "bm25",
) -> Run:
    """Run every topic through BM25 and collect a run."""
    run = Run(tag)
    for topic in topics:
        hits = search(index, query_from_text(topic.text), k=k, params=params)
        run.add_topic(
            topic.id, [RunEntry(h.doc_id, h.rank, h.score) for h in hits]
        )
    return run
