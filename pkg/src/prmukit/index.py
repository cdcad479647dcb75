"""Inverted index construction with keyphrase augmentation.

Each document is indexed as its normalized title and abstract terms plus
the normalized terms of every keyphrase whose category is included in the
index configuration.  Appended keyphrase terms count toward term
frequencies and document length exactly like body terms.  The separator
token never enters the index.
"""

from __future__ import annotations

import gzip
import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property

from .corpus import Corpus
from .prmu import PrmuCategory, classify_document
from .textnorm import SEP_TOKEN

SNAPSHOT_FORMAT = "prmukit-index"
SNAPSHOT_VERSION = 1

_CODE_ORDER = "PRMU"


@dataclass(frozen=True)
class IndexConfig:
    """Which keyphrase categories get appended to documents at indexing
    time; empty means title and abstract only."""

    categories: frozenset = frozenset()

    @classmethod
    def from_codes(cls, codes: str) -> "IndexConfig":
        cleaned = codes.replace(",", "").replace(" ", "")
        return cls(frozenset(PrmuCategory.from_code(c) for c in cleaned))

    @property
    def codes(self) -> str:
        """Canonical category string, e.g. "" or "MU" or "PRMU"."""
        present = {cat.code for cat in self.categories}
        return "".join(c for c in _CODE_ORDER if c in present)

    def __contains__(self, category: PrmuCategory) -> bool:
        return category in self.categories


class InvertedIndex:
    """Immutable term -> postings mapping plus collection statistics."""

    def __init__(self, config: IndexConfig, postings, doc_len, kp_appended, avgdl):
        self.config = config
        self.postings = postings  # term -> list of (doc_id, tf), sorted by doc_id
        self.doc_len = doc_len  # doc_id -> indexed term occurrences
        self.kp_appended = kp_appended  # mean appended keyphrases per doc
        self.avgdl = avgdl

    @property
    def n_docs(self) -> int:
        return len(self.doc_len)

    def postings_list(self, term: str) -> list:
        return self.postings.get(term, [])

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def cf(self, term: str) -> int:
        return sum(tf for _, tf in self.postings.get(term, ()))

    def vocabulary(self) -> list[str]:
        return sorted(self.postings)

    @cached_property
    def doc_vectors(self) -> dict[str, dict[str, int]]:
        """Forward view: doc_id -> {term: tf}; needed for feedback models."""
        vectors: dict[str, dict[str, int]] = {d: {} for d in self.doc_len}
        for term in sorted(self.postings):
            for doc_id, tf in self.postings[term]:
                vectors[doc_id][term] = tf
        return vectors

    def doc_vocabulary(self, doc_id: str) -> frozenset[str]:
        return frozenset(self.doc_vectors[doc_id])


def build_index(corpus: Corpus, config: IndexConfig) -> InvertedIndex:
    """Index a corpus under the given augmentation configuration."""
    if len(corpus) == 0:
        raise ValueError("cannot index an empty corpus")
    postings: dict[str, list] = {}
    doc_len: dict[str, int] = {}
    appended_total = 0
    for doc in corpus:
        terms = [t for t in doc.term_seq if t != SEP_TOKEN]
        labels = classify_document(doc)
        for (_, category), kp_terms in zip(labels, doc.kp_term_seqs):
            if category is not None and category in config:
                terms.extend(kp_terms)
                appended_total += 1
        doc_len[doc.id] = len(terms)
        for term, tf in Counter(terms).items():
            postings.setdefault(term, []).append((doc.id, tf))
    for term in postings:
        postings[term].sort(key=lambda entry: entry[0])
    n = len(doc_len)
    # summed in sorted-doc order so the value does not depend on corpus
    # insertion order
    avgdl = sum(doc_len[d] for d in sorted(doc_len)) / n
    return InvertedIndex(
        config=config,
        postings=postings,
        doc_len=doc_len,
        kp_appended=appended_total / n,
        avgdl=avgdl,
    )


def save_index(index: InvertedIndex, path) -> None:
    """Write a versioned gzip-compressed JSON snapshot."""
    payload = {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "config": index.config.codes,
        "avgdl": index.avgdl,
        "kp_appended": index.kp_appended,
        "doc_len": index.doc_len,
        "postings": {t: [[d, tf] for d, tf in pl] for t, pl in index.postings.items()},
    }
    data = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as raw:
        # filename="" keeps the gzip header free of the output path, so
        # identical indexes produce identical files wherever they are saved
        with gzip.GzipFile(filename="", fileobj=raw, mode="wb", mtime=0) as fh:
            fh.write(data)


def load_index(path) -> InvertedIndex:
    try:
        with gzip.open(path, "rb") as fh:
            payload = json.loads(fh.read().decode("utf-8"))
    except (OSError, ValueError) as exc:
        raise ValueError(f"{path}: not a readable index snapshot: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != SNAPSHOT_FORMAT:
        raise ValueError(f"{path}: not an index snapshot")
    if payload.get("version") != SNAPSHOT_VERSION:
        raise ValueError(
            f"{path}: unsupported snapshot version {payload.get('version')!r} "
            f"(expected {SNAPSHOT_VERSION})"
        )
    postings = {
        term: [(doc_id, int(tf)) for doc_id, tf in plist]
        for term, plist in payload["postings"].items()
    }
    return InvertedIndex(
        config=IndexConfig.from_codes(payload["config"]),
        postings=postings,
        doc_len={d: int(n) for d, n in payload["doc_len"].items()},
        kp_appended=float(payload["kp_appended"]),
        avgdl=float(payload["avgdl"]),
    )
