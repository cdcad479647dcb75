"""Keyphrase classification into Present / Reordered / Mixed / Unseen and
corpus-level distribution statistics.

A keyphrase is compared with a document's stemmed token sequence:

* Present: its terms occur as one contiguous run;
* Reordered: every term occurs, but never as that contiguous run;
* Mixed: some terms occur, others do not;
* Unseen: no term occurs.

The separator token inside a document sequence never matches a keyphrase
term, so a phrase straddling the title/abstract boundary does not count
as contiguous.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from .corpus import Corpus, Document

logger = logging.getLogger(__name__)


class PrmuCategory(Enum):
    PRESENT = "Present"
    REORDERED = "Reordered"
    MIXED = "Mixed"
    UNSEEN = "Unseen"

    @property
    def code(self) -> str:
        """Single-letter label: P, R, M or U."""
        return self.value[0]

    @classmethod
    def from_code(cls, code: str) -> "PrmuCategory":
        for cat in cls:
            if cat.code == code.upper():
                return cat
        raise ValueError(f"unknown category code {code!r}")


@dataclass(frozen=True)
class DistributionReport:
    """Category percentages over keyphrases, plus the share of unique
    keyphrase words missing from their documents (%uw)."""

    pct_p: float
    pct_r: float
    pct_m: float
    pct_u: float
    pct_uw: float
    pct_uw_macro: float
    n_keyphrases: int
    n_docs: int
    n_skipped: int

    def as_dict(self) -> dict:
        return {
            "pct_present": self.pct_p,
            "pct_reordered": self.pct_r,
            "pct_mixed": self.pct_m,
            "pct_unseen": self.pct_u,
            "pct_unseen_words": self.pct_uw,
            "pct_unseen_words_macro": self.pct_uw_macro,
            "n_keyphrases": self.n_keyphrases,
            "n_docs": self.n_docs,
            "n_skipped_keyphrases": self.n_skipped,
        }


def is_contiguous_subsequence(needle: list[str], hay: list[str]) -> bool:
    """True iff needle occurs as a contiguous run inside hay."""
    if not needle:
        raise ValueError("empty needle")
    n = len(needle)
    first = needle[0]
    limit = len(hay) - n
    for i in range(limit + 1):
        if hay[i] == first and hay[i : i + n] == needle:
            return True
    return False


def classify(kp_terms: list[str], doc_terms: list[str]) -> PrmuCategory:
    """Classify one normalized keyphrase against a document term sequence."""
    if not kp_terms:
        raise ValueError("cannot classify an empty keyphrase")
    return _classify(kp_terms, doc_terms, set(doc_terms))


def _classify(kp_terms, doc_terms, doc_term_set) -> PrmuCategory:
    n_found = sum(1 for t in kp_terms if t in doc_term_set)
    if n_found == len(kp_terms):
        if is_contiguous_subsequence(kp_terms, doc_terms):
            return PrmuCategory.PRESENT
        return PrmuCategory.REORDERED
    if n_found == 0:
        return PrmuCategory.UNSEEN
    return PrmuCategory.MIXED


def classify_document(doc: Document) -> list[tuple[str, PrmuCategory | None]]:
    """Classify every keyphrase of a document, preserving input order.

    Keyphrases that normalize to nothing (pure punctuation) get category
    None; they are reported here but excluded from statistics.
    """
    doc_terms = doc.term_seq
    doc_term_set = set(doc.term_set)
    results: list[tuple[str, PrmuCategory | None]] = []
    for raw, terms in zip(doc.keyphrases, doc.kp_term_seqs):
        if not terms:
            logger.warning(
                "document %s: keyphrase %r normalizes to nothing, skipped", doc.id, raw
            )
            results.append((raw, None))
        else:
            results.append((raw, _classify(terms, doc_terms, doc_term_set)))
    return results


def expansion_terms(doc: Document) -> frozenset[str]:
    """Unique stemmed keyphrase terms that do not occur in the document.

    Only Mixed and Unseen keyphrases can contribute (Present/Reordered
    terms are all in the document by definition).
    """
    terms: set[str] = set()
    for kp_terms in doc.kp_term_seqs:
        terms.update(t for t in kp_terms if t not in doc.term_set)
    return frozenset(terms)


def corpus_distribution(corpus: Corpus) -> DistributionReport:
    """Category percentages and %uw over a whole corpus.

    %uw is the micro-average: summed per-document counts of unique
    keyphrase terms missing from the document, divided by summed counts
    of unique keyphrase terms.  The macro mean-of-ratios is also reported
    for comparison.
    """
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    counts = {cat: 0 for cat in PrmuCategory}
    n_skipped = 0
    uw_num = 0
    uw_den = 0
    macro_ratios: list[float] = []
    for doc in corpus:
        for _, category in classify_document(doc):
            if category is None:
                n_skipped += 1
            else:
                counts[category] += 1
        unique_terms: set[str] = set()
        for kp_terms in doc.kp_term_seqs:
            unique_terms.update(kp_terms)
        missing = {t for t in unique_terms if t not in doc.term_set}
        uw_num += len(missing)
        uw_den += len(unique_terms)
        if unique_terms:
            macro_ratios.append(100.0 * len(missing) / len(unique_terms))
    total = sum(counts.values())
    if total == 0:
        raise ValueError("corpus has no valid keyphrases")
    return DistributionReport(
        pct_p=100.0 * counts[PrmuCategory.PRESENT] / total,
        pct_r=100.0 * counts[PrmuCategory.REORDERED] / total,
        pct_m=100.0 * counts[PrmuCategory.MIXED] / total,
        pct_u=100.0 * counts[PrmuCategory.UNSEEN] / total,
        pct_uw=100.0 * uw_num / uw_den if uw_den else 0.0,
        pct_uw_macro=sum(macro_ratios) / len(macro_ratios) if macro_ratios else 0.0,
        n_keyphrases=total,
        n_docs=len(corpus),
        n_skipped=n_skipped,
    )
