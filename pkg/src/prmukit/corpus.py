"""Corpus, topic, qrels, and run-file handling.

File formats:

* corpus: JSON Lines, one document per line with fields ``id``, ``title``,
  ``abstract`` and optional ``keyphrases`` (list of strings);
* topics: tab-separated ``id<TAB>text``;
* qrels: whitespace-separated ``topic_id iteration doc_id grade``;
* runs: whitespace-separated ``topic_id Q0 doc_id rank score tag``;
* keyphrase predictions: JSON Lines of ``{"id": ..., "keyphrases": [...]}``.

Loaders validate as they read and raise :class:`FormatError` carrying the
offending path and line number; they never silently drop records.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from . import textnorm


class FormatError(ValueError):
    """A malformed input file; the message names the path and line."""

    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = str(path)
        self.lineno = lineno


@dataclass(eq=False)
class Document:
    id: str
    title: str
    abstract: str
    keyphrases: list[str] = field(default_factory=list)

    @cached_property
    def term_seq(self) -> list[str]:
        """Stemmed title terms, the separator token, stemmed abstract terms."""
        return textnorm.doc_term_sequence(self.title, self.abstract)

    @cached_property
    def term_set(self) -> frozenset[str]:
        """Body vocabulary (separator excluded)."""
        return frozenset(t for t in self.term_seq if t != textnorm.SEP_TOKEN)

    @cached_property
    def kp_term_seqs(self) -> list[list[str]]:
        """Normalized term sequence of each keyphrase, input order."""
        return [textnorm.normalize(kp) for kp in self.keyphrases]


class Corpus:
    """An ordered document collection with unique ids."""

    def __init__(self, documents: Iterable[Document]):
        self.documents: list[Document] = list(documents)
        self.by_id: dict[str, Document] = {}
        for doc in self.documents:
            if not doc.id:
                raise ValueError("document with empty id")
            if doc.id in self.by_id:
                raise ValueError(f"duplicate document id: {doc.id!r}")
            self.by_id[doc.id] = doc

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def __getitem__(self, doc_id: str) -> Document:
        return self.by_id[doc_id]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.by_id


@dataclass(frozen=True)
class Topic:
    id: str
    text: str


class Qrels:
    """Relevance grades keyed by (topic id, doc id); grade >= 1 is relevant."""

    def __init__(self):
        self._by_topic: dict[str, dict[str, int]] = {}

    def add(self, topic_id: str, doc_id: str, grade: int) -> None:
        if grade < 0:
            raise ValueError(f"negative relevance grade for ({topic_id}, {doc_id})")
        self._by_topic.setdefault(topic_id, {})[doc_id] = grade

    def grade(self, topic_id: str, doc_id: str) -> int:
        return self._by_topic.get(topic_id, {}).get(doc_id, 0)

    def relevant(self, topic_id: str) -> frozenset[str]:
        grades = self._by_topic.get(topic_id, {})
        return frozenset(d for d, g in grades.items() if g >= 1)

    def topic_ids(self) -> list[str]:
        return sorted(self._by_topic)

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_topic.values())


@dataclass(frozen=True)
class RunEntry:
    doc_id: str
    rank: int
    score: float


class Run:
    """Ranked results per topic, plus the run tag."""

    def __init__(self, tag: str):
        self.tag = tag
        self.rankings: dict[str, list[RunEntry]] = {}

    def add_topic(self, topic_id: str, entries: list[RunEntry]) -> None:
        if topic_id in self.rankings:
            raise ValueError(f"duplicate topic in run: {topic_id!r}")
        _validate_entries(topic_id, entries)
        self.rankings[topic_id] = list(entries)

    def ranked_ids(self, topic_id: str) -> list[str]:
        return [e.doc_id for e in self.rankings.get(topic_id, [])]

    def topic_ids(self) -> list[str]:
        return list(self.rankings)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Run):
            return NotImplemented
        return self.tag == other.tag and self.rankings == other.rankings

    def __repr__(self) -> str:
        return f"Run(tag={self.tag!r}, topics={len(self.rankings)})"


def _validate_entries(topic_id: str, entries: list[RunEntry]) -> None:
    seen: set[str] = set()
    prev_rank = 0
    prev_score = None
    for e in entries:
        if e.doc_id in seen:
            raise ValueError(f"topic {topic_id!r}: duplicate doc id {e.doc_id!r}")
        seen.add(e.doc_id)
        if e.rank <= prev_rank:
            raise ValueError(
                f"topic {topic_id!r}: ranks not strictly increasing at {e.doc_id!r}"
            )
        if prev_score is not None and e.score > prev_score:
            raise ValueError(
                f"topic {topic_id!r}: scores increase with rank at {e.doc_id!r}"
            )
        prev_rank = e.rank
        prev_score = e.score


def _read_lines(path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line.strip():
                yield lineno, line


def load_corpus(path) -> Corpus:
    documents = []
    seen_ids: set[str] = set()
    for lineno, line in _read_lines(path):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(path, lineno, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise FormatError(path, lineno, "expected a JSON object")
        for key in ("id", "title", "abstract"):
            if key not in obj:
                raise FormatError(path, lineno, f"missing field {key!r}")
            if not isinstance(obj[key], str):
                raise FormatError(path, lineno, f"field {key!r} must be a string")
        if not obj["id"]:
            raise FormatError(path, lineno, "empty document id")
        if obj["id"] in seen_ids:
            raise FormatError(path, lineno, f"duplicate document id {obj['id']!r}")
        seen_ids.add(obj["id"])
        kps = obj.get("keyphrases", [])
        if not isinstance(kps, list) or any(not isinstance(k, str) for k in kps):
            raise FormatError(path, lineno, "field 'keyphrases' must be a list of strings")
        documents.append(
            Document(
                id=obj["id"],
                title=obj["title"],
                abstract=obj["abstract"],
                keyphrases=list(kps),
            )
        )
    return Corpus(documents)


def load_topics(path) -> list[Topic]:
    topics = []
    seen: set[str] = set()
    for lineno, line in _read_lines(path):
        if "\t" not in line:
            raise FormatError(path, lineno, "expected 'id<TAB>text'")
        topic_id, text = line.split("\t", 1)
        topic_id = topic_id.strip()
        text = text.strip()
        if not topic_id or not text:
            raise FormatError(path, lineno, "empty topic id or text")
        if topic_id in seen:
            raise FormatError(path, lineno, f"duplicate topic id {topic_id!r}")
        seen.add(topic_id)
        topics.append(Topic(id=topic_id, text=text))
    return topics


def load_qrels(path) -> Qrels:
    qrels = Qrels()
    for lineno, line in _read_lines(path):
        parts = line.split()
        if len(parts) != 4:
            raise FormatError(path, lineno, "expected 'topic_id iter doc_id grade'")
        topic_id, _iteration, doc_id, grade_str = parts
        try:
            grade = int(grade_str)
        except ValueError as exc:
            raise FormatError(path, lineno, f"bad grade {grade_str!r}") from exc
        if grade < 0:
            raise FormatError(path, lineno, f"negative grade {grade}")
        qrels.add(topic_id, doc_id, grade)
    return qrels


def write_run(run: Run, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for topic_id, entries in run.rankings.items():
            for e in entries:
                fh.write(
                    f"{topic_id} Q0 {e.doc_id} {e.rank} {e.score!r} {run.tag}\n"
                )


def load_run(path) -> Run:
    run: Run | None = None
    current: dict[str, list[RunEntry]] = {}
    order: list[str] = []
    for lineno, line in _read_lines(path):
        parts = line.split()
        if len(parts) != 6:
            raise FormatError(path, lineno, "expected 'topic_id Q0 doc_id rank score tag'")
        topic_id, _q0, doc_id, rank_str, score_str, tag = parts
        try:
            rank = int(rank_str)
            score = float(score_str)
        except ValueError as exc:
            raise FormatError(path, lineno, f"bad rank/score: {exc}") from exc
        if run is None:
            run = Run(tag)
        elif tag != run.tag:
            raise FormatError(path, lineno, f"mixed run tags {run.tag!r} and {tag!r}")
        if topic_id not in current:
            current[topic_id] = []
            order.append(topic_id)
        current[topic_id].append(RunEntry(doc_id=doc_id, rank=rank, score=score))
    if run is None:
        run = Run("empty")
    for topic_id in order:
        run.add_topic(topic_id, current[topic_id])
    return run


def load_predictions(path) -> dict[str, list[str]]:
    """Keyphrase-generation output: doc id -> ranked predicted keyphrases."""
    predictions: dict[str, list[str]] = {}
    for lineno, line in _read_lines(path):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(path, lineno, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict) or "id" not in obj or "keyphrases" not in obj:
            raise FormatError(path, lineno, "expected {'id': ..., 'keyphrases': [...]}")
        doc_id = obj["id"]
        kps = obj["keyphrases"]
        if not isinstance(doc_id, str) or not doc_id:
            raise FormatError(path, lineno, "bad document id")
        if not isinstance(kps, list) or any(not isinstance(k, str) for k in kps):
            raise FormatError(path, lineno, "'keyphrases' must be a list of strings")
        if doc_id in predictions:
            raise FormatError(path, lineno, f"duplicate prediction for {doc_id!r}")
        predictions[doc_id] = list(kps)
    return predictions
