"""Text normalization shared by classification, indexing, querying and
evaluation: tokenize, lowercase, stem, and assemble document term
sequences with a title/abstract separator token.

All functions are pure and deterministic; there is no stopword removal
anywhere in the pipeline.
"""

from __future__ import annotations

import re

from . import porter

# Separator placed between title and abstract terms so the last title word
# is never contiguous with the first abstract word.  It contains
# non-alphanumeric characters, so no token produced by tokenize() can ever
# equal it.
SEP_TOKEN = "<sep>"

# A token is a maximal run of alphanumeric characters ([^\W_] excludes the
# underscore, which \w would otherwise admit).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# English possessive suffix ('s at the end of a word), removed before
# splitting so "user's" yields the single token "user".
_POSSESSIVE_RE = re.compile(r"['’]s(?![^\W_])", re.UNICODE)

_ASCII_ALPHA_RE = re.compile(r"[a-z]+\Z")

TermSeq = list[str]


def tokenize(text: str) -> list[str]:
    """Split text into lowercase tokens on runs of non-alphanumeric
    characters, discarding empty fragments."""
    text = _POSSESSIVE_RE.sub("", text.lower())
    return _TOKEN_RE.findall(text)


def stem(token: str) -> str:
    """Stem a single token.

    Stemming applies to ASCII-alphabetic tokens only; anything containing
    digits or non-ASCII letters passes through unchanged.
    """
    token = token.lower()
    if _ASCII_ALPHA_RE.match(token):
        return porter.stem(token)
    return token


def normalize(text: str) -> TermSeq:
    """Tokenize and stem, preserving source order."""
    return [stem(t) for t in tokenize(text)]


def doc_term_sequence(title: str, abstract: str) -> TermSeq:
    """Normalized title terms, the separator token, then normalized
    abstract terms."""
    return normalize(title) + [SEP_TOKEN] + normalize(abstract)
