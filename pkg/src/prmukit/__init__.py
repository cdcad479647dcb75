"""Keyphrase category analysis and retrieval experiment toolkit.

Classifies keyphrases as Present, Reordered, Mixed, or Unseen relative to
a document's stemmed token sequence, builds inverted indexes with optional
keyphrase augmentation, runs BM25 and RM3-expanded retrieval, and
evaluates rankings and keyphrase-generation output.
"""

__version__ = "0.1.0"
