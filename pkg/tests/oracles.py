"""Independent reference implementations used only as test oracles.

Everything here is written naively and separately from the package code:
the stemmer is a buffer-and-offsets port of the classic C routine, the
classifier is a linear-scan transcription of the category definitions,
and the retrieval scorers recompute everything from the raw corpus side.
Slow is fine; these exist to disagree with the package if it is wrong.
"""

from __future__ import annotations

import math
from collections import Counter

# ---------------------------------------------------------------------------
# Reference stemmer: direct port of the canonical buffer implementation.
# State lives in instance fields (b = char buffer, k = last index,
# j = general offset) exactly as in the original.
# ---------------------------------------------------------------------------


class ReferenceStemmer:
    def __init__(self):
        self.b = []
        self.k = 0
        self.j = 0

    def _cons(self, i):
        ch = self.b[i]
        if ch in "aeiou":
            return False
        if ch == "y":
            return True if i == 0 else not self._cons(i - 1)
        return True

    def _m(self):
        n = 0
        i = 0
        while True:
            if i > self.j:
                return n
            if not self._cons(i):
                break
            i += 1
        i += 1
        while True:
            while True:
                if i > self.j:
                    return n
                if self._cons(i):
                    break
                i += 1
            i += 1
            n += 1
            while True:
                if i > self.j:
                    return n
                if not self._cons(i):
                    break
                i += 1
            i += 1

    def _vowelinstem(self):
        for i in range(self.j + 1):
            if not self._cons(i):
                return True
        return False

    def _doublec(self, j):
        if j < 1:
            return False
        if self.b[j] != self.b[j - 1]:
            return False
        return self._cons(j)

    def _cvc(self, i):
        if i < 2 or not self._cons(i) or self._cons(i - 1) or not self._cons(i - 2):
            return False
        if self.b[i] in "wxy":
            return False
        return True

    def _ends(self, s):
        length = len(s)
        if length > self.k + 1:
            return False
        if self.b[self.k - length + 1 : self.k + 1] != list(s):
            return False
        self.j = self.k - length
        return True

    def _setto(self, s):
        self.b[self.j + 1 : self.k + 1] = list(s)
        self.k = self.j + len(s)

    def _r(self, s):
        if self._m() > 0:
            self._setto(s)

    def _step1ab(self):
        if self.b[self.k] == "s":
            if self._ends("sses"):
                self.k -= 2
            elif self._ends("ies"):
                self._setto("i")
            elif self.b[self.k - 1] != "s":
                self.k -= 1
        if self._ends("eed"):
            if self._m() > 0:
                self.k -= 1
        elif (self._ends("ed") or self._ends("ing")) and self._vowelinstem():
            self.k = self.j
            if self._ends("at"):
                self._setto("ate")
            elif self._ends("bl"):
                self._setto("ble")
            elif self._ends("iz"):
                self._setto("ize")
            elif self._doublec(self.k):
                self.k -= 1
                if self.b[self.k] in "lsz":
                    self.k += 1
            elif self._m() == 1 and self._cvc(self.k):
                self._setto("e")

    def _step1c(self):
        if self._ends("y") and self._vowelinstem():
            self.b[self.k] = "i"

    def _step2(self):
        ch = self.b[self.k - 1]
        if ch == "a":
            if self._ends("ational"):
                self._r("ate")
            elif self._ends("tional"):
                self._r("tion")
        elif ch == "c":
            if self._ends("enci"):
                self._r("ence")
            elif self._ends("anci"):
                self._r("ance")
        elif ch == "e":
            if self._ends("izer"):
                self._r("ize")
        elif ch == "l":
            if self._ends("bli"):
                self._r("ble")
            elif self._ends("alli"):
                self._r("al")
            elif self._ends("entli"):
                self._r("ent")
            elif self._ends("eli"):
                self._r("e")
            elif self._ends("ousli"):
                self._r("ous")
        elif ch == "o":
            if self._ends("ization"):
                self._r("ize")
            elif self._ends("ation"):
                self._r("ate")
            elif self._ends("ator"):
                self._r("ate")
        elif ch == "s":
            if self._ends("alism"):
                self._r("al")
            elif self._ends("iveness"):
                self._r("ive")
            elif self._ends("fulness"):
                self._r("ful")
            elif self._ends("ousness"):
                self._r("ous")
        elif ch == "t":
            if self._ends("aliti"):
                self._r("al")
            elif self._ends("iviti"):
                self._r("ive")
            elif self._ends("biliti"):
                self._r("ble")
        elif ch == "g":
            if self._ends("logi"):
                self._r("log")

    def _step3(self):
        ch = self.b[self.k]
        if ch == "e":
            if self._ends("icate"):
                self._r("ic")
            elif self._ends("ative"):
                self._r("")
            elif self._ends("alize"):
                self._r("al")
        elif ch == "i":
            if self._ends("iciti"):
                self._r("ic")
        elif ch == "l":
            if self._ends("ical"):
                self._r("ic")
            elif self._ends("ful"):
                self._r("")
        elif ch == "s":
            if self._ends("ness"):
                self._r("")

    def _step4(self):
        ch = self.b[self.k - 1]
        if ch == "a":
            if not self._ends("al"):
                return
        elif ch == "c":
            if not self._ends("ance") and not self._ends("ence"):
                return
        elif ch == "e":
            if not self._ends("er"):
                return
        elif ch == "i":
            if not self._ends("ic"):
                return
        elif ch == "l":
            if not self._ends("able") and not self._ends("ible"):
                return
        elif ch == "n":
            if (
                not self._ends("ant")
                and not self._ends("ement")
                and not self._ends("ment")
                and not self._ends("ent")
            ):
                return
        elif ch == "o":
            if self._ends("ion") and self.j >= 0 and self.b[self.j] in "st":
                pass
            elif not self._ends("ou"):
                return
        elif ch == "s":
            if not self._ends("ism"):
                return
        elif ch == "t":
            if not self._ends("ate") and not self._ends("iti"):
                return
        elif ch == "u":
            if not self._ends("ous"):
                return
        elif ch == "v":
            if not self._ends("ive"):
                return
        elif ch == "z":
            if not self._ends("ize"):
                return
        else:
            return
        if self._m() > 1:
            self.k = self.j

    def _step5(self):
        self.j = self.k
        if self.b[self.k] == "e":
            a = self._m()
            if a > 1 or (a == 1 and not self._cvc(self.k - 1)):
                self.k -= 1
        if self.b[self.k] == "l" and self._doublec(self.k) and self._m() > 1:
            self.k -= 1

    def stem(self, word):
        self.b = list(word)
        self.k = len(word) - 1
        self.j = 0
        if self.k <= 1:
            return word
        self._step1ab()
        self._step1c()
        self._step2()
        self._step3()
        self._step4()
        self._step5()
        return "".join(self.b[: self.k + 1])


def reference_stem(word):
    return ReferenceStemmer().stem(word)


# ---------------------------------------------------------------------------
# Naive keyphrase classifier: linear-scan transcription of the category
# definitions over already-normalized term sequences.
# ---------------------------------------------------------------------------


def naive_classify(kp_terms, doc_terms):
    """Return "P", "R", "M", or "U" (None for an empty keyphrase)."""
    if not kp_terms:
        return None
    m = len(kp_terms)
    contiguous = False
    for i in range(len(doc_terms) - m + 1):
        if doc_terms[i : i + m] == list(kp_terms):
            contiguous = True
            break
    if contiguous:
        return "P"
    found = [t for t in kp_terms if t in doc_terms]
    if len(found) == m:
        return "R"
    if found:
        return "M"
    return "U"


# ---------------------------------------------------------------------------
# Brute-force retrieval scorers, recomputed from raw term sequences.
# ---------------------------------------------------------------------------


def brute_force_bm25_scores(query_terms, docs, k1=0.9, b=0.4):
    """Score every document against a bag of query terms.

    docs maps doc_id -> full term sequence (keyphrase-augmented if the
    caller wants that, sentinel already excluded).  Returns
    {doc_id: score} including zero scores.
    """
    n_docs = len(docs)
    lengths = {d: len(seq) for d, seq in docs.items()}
    avgdl = sum(lengths[d] for d in sorted(lengths)) / n_docs if n_docs else 0.0
    dfs = Counter()
    for seq in docs.values():
        dfs.update(set(seq))
    scores = {}
    for doc_id, seq in docs.items():
        counts = Counter(seq)
        total = 0.0
        for term in sorted(query_terms):
            qtf = query_terms[term] if isinstance(query_terms, dict) else 1
            tf = counts.get(term, 0)
            if tf == 0:
                continue
            df = dfs[term]
            idf = math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))
            dl = lengths[doc_id]
            tf_part = tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl))
            total += qtf * (idf * tf_part)
        scores[doc_id] = total
    return scores


def brute_force_bm25_ranking(query_terms, docs, k=1000, k1=0.9, b=0.4):
    scores = brute_force_bm25_scores(query_terms, docs, k1=k1, b=b)
    order = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return order[:k]


def naive_rm3_expand(
    query_counts,
    first_pass,
    docs,
    fb_docs=10,
    fb_terms=10,
    orig_weight=0.5,
    uniform=False,
):
    """Build the interpolated query model {term: weight}.

    first_pass is a list of (doc_id, score) pairs already ranked; docs maps
    doc_id -> term sequence.  Mirrors the relevance-model definition term
    by term: P(t|d) = tf/|d|, document weights from min-shifted and
    sum-normalized first-pass scores (or uniform), keep the fb_terms
    heaviest expansion terms, renormalize, then interpolate with the
    normalized original query counts.
    """
    fb = first_pass[:fb_docs]
    if uniform:
        doc_w = {d: 1.0 / len(fb) for d, _ in fb}
    else:
        raw = [s for _, s in fb]
        low = min(raw)
        shifted = [s - low for s in raw] if low < 0 else list(raw)
        z = sum(shifted)
        if z == 0:
            doc_w = {d: 1.0 / len(fb) for d, _ in fb}
        else:
            doc_w = {d: s / z for (d, _), s in zip(fb, shifted)}
    fb_weights = {}
    for doc_id, _ in fb:
        seq = docs[doc_id]
        counts = Counter(seq)
        for term, tf in counts.items():
            if len(term) < 2:
                continue
            fb_weights[term] = fb_weights.get(term, 0.0) + doc_w[doc_id] * tf / len(seq)
    top = sorted(fb_weights.items(), key=lambda item: (-item[1], item[0]))[:fb_terms]
    z = sum(w for _, w in top)
    fb_model = {t: w / z for t, w in top} if z > 0 else {}
    qz = sum(query_counts.values())
    orig_model = {t: c / qz for t, c in query_counts.items()}
    expanded = {}
    for term in set(orig_model) | set(fb_model):
        expanded[term] = orig_weight * orig_model.get(term, 0.0) + (
            1.0 - orig_weight
        ) * fb_model.get(term, 0.0)
    return expanded


def brute_force_weighted_ranking(weights, docs, k=1000, k1=0.9, b=0.4):
    """Rank docs by sum of weight(t) * per-term score, the second-pass
    scoring rule for an expanded query."""
    n_docs = len(docs)
    lengths = {d: len(seq) for d, seq in docs.items()}
    avgdl = sum(lengths[d] for d in sorted(lengths)) / n_docs if n_docs else 0.0
    dfs = Counter()
    for seq in docs.values():
        dfs.update(set(seq))
    scores = {}
    for doc_id, seq in docs.items():
        counts = Counter(seq)
        total = 0.0
        for term in sorted(weights):
            tf = counts.get(term, 0)
            if tf == 0:
                continue
            df = dfs[term]
            idf = math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))
            dl = lengths[doc_id]
            tf_part = tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl))
            total += weights[term] * (idf * tf_part)
        scores[doc_id] = total
    order = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return order[:k]


# ---------------------------------------------------------------------------
# Naive ranking metrics.
# ---------------------------------------------------------------------------


def naive_average_precision(ranked_ids, relevant, cutoff=1000):
    if not relevant:
        return None
    hits = 0
    total = 0.0
    for pos, doc_id in enumerate(ranked_ids[:cutoff], start=1):
        if doc_id in relevant:
            hits += 1
            total += hits / pos
    return total / len(relevant)


def naive_recall(ranked_ids, relevant, k=10):
    if not relevant:
        return None
    found = sum(1 for d in ranked_ids[:k] if d in relevant)
    return found / len(relevant)


# ---------------------------------------------------------------------------
# Student t distribution by numerical integration of the density.
# ---------------------------------------------------------------------------


def t_density(x, df):
    log_pdf = (
        math.lgamma((df + 1) / 2.0)
        - math.lgamma(df / 2.0)
        - 0.5 * math.log(df * math.pi)
        - ((df + 1) / 2.0) * math.log1p(x * x / df)
    )
    return math.exp(log_pdf)


def t_two_tailed_p_by_integration(t, df):
    """Two-tailed p from integrating the density over the upper tail."""
    from scipy import integrate

    tail, _err = integrate.quad(t_density, abs(t), math.inf, args=(df,))
    return min(1.0, 2.0 * tail)


# ---------------------------------------------------------------------------
# Full experiment pipeline, recomputed end to end for the desk corpus.
# File parsing is done by hand here; token streams come from the package
# tokenizer (it has its own reference-port oracles), p-values from the
# package t CDF (it has its own integration oracle).  Everything between
# those two ends is recomputed with the naive helpers above.
# ---------------------------------------------------------------------------

REFERENCE_ROWS = (
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


def _reference_load_corpus(path):
    import json

    from prmukit import textnorm

    docs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            term_seq = (
                textnorm.normalize(rec["title"])
                + [textnorm.SEP_TOKEN]
                + textnorm.normalize(rec["abstract"])
            )
            kp_seqs = [textnorm.normalize(kp) for kp in rec.get("keyphrases", [])]
            docs.append((rec["id"], term_seq, kp_seqs))
    return docs


def _reference_load_topics(path):
    from prmukit import textnorm

    topics = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            topic_id, text = line.rstrip("\n").split("\t", 1)
            counts = {}
            for token in textnorm.normalize(text):
                counts[token] = counts.get(token, 0) + 1
            topics.append((topic_id, counts))
    return topics


def _reference_load_qrels(path):
    grades = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            topic_id, _iter, doc_id, grade = line.split()
            grades.setdefault(topic_id, {})[doc_id] = int(grade)
    return grades


def _reference_augment(docs, codes):
    from prmukit.textnorm import SEP_TOKEN

    out = {}
    appended = 0
    for doc_id, term_seq, kp_seqs in docs:
        terms = [t for t in term_seq if t != SEP_TOKEN]
        for kp_terms in kp_seqs:
            if not kp_terms:
                continue
            if naive_classify(kp_terms, term_seq) in codes:
                terms = terms + kp_terms
                appended += 1
        out[doc_id] = terms
    return out, appended / len(docs)


def _reference_eval(rankings, qrels, kind, cutoff):
    per = {}
    for topic_id in sorted(qrels):
        relevant = {d for d, g in qrels[topic_id].items() if g >= 1}
        if not relevant:
            continue
        ranked = rankings.get(topic_id, [])
        if kind == "map":
            per[topic_id] = naive_average_precision(ranked, relevant, cutoff)
        else:
            per[topic_id] = naive_recall(ranked, relevant, cutoff)
    aggregate = sum(per.values()) / len(per)
    return aggregate, [per[t] for t in sorted(per)]


def _reference_p_value(a, b):
    from prmukit.eval import student_t_two_tailed_p

    n = len(a)
    diffs = [x - y for x, y in zip(a, b)]
    mean = sum(diffs) / n
    variance = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(variance)
    if sd == 0.0:
        return 1.0 if mean == 0.0 else 0.0
    t = mean / (sd / math.sqrt(n))
    return student_t_two_tailed_p(t, n - 1)


def build_reference_report(
    corpus_path,
    topics_path,
    qrels_path,
    metric="map@1000",
    k=1000,
    k1=0.9,
    b=0.4,
    fb_docs=10,
    fb_terms=10,
    orig_weight=0.5,
    doc_weighting="score",
):
    """Recompute the nine-row ablation report from the raw files."""
    kind, _at, cutoff = metric.partition("@")
    cutoff = int(cutoff)
    docs = _reference_load_corpus(corpus_path)
    topics = _reference_load_topics(topics_path)
    qrels = _reference_load_qrels(qrels_path)

    staged = []
    for name, codes in REFERENCE_ROWS:
        augmented, kp_appended = _reference_augment(docs, codes)
        bm25_rankings = {}
        rm3_rankings = {}
        for topic_id, counts in topics:
            first = [
                (d, s)
                for d, s in brute_force_bm25_ranking(counts, augmented, k=k, k1=k1, b=b)
                if s > 0
            ][:k]
            bm25_rankings[topic_id] = [d for d, _ in first]
            if not first:
                rm3_rankings[topic_id] = []
                continue
            if orig_weight == 1.0:
                rm3_rankings[topic_id] = [d for d, _ in first]
                continue
            expanded = naive_rm3_expand(
                counts,
                first,
                augmented,
                fb_docs=fb_docs,
                fb_terms=fb_terms,
                orig_weight=orig_weight,
                uniform=doc_weighting == "uniform",
            )
            second = [
                (d, s)
                for d, s in brute_force_weighted_ranking(
                    expanded, augmented, k=k, k1=k1, b=b
                )
                if s > 0
            ][:k]
            rm3_rankings[topic_id] = [d for d, _ in second]
        bm25_score, bm25_vec = _reference_eval(bm25_rankings, qrels, kind, cutoff)
        rm3_score, rm3_vec = _reference_eval(rm3_rankings, qrels, kind, cutoff)
        staged.append((name, codes, kp_appended, bm25_score, bm25_vec, rm3_score, rm3_vec))

    by_name = {s[0]: s for s in staged}
    baseline = by_name["baseline"]
    present = by_name.get("+P")
    rows = []
    for name, codes, kp_appended, b_score, b_vec, r_score, r_vec in staged:
        row = {"name": name, "categories": codes, "kp_appended": kp_appended}
        for key, score, vec, base_vec, pres_vec in (
            ("bm25", b_score, b_vec, baseline[4], present[4] if present else None),
            ("bm25_rm3", r_score, r_vec, baseline[6], present[6] if present else None),
        ):
            cell = {
                "score": score,
                "p_vs_baseline": None,
                "significant_vs_baseline": None,
                "p_vs_present": None,
                "significant_vs_present": None,
            }
            if name != "baseline":
                p = _reference_p_value(vec, base_vec)
                cell["p_vs_baseline"] = p
                cell["significant_vs_baseline"] = p < 0.05
            if present is not None and name != "+P":
                p = _reference_p_value(vec, pres_vec)
                cell["p_vs_present"] = p
                cell["significant_vs_present"] = p < 0.05
            row[key] = cell
        rows.append(row)

    return {
        "metric": metric,
        "config": {
            "corpus": str(corpus_path),
            "topics": str(topics_path),
            "qrels": str(qrels_path),
            "k": k,
            "k1": k1,
            "b": b,
            "fb_docs": fb_docs,
            "fb_terms": fb_terms,
            "orig_weight": orig_weight,
            "doc_weighting": doc_weighting,
            "alpha": 0.05,
            "n_docs": len(docs),
            "n_topics": len(topics),
        },
        "rows": rows,
    }
