"""Generate the bundled synthetic desk corpus: 30 documents in 5 topical
groups, topics and graded judgments, with keyphrases engineered to cover
all four categories.  Seeded; rerunning reproduces the committed files."""

import json
import random
import sys
from pathlib import Path

PKG_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PKG_ROOT / "src"))

from prmukit import textnorm  # noqa: E402
from prmukit.prmu import classify  # noqa: E402

THEMES = {
    "ranking": ["ranking", "retrieval", "relevance", "query", "scoring", "corpus", "weighting", "feedback"],
    "parsing": ["parsing", "grammar", "syntax", "treebank", "tokens", "ambiguity", "chunking", "tagging"],
    "vision": ["image", "segmentation", "contour", "texture", "pixel", "detection", "shading", "camera"],
    "speech": ["speech", "acoustic", "phoneme", "prosody", "transcription", "microphone", "alignment", "dialect"],
    "crypto": ["cipher", "encryption", "keystream", "padding", "signature", "entropy", "protocol", "handshake"],
}

FILLER = [
    "method", "approach", "study", "analysis", "results", "model", "system",
    "evaluation", "improved", "novel", "framework", "experiments", "baseline",
    "data", "performance", "robust", "empirical", "comparison",
]

# only used inside keyphrases, never in titles or abstracts
EXOTIC = [
    "zeppelin", "quasar", "obsidian", "marzipan", "fjord", "lagoon",
    "tundra", "saffron", "basalt", "monsoon", "zephyr", "granite",
]


def sentence(rng, theme_words, n):
    words = []
    for _ in range(n):
        pool = theme_words if rng.random() < 0.55 else FILLER
        words.append(rng.choice(pool))
    return " ".join(words)


def doc_body(rng, theme_words):
    title = sentence(rng, theme_words, rng.randint(4, 7))
    sentences = [
        sentence(rng, theme_words, rng.randint(8, 14)).capitalize() + "."
        for _ in range(rng.randint(3, 5))
    ]
    return title, " ".join(sentences)


def body_terms(title, abstract):
    return textnorm.normalize(title) + [textnorm.SEP_TOKEN] + textnorm.normalize(abstract)


def present_kp(rng, title, abstract):
    words = (title + " " + abstract.lower().replace(".", "")).split()
    start = rng.randrange(len(words) - 1)
    return " ".join(words[start : start + 2])


def reordered_kp(rng, title, abstract, doc_terms, theme_words):
    """Two in-document words, theme words preferred, never contiguous."""
    body = set((title + " " + abstract.lower().replace(".", "")).split())
    themed = sorted(body & set(theme_words))
    rest = sorted(body)
    for _ in range(200):
        pool = themed if len(themed) >= 2 and rng.random() < 0.8 else rest
        pair = rng.sample(pool, 2)
        kp = " ".join(pair)
        if classify(textnorm.normalize(kp), doc_terms).code == "R":
            return kp
    return None


def absent_theme_words(doc_terms, theme_words):
    return [w for w in theme_words if textnorm.stem(w) not in doc_terms]


def mixed_kp(rng, title, doc_terms, theme_words):
    """One word from the title plus one theme word the document missed
    (exotic fallback), so Mixed keyphrases carry query-relevant terms."""
    missing = absent_theme_words(doc_terms, theme_words)
    for _ in range(50):
        absent = rng.choice(missing) if missing and rng.random() < 0.7 else rng.choice(EXOTIC)
        kp = f"{rng.choice(title.split())} {absent}"
        if classify(textnorm.normalize(kp), doc_terms).code == "M":
            return kp
    return None


def unseen_kp(rng, doc_terms, theme_words):
    """Prefer two same-theme words the document happens to lack."""
    missing = absent_theme_words(doc_terms, theme_words)
    if len(missing) >= 2 and rng.random() < 0.6:
        return " ".join(rng.sample(missing, 2))
    if missing and rng.random() < 0.5:
        return f"{rng.choice(missing)} {rng.choice(EXOTIC)}"
    return " ".join(rng.sample(EXOTIC, 2))


def main():
    rng = random.Random(74512)
    out_dir = PKG_ROOT / "tests" / "data" / "desk"
    out_dir.mkdir(parents=True, exist_ok=True)

    docs = []
    doc_theme = {}
    histogram = {"P": 0, "R": 0, "M": 0, "U": 0}
    i = 0
    for theme, theme_words in THEMES.items():
        for _ in range(6):
            doc_id = f"desk-{i:03d}"
            title, abstract = doc_body(rng, theme_words)
            doc_terms = body_terms(title, abstract)
            keyphrases = []
            # every doc gets one Present keyphrase; the rest rotate
            keyphrases.append(present_kp(rng, title, abstract))
            if i % 3 != 2:
                kp = reordered_kp(rng, title, abstract, doc_terms, theme_words)
                if kp:
                    keyphrases.append(kp)
            if i % 2 == 0:
                kp = mixed_kp(rng, title, doc_terms, theme_words)
                if kp:
                    keyphrases.append(kp)
            if i % 3 != 1:
                keyphrases.append(unseen_kp(rng, doc_terms, theme_words))
            docs.append(
                {
                    "id": doc_id,
                    "title": title,
                    "abstract": abstract,
                    "keyphrases": keyphrases,
                }
            )
            doc_theme[doc_id] = theme
            i += 1

    # one document per theme is relevant to a different theme's topic, but
    # only its keyphrases say so: the augmented configurations can reach it,
    # the baseline index cannot
    theme_names = list(THEMES)
    cross_relevant = {}
    for j, theme in enumerate(theme_names):
        donor_theme = theme_names[(j + 1) % len(theme_names)]
        candidates = [d for d in docs if doc_theme[d["id"]] == donor_theme]
        doc = rng.choice(candidates)
        doc_terms = body_terms(doc["title"], doc["abstract"])
        foreign = rng.sample(THEMES[theme], 2)
        kp = " ".join(foreign)
        code = classify(textnorm.normalize(kp), doc_terms).code
        assert code in ("M", "U"), code
        doc["keyphrases"].append(kp)
        cross_relevant[theme] = doc["id"]

    for doc in docs:
        doc_terms = body_terms(doc["title"], doc["abstract"])
        for kp in doc["keyphrases"]:
            histogram[classify(textnorm.normalize(kp), doc_terms).code] += 1

    with open(out_dir / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc, ensure_ascii=False) + "\n")

    topics = []
    for t, (theme, theme_words) in enumerate(THEMES.items(), start=1):
        text = " ".join(rng.sample(theme_words, 3))
        topics.append((f"t{t}", text, theme))
    with open(out_dir / "topics.tsv", "w", encoding="utf-8") as fh:
        for topic_id, text, _ in topics:
            fh.write(f"{topic_id}\t{text}\n")

    with open(out_dir / "qrels.txt", "w", encoding="utf-8") as fh:
        for topic_id, _, theme in topics:
            theme_docs = sorted(d for d, th in doc_theme.items() if th == theme)
            judged = set(rng.sample(theme_docs, 4))
            judged.add(cross_relevant[theme])
            for doc_id in sorted(judged):
                fh.write(f"{topic_id} 0 {doc_id} {rng.choice([1, 1, 2])}\n")
            other = sorted(
                d for d, th in doc_theme.items() if th != theme and d not in judged
            )
            for doc_id in sorted(rng.sample(other, 2)):
                fh.write(f"{topic_id} 0 {doc_id} 0\n")

    print("categories:", histogram)
    print(f"wrote {len(docs)} docs, {len(topics)} topics -> {out_dir}")


if __name__ == "__main__":
    main()
