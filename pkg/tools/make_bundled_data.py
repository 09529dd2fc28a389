"""Generate the bundled desk-scale resources under src/mqsynth/data/.

Everything is synthetic and deterministic (fixed seed): a binary
sentence-polarity corpus built from templates, 50-d word vectors with
cluster structure (sentiment-bearing clusters sit close to their opposite
cluster so k=10 neighborhoods mix polarities), a coarse POS lexicon with
suffix rules, and a deliberately sparse synonym file for the
synonym-augmentation baseline.

Run from the repo root:  python3 tools/make_bundled_data.py
"""

import csv
import random
from pathlib import Path

import numpy as np

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "mqsynth" / "data"

DIM = 50
SEED = 20240817

# word pools: (cluster name, tag, polarity or None, words)
# Paired sentiment clusters are listed pos-then-neg and share a base direction.
CLUSTERS = [
    ("adj_pos_a", "ADJ", 1, [
        "good", "great", "excellent", "superb", "brilliant", "marvelous",
        "terrific", "splendid", "fine", "nice",
    ]),
    ("adj_neg_a", "ADJ", 0, [
        "bad", "awful", "terrible", "horrible", "dreadful", "poor",
        "lousy", "mediocre", "weak", "clumsy",
    ]),
    ("adj_pos_b", "ADJ", 1, [
        "wonderful", "amazing", "fantastic", "delightful", "charming",
        "lovely", "enjoyable", "pleasant", "refreshing", "satisfying",
    ]),
    ("adj_neg_b", "ADJ", 0, [
        "disappointing", "boring", "tedious", "dull", "bland", "annoying",
        "unpleasant", "painful", "miserable", "forgettable",
    ]),
    ("verb_pos", "VERB", 1, [
        "love", "adore", "enjoy", "admire", "cherish", "like", "appreciate",
        "relish", "savor", "treasure",
    ]),
    ("verb_neg", "VERB", 0, [
        "hate", "dislike", "despise", "loathe", "detest", "dread", "regret",
        "resent", "lament", "deplore",
    ]),
    ("verb_rec_pos", "VERB", 1, [
        "recommend", "praise", "endorse", "applaud", "celebrate",
    ]),
    ("verb_rec_neg", "VERB", 0, [
        "avoid", "dismiss", "pan", "condemn", "ridicule",
    ]),
    ("adj_size", "ADJ", None, ["long", "short", "big", "small", "brief", "lengthy"]),
    ("adj_style", "ADJ", None, [
        "new", "old", "modern", "classic", "recent", "early", "late",
        "familiar", "strange", "quiet", "loud", "dark", "bright", "simple",
        "complex",
    ]),
    ("noun_film", "NOUN", None, ["film", "movie", "picture", "feature", "flick", "sequel"]),
    ("noun_craft", "NOUN", None, [
        "plot", "story", "script", "screenplay", "dialogue", "scene",
        "ending", "premise",
    ]),
    ("noun_people", "NOUN", None, [
        "director", "actor", "actress", "writer", "character", "hero",
        "villain", "narrator",
    ]),
    ("noun_aspect", "NOUN", None, [
        "acting", "performance", "direction", "pacing", "soundtrack",
        "cinematography", "editing", "humor",
    ]),
    ("noun_audience", "NOUN", None, ["audience", "critic", "viewer", "crowd"]),
    ("noun_food", "NOUN", None, [
        "meal", "dinner", "dish", "pizza", "pasta", "soup", "salad",
        "dessert", "burger", "sandwich",
    ]),
    ("noun_place", "NOUN", None, ["restaurant", "cafe", "diner", "bistro"]),
    ("noun_food_aspect", "NOUN", None, [
        "flavor", "taste", "portion", "service", "menu", "waiter", "chef",
    ]),
    ("noun_misc", "NOUN", None, [
        "book", "novel", "album", "song", "concert", "show", "play", "musical",
    ]),
    ("verb_neutral", "VERB", None, [
        "watch", "see", "view", "visit", "find", "think", "feel", "seem",
        "look", "attend", "remember", "expect", "want", "know", "notice",
        "consider",
    ]),
    ("verb_state", "VERB", None, ["was", "is", "were", "felt", "seemed", "looked"]),
    ("adv", "ADV", None, [
        "really", "very", "quite", "truly", "extremely", "fairly", "rather",
        "deeply", "utterly", "somewhat", "honestly", "genuinely",
    ]),
    ("det", "DET", None, ["the", "this", "that", "a", "an", "every", "each", "its", "my", "our"]),
    ("pron", "PRON", None, ["i", "we", "they", "he", "she", "it", "you"]),
    ("prep", "PREP", None, ["of", "in", "on", "with", "about", "for", "at", "by", "to", "from"]),
    ("conj", "CONJ", None, ["and", "but", "or", "yet", "so"]),
]

# Paired sentiment clusters share a base direction orthogonal to one global
# polarity axis and sit at +-POLARITY_DELTA along that axis; within-cluster
# noise is kept orthogonal to the axis. This leaves polarity linearly
# recoverable from averaged vectors while keeping opposite-polarity words
# close enough to appear in each other's 10-nearest neighborhoods.
PAIRED = [
    ("adj_pos_a", "adj_neg_a"),
    ("adj_pos_b", "adj_neg_b"),
    ("verb_pos", "verb_neg"),
    ("verb_rec_pos", "verb_rec_neg"),
]

POLARITY_DELTA = 0.22
NOISE_SIGMA = 0.55

# Lexicon-only everyday words for the tagger and its accuracy checklist.
EXTRA_LEXICON = {
    "NOUN": ["house", "water", "day", "time", "man", "woman", "child", "people",
             "city", "street", "year", "night", "morning", "friend", "family",
             "music", "world", "room", "door", "table"],
    "VERB": ["go", "come", "run", "walk", "eat", "drink", "read", "write",
             "sing", "dance", "open", "close", "start", "stop", "help"],
    "ADJ": ["happy", "sad", "red", "blue", "warm", "cold", "fast", "slow",
            "young", "tall"],
    "ADV": ["always", "never", "often", "soon", "here", "there", "today"],
    "PRON": ["me", "us", "them", "him", "her"],
    "DET": ["some", "any", "no"],
    "PREP": ["under", "over", "into"],
    "CONJ": ["because", "while"],
}

# A few genuinely ambiguous entries; the dominant tag still matches the
# word's cluster tag so the substitution filter stays consistent.
AMBIGUOUS = {
    "love": [("VERB", 0.7), ("NOUN", 0.3)],
    "like": [("VERB", 0.8), ("PREP", 0.2)],
    "show": [("NOUN", 0.6), ("VERB", 0.4)],
    "play": [("NOUN", 0.6), ("VERB", 0.4)],
    "taste": [("NOUN", 0.7), ("VERB", 0.3)],
    "look": [("VERB", 0.8), ("NOUN", 0.2)],
    "find": [("VERB", 0.9), ("NOUN", 0.1)],
}

SUFFIX_RULES = [
    ("ness", "NOUN"), ("tion", "NOUN"), ("ment", "NOUN"), ("ly", "ADV"),
    ("ing", "VERB"), ("ed", "VERB"), ("ous", "ADJ"), ("ful", "ADJ"),
    ("able", "ADJ"), ("ive", "ADJ"), ("er", "NOUN"), ("s", "NOUN"),
]

SYNONYMS = {
    "good": ["fine", "nice"],
    "great": ["terrific"],
    "bad": ["poor", "lousy"],
    "film": ["movie", "picture"],
    "movie": ["film"],
    "love": ["adore"],
    "hate": ["dislike", "despise"],
    "meal": ["dinner"],
    "story": ["plot"],
    "boring": ["dull", "tedious"],
    "wonderful": ["marvelous"],
    "actor": ["actress"],
}


def build_vectors(rng: np.random.Generator) -> dict[str, np.ndarray]:
    axis = rng.normal(size=DIM)
    axis /= np.linalg.norm(axis)

    def orthogonal_unit() -> np.ndarray:
        v = rng.normal(size=DIM)
        v -= (v @ axis) * axis
        return v / np.linalg.norm(v)

    paired_names = {name for pair in PAIRED for name in pair}
    centroids: dict[str, np.ndarray] = {}
    for name, _, _, _ in CLUSTERS:
        if name not in paired_names:
            centroids[name] = orthogonal_unit()
    for pos, neg in PAIRED:
        base = orthogonal_unit()
        centroids[pos] = base + POLARITY_DELTA * axis
        centroids[neg] = base - POLARITY_DELTA * axis

    vectors: dict[str, np.ndarray] = {}
    for name, _, _, words in CLUSTERS:
        for w in words:
            if w in vectors:
                continue
            noise = NOISE_SIGMA * rng.normal(size=DIM) / np.sqrt(DIM)
            noise -= (noise @ axis) * axis
            v = centroids[name] + noise
            vectors[w] = v / np.linalg.norm(v)
    return vectors


# --- corpus templates ------------------------------------------------------

def pool(name: str) -> list[str]:
    for n, _, _, words in CLUSTERS:
        if n == name:
            return words
    raise KeyError(name)


def make_corpus(rng: random.Random, target: int = 1200) -> list[tuple[int, str]]:
    subjects = (pool("noun_film") + pool("noun_craft") + pool("noun_aspect")
                + pool("noun_food") + pool("noun_food_aspect") + pool("noun_misc"))
    things = pool("noun_film") + pool("noun_food") + pool("noun_misc")
    people = pool("noun_people")
    adv = pool("adv")
    neutral_adj = pool("adj_size") + pool("adj_style")

    neutral_verbs = pool("verb_neutral")

    def sent_adj(label):
        return rng.choice(
            pool("adj_pos_a") + pool("adj_pos_b") if label
            else pool("adj_neg_a") + pool("adj_neg_b")
        )

    def sent_verb(label):
        return rng.choice(pool("verb_pos") if label else pool("verb_neg"))

    def rec_verb(label):
        return rng.choice(pool("verb_rec_pos") if label else pool("verb_rec_neg"))

    # Every template carries exactly one sentiment-bearing slot, so the
    # sentence label is always decided by a single word.
    def templates(label: int) -> list[str]:
        return [
            f"The {rng.choice(subjects)} was {sent_adj(label)} .",
            f"The {rng.choice(subjects)} was {rng.choice(adv)} {sent_adj(label)} .",
            f"{rng.choice(['I', 'We', 'They'])} {sent_verb(label)} this {rng.choice(things)} .",
            f"{rng.choice(['I', 'We', 'They'])} {rng.choice(adv)} {sent_verb(label)} the {rng.choice(subjects)} .",
            f"The {rng.choice(people)} made a {sent_adj(label)} {rng.choice(things)} .",
            f"{rng.choice(['We', 'They'])} {rng.choice(neutral_verbs)} the {rng.choice(things)} and {sent_verb(label)} the {rng.choice(subjects)} .",
            f"The {rng.choice(neutral_adj)} {rng.choice(things)} was {sent_adj(label)} .",
            f"{rng.choice(['I', 'We'])} would {rec_verb(label)} this {rng.choice(things)} .",
            f"The {rng.choice(subjects)} of the {rng.choice(things)} was {sent_adj(label)} .",
            f"It was a {sent_adj(label)} {rng.choice(things)} .",
            f"{rng.choice(['I', 'We', 'They'])} found the {rng.choice(things)} {sent_adj(label)} .",
            f"Every {rng.choice(people)} {sent_verb(label)} the {rng.choice(subjects)} .",
        ]

    rows: list[tuple[int, str]] = []
    seen: set[str] = set()
    label = 0
    while len(rows) < target:
        label = 1 - label
        options = templates(label)
        text = rng.choice(options)
        if text.lower() in seen:
            continue
        seen.add(text.lower())
        rows.append((label, text))
    rng.shuffle(rows)
    return rows


def write_all() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    vec_rng = np.random.default_rng(SEED)
    vectors = build_vectors(vec_rng)

    words = sorted(vectors)
    with open(DATA_DIR / "embeddings_50d.txt", "w", encoding="utf-8") as fh:
        fh.write(f"{len(words)} {DIM}\n")
        for w in words:
            comps = " ".join(f"{x:.6f}" for x in vectors[w])
            fh.write(f"{w} {comps}\n")

    with open(DATA_DIR / "pos_lexicon.tsv", "w", encoding="utf-8") as fh:
        written = set()
        for name, tag, _, cluster_words in CLUSTERS:
            for w in cluster_words:
                if w in written:
                    continue
                written.add(w)
                if w in AMBIGUOUS:
                    spec = ",".join(f"{t}:{f}" for t, f in AMBIGUOUS[w])
                else:
                    spec = f"{tag}:1.0"
                fh.write(f"{w}\t{spec}\n")
        for tag, extra in EXTRA_LEXICON.items():
            for w in extra:
                if w not in written:
                    written.add(w)
                    fh.write(f"{w}\t{tag}:1.0\n")

    with open(DATA_DIR / "suffix_rules.tsv", "w", encoding="utf-8") as fh:
        for suffix, tag in SUFFIX_RULES:
            fh.write(f"{suffix}\t{tag}\n")

    with open(DATA_DIR / "synonyms.tsv", "w", encoding="utf-8") as fh:
        for w in sorted(SYNONYMS):
            fh.write(f"{w}\t{','.join(SYNONYMS[w])}\n")

    corpus = make_corpus(random.Random(SEED))
    with open(DATA_DIR / "polarity_corpus.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "text"])
        for label, text in corpus:
            writer.writerow([label, text])

    print(f"wrote {len(words)} vectors, {len(corpus)} corpus rows -> {DATA_DIR}")


def diagnose() -> None:
    """Print neighborhood polarity mixing for the sentiment clusters."""
    import sys
    sys.path.insert(0, str(DATA_DIR.parent.parent))
    from mqsynth.embeddings import k_nearest, load_embeddings
    from mqsynth.textspace import load_pos_lexicon

    table = load_embeddings(DATA_DIR / "embeddings_50d.txt")
    lexicon = load_pos_lexicon(DATA_DIR / "pos_lexicon.tsv", DATA_DIR / "suffix_rules.tsv")
    polarity = {}
    for name, _, pol, cluster_words in CLUSTERS:
        for w in cluster_words:
            polarity.setdefault(w, pol)
    for pair in PAIRED:
        pos_name, neg_name = pair
        for name in (pos_name, neg_name):
            counts = []
            for w in pool(name):
                own_tag = lexicon.dominant_tag(w)
                nb = [
                    x for x, _ in k_nearest(w, 10, table).neighbors
                    if lexicon.dominant_tag(x) == own_tag
                ]
                cross = sum(
                    1 for x in nb
                    if polarity.get(x) is not None and polarity.get(x) != polarity[w]
                )
                counts.append((len(nb), cross))
            kept = sum(n for n, _ in counts) / len(counts)
            crossed = sum(c for _, c in counts) / len(counts)
            print(f"{name:14s} avg filtered neighbors {kept:4.1f}  avg cross-polarity {crossed:4.1f}")


if __name__ == "__main__":
    write_all()
    diagnose()
