import random

import numpy as np
import pytest

from mqsynth.embeddings import EmbeddingTable
from mqsynth.textspace import PosLexicon, make_instance


def random_table(n_words: int, dim: int, seed: int = 0) -> EmbeddingTable:
    rng = np.random.default_rng(seed)
    words = [f"w{i:03d}" for i in range(n_words)]
    matrix = rng.normal(size=(n_words, dim))
    return EmbeddingTable(words, matrix)


@pytest.fixture
def toy_table():
    return random_table(50, 8, seed=1)


@pytest.fixture
def toy200_table():
    return random_table(200, 16, seed=2)


TOY_LEXICON_ENTRIES = {
    "the": [("DET", 1.0)],
    "a": [("DET", 1.0)],
    "this": [("DET", 1.0)],
    "i": [("PRON", 1.0)],
    "we": [("PRON", 1.0)],
    "cat": [("NOUN", 1.0)],
    "dog": [("NOUN", 1.0)],
    "kitten": [("NOUN", 1.0)],
    "dogs": [("NOUN", 1.0)],
    "book": [("NOUN", 1.0)],
    "film": [("NOUN", 1.0)],
    "man": [("NOUN", 1.0)],
    "pet": [("VERB", 0.6), ("NOUN", 0.4)],
    "bites": [("VERB", 1.0)],
    "want": [("VERB", 1.0)],
    "to": [("PREP", 1.0)],
    "hate": [("VERB", 1.0)],
    "adore": [("VERB", 1.0)],
    "love": [("VERB", 0.7), ("NOUN", 0.3)],
    "good": [("ADJ", 1.0)],
    "bad": [("ADJ", 1.0)],
    "fine": [("ADJ", 1.0)],
    "bark": [("VERB", 1.0)],
    "and": [("CONJ", 1.0)],
    "very": [("ADV", 1.0)],
}

TOY_SUFFIXES = [("ly", "ADV"), ("ing", "VERB"), ("ness", "NOUN"), ("s", "NOUN")]


@pytest.fixture
def toy_lexicon():
    return PosLexicon(TOY_LEXICON_ENTRIES, TOY_SUFFIXES)


@pytest.fixture(scope="session")
def bundled_table():
    from mqsynth.resources import default_embeddings

    return default_embeddings()


@pytest.fixture(scope="session")
def bundled_lexicon():
    from mqsynth.resources import default_lexicon

    return default_lexicon()


@pytest.fixture(scope="session")
def bundled_dataset():
    from mqsynth.experiments import load_dataset
    from mqsynth.resources import default_corpus_path

    return load_dataset(default_corpus_path(), split_seed=0, name="polarity")


@pytest.fixture(scope="session")
def bundled_synonyms():
    from mqsynth.experiments import load_synonyms
    from mqsynth.resources import default_synonyms_path

    return load_synonyms(default_synonyms_path())


@pytest.fixture
def rng():
    return random.Random(12345)


def make_core(dataset, lexicon, size=10, seed="core"):
    """Sample a two-class core set and return (instances, labels)."""
    r = random.Random(seed)
    train = dataset.train_records()
    while True:
        picked = r.sample(range(len(train)), size)
        if len({train[i][1] for i in picked}) > 1:
            break
    insts = [make_instance(train[i][0], lexicon, train[i][1]) for i in picked]
    return insts, [train[i][1] for i in picked]
