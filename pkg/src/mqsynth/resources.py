"""Paths and loaders for the bundled desk-scale resources."""

from functools import lru_cache
from importlib.resources import files
from pathlib import Path

from .embeddings import EmbeddingTable, load_embeddings
from .textspace import PosLexicon, load_pos_lexicon


def bundled_path(name: str) -> Path:
    path = Path(str(files("mqsynth").joinpath("data", name)))
    if not path.exists():
        raise FileNotFoundError(f"bundled resource missing: {name}")
    return path


def default_corpus_path() -> Path:
    return bundled_path("polarity_corpus.csv")


def default_synonyms_path() -> Path:
    return bundled_path("synonyms.tsv")


@lru_cache(maxsize=2)
def default_embeddings() -> EmbeddingTable:
    return load_embeddings(bundled_path("embeddings_50d.txt"))


@lru_cache(maxsize=2)
def default_lexicon() -> PosLexicon:
    return load_pos_lexicon(
        bundled_path("pos_lexicon.tsv"), bundled_path("suffix_rules.tsv")
    )
