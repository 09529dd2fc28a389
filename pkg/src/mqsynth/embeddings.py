"""Word-vector store with exact brute-force nearest-neighbor queries.

Embedding files are plain text, one `word f1 ... fd` record per line, with
an optional `V d` integer header (both classic text-vector conventions).
Distance between words is cosine distance (1 - cosine similarity), so it
lives in [0, 2], is symmetric, and is 0 for identical words.
"""

from dataclasses import dataclass, field

import numpy as np

from .kernels import cosine_distance_scan


class EmbeddingError(ValueError):
    """Raised for unreadable, empty, or malformed embedding files."""


class OOVError(KeyError):
    """Raised when a queried word is not in the vocabulary."""

    def __init__(self, word: str):
        super().__init__(word)
        self.word = word

    def __str__(self) -> str:
        return f"word not in embedding vocabulary: {self.word!r}"


@dataclass
class SemanticNeighborhood:
    """The k nearest vocabulary words to `word`, sorted by distance ascending.

    Ties are broken by lexicographic word order; the query word itself is
    never included.
    """

    word: str
    k: int
    neighbors: list[tuple[str, float]] = field(default_factory=list)

    def words(self) -> list[str]:
        return [w for w, _ in self.neighbors]


class EmbeddingTable:
    """Immutable word-vector table; safe for concurrent reads after load.

    Neighborhood scans are memoized per word (cache fills are idempotent, so
    racing readers at worst recompute the same value).
    """

    def __init__(self, words: list[str], matrix: np.ndarray):
        if len(words) == 0:
            raise EmbeddingError("empty vocabulary")
        self.words = list(words)
        self.matrix = np.ascontiguousarray(matrix, dtype=np.float64)
        self.dimension = int(self.matrix.shape[1])
        self.index = {w: i for i, w in enumerate(self.words)}
        self.norms = np.linalg.norm(self.matrix, axis=1)
        # Rank of each row's word in lexicographic order, for total tie-breaks.
        order = sorted(range(len(self.words)), key=lambda i: self.words[i])
        self._lexrank = np.empty(len(self.words), dtype=np.int64)
        for rank, i in enumerate(order):
            self._lexrank[i] = rank
        self._neighbor_cache: dict[str, list[tuple[str, float]]] = {}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.index

    def vector(self, word: str) -> np.ndarray:
        key = word.lower()
        if key not in self.index:
            raise OOVError(word)
        return self.matrix[self.index[key]]

    def _sorted_scan(self, word: str, limit: int) -> list[tuple[str, float]]:
        """First `limit` neighbors of `word` by (distance, lexicographic word)."""
        cached = self._neighbor_cache.get(word)
        if cached is not None and len(cached) >= min(limit, len(self.words) - 1):
            return cached
        qi = self.index[word]
        dist = cosine_distance_scan(
            self.matrix, self.norms, self.matrix[qi], float(self.norms[qi])
        )
        order = np.lexsort((self._lexrank, dist))
        out: list[tuple[str, float]] = []
        want = min(limit, len(self.words) - 1)
        for i in order:
            if i == qi:
                continue
            out.append((self.words[i], float(dist[i])))
            if len(out) >= want:
                break
        self._neighbor_cache[word] = out
        return out


# Neighborhood size used throughout unless callers override it.
DEFAULT_K = 10

# Cache a little past the requested k so later, slightly larger queries hit.
_CACHE_SLACK = 54


def load_embeddings(path, max_words: int | None = None) -> EmbeddingTable:
    """Load a text-format embedding file into an EmbeddingTable.

    Lookup is case-insensitive (words are lowercased); duplicates keep the
    first occurrence; zero-norm vectors are rejected at load (the line is
    dropped). Lines whose dimension disagrees with the first vector line or
    that contain non-numeric / non-finite values raise EmbeddingError naming
    the line number. `max_words` keeps only the first `max_words` vocabulary
    lines (frequency-ordered files make this a frequency cut).
    """
    words: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dimension: int | None = None
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise EmbeddingError(f"cannot read embedding file {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                except ValueError:
                    pass
                else:
                    continue  # `V d` header line
            word = parts[0].lower()
            values = parts[1:]
            if dimension is None:
                if not values:
                    raise EmbeddingError(f"line {lineno}: no vector components")
                dimension = len(values)
            elif len(values) != dimension:
                raise EmbeddingError(
                    f"line {lineno}: expected {dimension} components, got {len(values)}"
                )
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError as exc:
                raise EmbeddingError(f"line {lineno}: {exc}") from exc
            if not np.all(np.isfinite(vec)):
                raise EmbeddingError(f"line {lineno}: non-finite vector component")
            if word in seen:
                continue
            if float(np.linalg.norm(vec)) == 0.0:
                continue  # zero-norm vectors cannot participate in cosine distance
            seen.add(word)
            words.append(word)
            rows.append(vec)
            if max_words is not None and len(words) >= max_words:
                break
    if not words:
        raise EmbeddingError(f"empty vocabulary in {path}")
    return EmbeddingTable(words, np.vstack(rows))


def semantic_distance(w1: str, w2: str, table: EmbeddingTable) -> float:
    """Cosine distance between two in-vocabulary words, in [0, 2]."""
    a, b = w1.lower(), w2.lower()
    if a not in table.index:
        raise OOVError(w1)
    if b not in table.index:
        raise OOVError(w2)
    if a == b:
        return 0.0
    va, vb = table.vector(a), table.vector(b)
    cos = float(np.dot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))
    return min(2.0, max(0.0, 1.0 - cos))


def k_nearest(w: str, k: int, table: EmbeddingTable) -> SemanticNeighborhood:
    """The k vocabulary words nearest to `w`, excluding `w` itself.

    Returns fewer than k only when the vocabulary has fewer than k+1 words.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    key = w.lower()
    if key not in table.index:
        raise OOVError(w)
    scan = table._sorted_scan(key, k + _CACHE_SLACK)
    return SemanticNeighborhood(word=key, k=k, neighbors=scan[:k])
