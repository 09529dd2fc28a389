"""Embedding load, cosine distance, and exact k-NN against brute-force oracles."""

import itertools
import random

import numpy as np
import pytest

from mqsynth.embeddings import (
    EmbeddingError,
    OOVError,
    k_nearest,
    load_embeddings,
    semantic_distance,
)


def write_embeddings(tmp_path, lines, name="vecs.txt"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def brute_force_neighbors(table, word, k):
    """Independent scan: raw cosine from the stored vectors, full sort."""
    qv = table.vector(word)
    scored = []
    for other in table.words:
        if other == word:
            continue
        ov = table.vector(other)
        cos = float(ov @ qv / (np.linalg.norm(ov) * np.linalg.norm(qv)))
        scored.append((min(2.0, max(0.0, 1.0 - cos)), other))
    scored.sort(key=lambda t: (t[0], t[1]))
    return [(w, d) for d, w in scored[:k]]


class TestLoad:
    def test_two_line_file(self, tmp_path):
        path = write_embeddings(tmp_path, ["cat 1 0", "dog 0 1"])
        table = load_embeddings(path)
        assert table.dimension == 2
        assert len(table) == 2

    def test_header_line_skipped(self, tmp_path):
        comps = " ".join(["0.1"] * 300)
        path = write_embeddings(tmp_path, ["2 300", f"cat {comps}", f"dog {comps[:-1]}2"])
        table = load_embeddings(path)
        assert table.dimension == 300
        assert len(table) == 2

    def test_malformed_component_names_line(self, tmp_path):
        path = write_embeddings(tmp_path, ["cat 1 0 3", "bad 1 x 3"])
        with pytest.raises(EmbeddingError, match="line 2"):
            load_embeddings(path)

    def test_inconsistent_dimension_names_line(self, tmp_path):
        path = write_embeddings(tmp_path, ["cat 1 0", "dog 1 2 3"])
        with pytest.raises(EmbeddingError, match="line 2"):
            load_embeddings(path)

    def test_non_finite_rejected(self, tmp_path):
        path = write_embeddings(tmp_path, ["cat 1 0", "dog nan 1"])
        with pytest.raises(EmbeddingError, match="line 2"):
            load_embeddings(path)

    def test_zero_norm_line_dropped(self, tmp_path):
        path = write_embeddings(tmp_path, ["cat 1 0", "zero 0 0", "dog 0 1"])
        table = load_embeddings(path)
        assert "zero" not in table
        assert len(table) == 2

    def test_duplicates_keep_first_and_lookup_is_case_insensitive(self, tmp_path):
        path = write_embeddings(tmp_path, ["Cat 1 0", "CAT 0 1", "dog 0 1"])
        table = load_embeddings(path)
        assert len(table) == 2
        np.testing.assert_array_equal(table.vector("cAt"), [1.0, 0.0])

    def test_empty_vocabulary(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("", encoding="utf-8")
        with pytest.raises(EmbeddingError, match="empty"):
            load_embeddings(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(EmbeddingError, match="cannot read"):
            load_embeddings(tmp_path / "nope.txt")

    def test_max_words_prunes_to_first_lines(self, tmp_path):
        path = write_embeddings(tmp_path, [f"w{i} {i + 1} 0" for i in range(10)])
        table = load_embeddings(path, max_words=4)
        assert table.words == ["w0", "w1", "w2", "w3"]


class TestDistance:
    def test_identity(self, toy_table):
        assert semantic_distance("w007", "w007", toy_table) == 0.0

    def test_orthogonal_vectors(self, tmp_path):
        path = write_embeddings(tmp_path, ["cat 1 0", "dog 0 1"])
        table = load_embeddings(path)
        assert semantic_distance("cat", "dog", table) == pytest.approx(1.0)

    def test_all_pairs_match_raw_recomputation(self, toy_table):
        for w1, w2 in itertools.combinations(toy_table.words[:20], 2):
            v1, v2 = toy_table.vector(w1), toy_table.vector(w2)
            expected = 1.0 - float(
                v1 @ v2 / (np.linalg.norm(v1) * np.linalg.norm(v2))
            )
            got = semantic_distance(w1, w2, toy_table)
            assert got == pytest.approx(max(0.0, min(2.0, expected)), abs=1e-12)

    def test_symmetry_on_random_pairs(self, toy_table, rng):
        for _ in range(100):
            w1, w2 = rng.choice(toy_table.words), rng.choice(toy_table.words)
            assert semantic_distance(w1, w2, toy_table) == semantic_distance(
                w2, w1, toy_table
            )

    def test_range(self, toy_table, rng):
        for _ in range(100):
            w1, w2 = rng.choice(toy_table.words), rng.choice(toy_table.words)
            assert 0.0 <= semantic_distance(w1, w2, toy_table) <= 2.0

    def test_oov_names_word(self, toy_table):
        with pytest.raises(OOVError, match="zzz"):
            semantic_distance("zzz", "w001", toy_table)


class TestKNearest:
    @pytest.mark.parametrize("k", [1, 5, 10])
    def test_matches_brute_force_scan_everywhere(self, toy200_table, k):
        for word in toy200_table.words:
            nb = k_nearest(word, k, toy200_table)
            expected = brute_force_neighbors(toy200_table, word, k)
            assert nb.words() == [w for w, _ in expected]
            for (w1, d1), (w2, d2) in zip(nb.neighbors, expected):
                assert d1 == pytest.approx(d2, abs=1e-9)

    def test_default_neighborhood_size_is_ten(self, toy200_table):
        from mqsynth.embeddings import DEFAULT_K

        assert DEFAULT_K == 10
        assert len(k_nearest("w000", DEFAULT_K, toy200_table).neighbors) == 10

    def test_single_word_vocabulary_gives_empty_neighborhood(self, tmp_path):
        path = write_embeddings(tmp_path, ["only 1 2"])
        table = load_embeddings(path)
        assert k_nearest("only", 5, table).neighbors == []

    def test_excludes_query_word(self, toy_table):
        assert "w003" not in k_nearest("w003", 10, toy_table).words()

    def test_prefix_property(self, toy_table):
        for word in toy_table.words[:10]:
            big = k_nearest(word, 12, toy_table).words()
            for k in range(1, 12):
                assert k_nearest(word, k, toy_table).words() == big[:k]

    def test_deterministic_across_reloads(self, tmp_path):
        rng = np.random.default_rng(9)
        lines = [
            f"w{i} " + " ".join(f"{x:.6f}" for x in rng.normal(size=6))
            for i in range(30)
        ]
        t1 = load_embeddings(write_embeddings(tmp_path, lines, "a.txt"))
        t2 = load_embeddings(write_embeddings(tmp_path, lines, "b.txt"))
        for word in t1.words:
            assert k_nearest(word, 7, t1).neighbors == k_nearest(word, 7, t2).neighbors

    def test_tie_break_is_lexicographic(self, tmp_path):
        # zeta and alpha are equidistant from query; alpha must come first
        path = write_embeddings(
            tmp_path, ["query 1 0", "zeta 0 1", "alpha 0 1", "far -1 0"]
        )
        table = load_embeddings(path)
        assert k_nearest("query", 2, table).words() == ["alpha", "zeta"]

    def test_memoization_is_idempotent(self, toy_table):
        first = k_nearest("w001", 5, toy_table)
        again = k_nearest("w001", 5, toy_table)
        assert first.neighbors == again.neighbors
        bigger = k_nearest("w001", 9, toy_table)
        assert bigger.words()[:5] == first.words()

    def test_oov_query(self, toy_table):
        with pytest.raises(OOVError):
            k_nearest("missing", 3, toy_table)

    def test_k_must_be_positive(self, toy_table):
        with pytest.raises(ValueError):
            k_nearest("w001", 0, toy_table)
