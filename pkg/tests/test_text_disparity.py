"""Cosine-based title/caption/transcript agreement and the embedding table."""

from __future__ import annotations

import math
from collections import Counter

import numpy as np
import pytest

from baitscreen.text_disparity import (
    EmbeddingTableError,
    WordEmbeddingTable,
    cosine_similarity,
    disparity_triplet,
    embed_mean,
    load_embedding_table,
    preprocess,
    strip_punctuation,
    tf_cosine,
)


def small_table():
    return WordEmbeddingTable(
        vectors={
            "cat": np.array([0.0, 1.0]),
            "dog": np.array([1.0, 0.0]),
            "big": np.array([1.0, 1.0]),
            "w": np.array([1.0, 2.0]),
            "u": np.array([0.0, -1.0]),
        },
        dim=2,
    )


# ------------------------------------------------------------------ cosine


def test_cosine_reference_values():
    assert cosine_similarity(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == pytest.approx(1.0)
    assert cosine_similarity(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0
    assert cosine_similarity(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == pytest.approx(
        1 / math.sqrt(2)
    )


def test_cosine_zero_norm_is_zero():
    assert cosine_similarity(np.zeros(3), np.array([1.0, 2.0, 3.0])) == 0.0
    assert cosine_similarity(np.zeros(2), np.zeros(2)) == 0.0


def test_cosine_shape_mismatch():
    with pytest.raises(ValueError):
        cosine_similarity(np.ones(2), np.ones(3))


def test_cosine_symmetric_and_bounded_fuzz():
    rng = np.random.default_rng(2)
    for _ in range(300):
        u = rng.normal(size=4)
        v = rng.normal(size=4)
        c = cosine_similarity(u, v)
        assert -1.0 - 1e-12 <= c <= 1.0 + 1e-12
        assert c == pytest.approx(cosine_similarity(v, u), abs=1e-12)
        assert cosine_similarity(u, 3.0 * u) == pytest.approx(1.0)


# -------------------------------------------------------------- preprocess


def test_strip_punctuation_removes_unicode_marks():
    assert strip_punctuation("don't stop!") == "dont stop"
    assert strip_punctuation("“quoted…”") == "quoted"
    assert strip_punctuation("plain words") == "plain words"


def test_preprocess_reference():
    assert preprocess("The Movie, the TRAILER!", {"the"}) == ["movie", "trailer"]
    assert preprocess("", {"the"}) == []
    assert preprocess("a a a", {"a"}) == []


def test_tf_cosine_reference_and_oracle():
    assert tf_cosine([], ["x"]) == 0.0
    assert tf_cosine([], []) == 0.0
    assert tf_cosine(["x", "y"], ["x", "y"]) == pytest.approx(1.0)
    rng = np.random.default_rng(4)
    vocab = ["a", "b", "c", "d", "e"]
    for _ in range(200):
        ta = list(rng.choice(vocab, size=rng.integers(0, 10)))
        tb = list(rng.choice(vocab, size=rng.integers(0, 10)))
        got = tf_cosine(ta, tb)
        ca, cb = Counter(ta), Counter(tb)
        dot = sum(ca[w] * cb[w] for w in vocab)
        na = math.sqrt(sum(v * v for v in ca.values()))
        nb = math.sqrt(sum(v * v for v in cb.values()))
        want = dot / (na * nb) if na and nb else 0.0
        assert got == pytest.approx(want, abs=1e-12)
        assert got == pytest.approx(tf_cosine(tb, ta), abs=1e-12)


def test_embed_mean_reference():
    table = small_table()
    assert np.allclose(embed_mean(["w"], table), [1.0, 2.0])
    assert np.allclose(embed_mean(["w", "u"], table), [0.5, 0.5])
    assert np.array_equal(embed_mean(["missing", "words"], table), np.zeros(2))
    assert np.array_equal(embed_mean([], table), np.zeros(2))


def test_embed_mean_is_case_insensitive():
    table = small_table()
    assert np.allclose(embed_mean(["CAT"], table), embed_mean(["cat"], table))


# --------------------------------------------------------------- triplets


def test_triplet_identical_texts(lexicons):
    trip = disparity_triplet(
        "big cat runs", "big cat runs", lexicons.stopwords, small_table()
    )
    assert trip.cos_plain == pytest.approx(1.0)
    assert trip.cos_preprocessed == pytest.approx(1.0)
    assert trip.cos_embedding == pytest.approx(1.0)


def test_triplet_disjoint_texts():
    trip = disparity_triplet("big cat", "small dog", set(), small_table())
    # wholly different tokens: zero term overlap
    assert trip.cos_plain == 0.0
    assert trip.cos_preprocessed == 0.0


def test_triplet_reference_values():
    trip = disparity_triplet("big cat", "big dog", set(), small_table())
    assert trip.cos_plain == pytest.approx(0.5)
    assert trip.cos_preprocessed == pytest.approx(0.5)
    assert trip.cos_embedding == pytest.approx(0.8)


def test_triplet_plain_equals_preprocessed_without_noise():
    table = small_table()
    trip = disparity_triplet("big cat dog", "cat dog dog", set(), table)
    assert trip.cos_plain == trip.cos_preprocessed


def test_triplet_symmetry_fuzz(lexicons):
    rng = np.random.default_rng(9)
    table = small_table()
    vocab = ["big", "cat", "dog", "the", "a", "runs", "fast"]
    for _ in range(150):
        a = " ".join(rng.choice(vocab, size=rng.integers(0, 8)))
        b = " ".join(rng.choice(vocab, size=rng.integers(0, 8)))
        ab = disparity_triplet(a, b, lexicons.stopwords, table)
        ba = disparity_triplet(b, a, lexicons.stopwords, table)
        assert ab.cos_plain == pytest.approx(ba.cos_plain, abs=1e-12)
        assert ab.cos_preprocessed == pytest.approx(ba.cos_preprocessed, abs=1e-12)
        assert ab.cos_embedding == pytest.approx(ba.cos_embedding, abs=1e-12)
        assert 0.0 <= ab.cos_plain <= 1.0 + 1e-12
        assert 0.0 <= ab.cos_preprocessed <= 1.0 + 1e-12
        assert -1.0 - 1e-12 <= ab.cos_embedding <= 1.0 + 1e-12


# ----------------------------------------------------------- table loading


def test_load_embedding_table(tmp_path):
    path = tmp_path / "vectors.txt"
    path.write_text("cat 0.0 1.0\nDog 1.0 0.0\n", encoding="utf-8")
    table = load_embedding_table(path)
    assert table.dim == 2
    assert np.allclose(embed_mean(["dog"], table), [1.0, 0.0])
    assert np.allclose(embed_mean(["DOG"], table), [1.0, 0.0])


def test_load_embedding_table_errors(tmp_path):
    lonely = tmp_path / "a.txt"
    lonely.write_text("cat\n", encoding="utf-8")
    with pytest.raises(EmbeddingTableError):
        load_embedding_table(lonely)

    bad_number = tmp_path / "b.txt"
    bad_number.write_text("cat one two\n", encoding="utf-8")
    with pytest.raises(EmbeddingTableError):
        load_embedding_table(bad_number)

    ragged = tmp_path / "c.txt"
    ragged.write_text("cat 1.0 2.0\ndog 1.0\n", encoding="utf-8")
    with pytest.raises(EmbeddingTableError):
        load_embedding_table(ragged)

    empty = tmp_path / "d.txt"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(EmbeddingTableError):
        load_embedding_table(empty)


def test_packaged_word_vectors_load(resources):
    table = resources.table
    assert table.dim > 0
    assert len(table.vectors) > 100
