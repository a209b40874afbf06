"""Tests for Skip-Gram training, word2vec I/O and nearest-neighbor search."""

import numpy as np
import pytest

from src.core.config import SkipGramConfig
from src.core.exceptions import DimensionMismatch, MalformedHeader, VocabularyTooSmall
from src.services.corpus import build_corpus
from src.services.embedding_service import (
    EmbeddingMatrix,
    load_embeddings,
    nearest_words,
    normalize_rows,
    save_embeddings,
    train_skipgram,
)
from tests.conftest import TOPIC_A, TOPIC_B


def _two_topic_corpus(n_docs=400):
    rng = np.random.default_rng(11)
    lines = []
    for i in range(n_docs):
        topic = TOPIC_A if i % 2 == 0 else TOPIC_B
        lines.append(" ".join(rng.choice(topic, size=12).tolist()))
    corpus, _ = build_corpus(lines, min_count=1)
    return corpus


def test_train_skipgram_separates_topics():
    """Test that co-occurring words end up closer than words from the other topic."""
    corpus = _two_topic_corpus()
    config = SkipGramConfig(dim=10, window=3, epochs=10, subsample_threshold=0.0)
    embeddings = train_skipgram(corpus, config, seed=3)

    sims = embeddings.vectors @ embeddings.vectors.T
    in_a = np.array([w in TOPIC_A for w in embeddings.words])
    intra = []
    inter = []
    for i in range(len(embeddings)):
        for k in range(i + 1, len(embeddings)):
            (intra if in_a[i] == in_a[k] else inter).append(sims[i, k])
    assert np.mean(intra) > np.mean(inter)


def test_train_skipgram_unit_rows_and_reproducible():
    """Test the normalization postcondition and single-worker determinism."""
    corpus = _two_topic_corpus(100)
    config = SkipGramConfig(dim=8, epochs=2)
    first = train_skipgram(corpus, config, seed=5, workers=1)
    second = train_skipgram(corpus, config, seed=5, workers=1)

    np.testing.assert_allclose(np.linalg.norm(first.vectors, axis=1), 1.0, atol=1e-6)
    assert first.words == corpus.vocabulary.words
    np.testing.assert_array_equal(first.vectors, second.vectors)


def test_train_skipgram_pinned_seed_wins():
    """Test that a seed pinned in the config overrides the stage seed."""
    corpus = _two_topic_corpus(60)
    config = SkipGramConfig(dim=8, epochs=1, rng_seed=99)
    first = train_skipgram(corpus, config, seed=1)
    second = train_skipgram(corpus, config, seed=2)
    np.testing.assert_array_equal(first.vectors, second.vectors)


def test_train_skipgram_needs_two_words():
    """Test that a single-word vocabulary is rejected."""
    corpus, _ = build_corpus(["solo solo solo"], min_count=1)
    with pytest.raises(VocabularyTooSmall):
        train_skipgram(corpus, SkipGramConfig(dim=4, epochs=1))


def test_default_dimension():
    """Test the default embedding size."""
    assert SkipGramConfig().dim == 100


def test_load_embeddings_parses_and_normalizes(tmp_path):
    """Test a well-formed file and the 3-4-5 normalization."""
    _, vocabulary = build_corpus(["a b"], min_count=1)
    path = tmp_path / "vectors.txt"
    path.write_text("2 2\na 3 4\nb 0 2\n", encoding="utf-8")

    embeddings = load_embeddings(path, vocabulary)
    assert embeddings.vectors.shape == (2, 2)
    np.testing.assert_allclose(embeddings.vector("a"), [0.6, 0.8])
    np.testing.assert_allclose(embeddings.vector("b"), [0.0, 1.0])


def test_load_embeddings_errors(tmp_path):
    """Test short rows and bad headers."""
    _, vocabulary = build_corpus(["a b"], min_count=1)
    short = tmp_path / "short.txt"
    short.write_text("2 3\na 1 2 3\nb 1 2\n", encoding="utf-8")
    with pytest.raises(DimensionMismatch):
        load_embeddings(short, vocabulary)

    bad = tmp_path / "bad.txt"
    bad.write_text("two three\na 1 2 3\n", encoding="utf-8")
    with pytest.raises(MalformedHeader):
        load_embeddings(bad, vocabulary)


def test_load_embeddings_missing_words_are_seeded(tmp_path):
    """Test that words absent from the file get reproducible random unit vectors."""
    _, vocabulary = build_corpus(["a b c"], min_count=1)
    path = tmp_path / "vectors.txt"
    path.write_text("2 3\na 1 0 0\nzzz 0 1 0\n", encoding="utf-8")

    first = load_embeddings(path, vocabulary, seed=4)
    second = load_embeddings(path, vocabulary, seed=4)
    np.testing.assert_array_equal(first.vectors, second.vectors)
    np.testing.assert_allclose(np.linalg.norm(first.vectors, axis=1), 1.0)
    np.testing.assert_allclose(first.vector("a"), [1.0, 0.0, 0.0])


def test_save_then_load_keeps_six_decimals(tmp_path, topic_embeddings, topic_corpus):
    """Test that exported vectors reload within the exported precision."""
    path = tmp_path / "embeddings.txt"
    save_embeddings(path, topic_embeddings)
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == "10 6"

    reloaded = load_embeddings(path, topic_corpus.vocabulary)
    np.testing.assert_allclose(reloaded.vectors, topic_embeddings.vectors, atol=1e-5)


def test_nearest_words_self_and_exhaustion(topic_embeddings):
    """Test that a word is its own nearest neighbor and k >= V returns everything."""
    assert nearest_words(topic_embeddings, topic_embeddings.vector("judge"), k=1) == ["judge"]
    everything = nearest_words(topic_embeddings, topic_embeddings.vector("judge"), k=50)
    assert sorted(everything) == sorted(topic_embeddings.words)
    assert nearest_words(topic_embeddings, topic_embeddings.vector("judge"), k=0) == []


def test_nearest_words_matches_brute_force(topic_embeddings, rng):
    """Test a random query against an exhaustive sort."""
    query = normalize_rows(rng.normal(size=(1, 6)))[0]
    scores = topic_embeddings.vectors @ query
    expected = [topic_embeddings.words[i] for i in np.argsort(-scores)]
    assert nearest_words(topic_embeddings, query, k=10) == expected


def test_nearest_words_exclude(topic_embeddings):
    """Test that excluded words are skipped."""
    result = nearest_words(topic_embeddings, topic_embeddings.vector("ball"), k=3,
                           exclude={"ball"})
    assert "ball" not in result
    assert len(result) == 3
    assert set(result) <= set(TOPIC_A)


def test_normalize_rows_keeps_zero_rows():
    """Test that zero rows pass through unchanged."""
    result = normalize_rows(np.array([[0.0, 0.0], [3.0, 4.0]]))
    np.testing.assert_allclose(result, [[0.0, 0.0], [0.6, 0.8]])


def test_embedding_matrix_lookup():
    """Test word lookup on a hand-built matrix."""
    matrix = EmbeddingMatrix(words=("x", "y"), vectors=np.eye(2))
    assert matrix.dim == 2
    np.testing.assert_array_equal(matrix.vector("y"), [0.0, 1.0])
