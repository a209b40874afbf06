"""Tests for the alias sampler and the pseudo-document generator."""

import numpy as np
import pytest
from scipy import stats

from src.core.config import GeneratorConfig
from src.services import vmf
from src.services.alias_sampler import AliasSampler
from src.services.corpus import BackgroundDistribution, build_corpus
from src.services.embedding_service import EmbeddingMatrix, normalize_rows
from src.services.pseudo_doc_service import (
    PseudoDocumentGenerator,
    generate_all,
    pseudo_label,
    resolve_doc_length,
    word_distribution,
)


def _uniform_background(size):
    return BackgroundDistribution(probs=np.full(size, 1.0 / size))


def test_alias_sampler_frequencies(rng):
    """Test empirical frequencies against the target distribution."""
    probs = np.array([0.1, 0.2, 0.3, 0.4, 0.0])
    draws = AliasSampler(probs).draw(200_000, rng)
    freqs = np.bincount(draws, minlength=5) / draws.shape[0]
    np.testing.assert_allclose(freqs, probs, atol=0.01)
    assert freqs[4] == 0.0


def test_alias_sampler_unnormalized_weights(rng):
    """Test that weights need not sum to one."""
    draws = AliasSampler(np.array([3.0, 1.0])).draw(50_000, rng)
    assert np.mean(draws == 0) == pytest.approx(0.75, abs=0.01)


def test_pseudo_label_examples():
    """Test the soft label at the boundaries and the default alpha."""
    np.testing.assert_allclose(pseudo_label(1, 0.2, 4), [0.05, 0.85, 0.05, 0.05])
    np.testing.assert_array_equal(pseudo_label(2, 0.0, 3), [0.0, 0.0, 1.0])
    np.testing.assert_allclose(pseudo_label(0, 1.0, 4), [0.25] * 4)
    assert pseudo_label(3, 0.37, 5).sum() == pytest.approx(1.0)


def test_word_distribution_full_background(topic_embeddings):
    """Test that alpha=1 collapses to the background distribution."""
    background = BackgroundDistribution(probs=np.linspace(1, 10, 10) / 55.0)
    probs = word_distribution(topic_embeddings.vector("ball"), topic_embeddings, background,
                              alpha=1.0, gamma=3)
    np.testing.assert_array_equal(probs, background.probs)


def test_word_distribution_normalized(topic_embeddings, rng):
    """Test normalization for random document vectors."""
    background = _uniform_background(10)
    for _ in range(20):
        d = normalize_rows(rng.normal(size=(1, 6)))[0]
        probs = word_distribution(d, topic_embeddings, background, alpha=0.2, gamma=4)
        assert abs(probs.sum() - 1.0) <= 1e-9


def test_word_distribution_hand_oracle():
    """Test a five-word vocabulary with gamma=2 against a hand computation."""
    angles = np.array([0.0, 0.3, 1.2, 2.0, 3.0])
    embeddings = EmbeddingMatrix(
        words=("a", "b", "c", "d", "e"),
        vectors=np.column_stack([np.cos(angles), np.sin(angles)]),
    )
    background = BackgroundDistribution(probs=np.array([0.4, 0.3, 0.1, 0.1, 0.1]))
    d = np.array([1.0, 0.0])
    alpha = 0.25

    # the two closest words are a (cos 0) and b (cos 0.3)
    za, zb = np.exp(1.0), np.exp(np.cos(0.3))
    expected = alpha * background.probs.copy()
    expected[0] += (1 - alpha) * za / (za + zb)
    expected[1] += (1 - alpha) * zb / (za + zb)

    probs = word_distribution(d, embeddings, background, alpha=alpha, gamma=2)
    np.testing.assert_allclose(probs, expected, rtol=1e-12)
    assert probs[2] == pytest.approx(alpha * 0.1)


def test_generate_document_concentrated(topic_embeddings, rng):
    """Test that a near-point class with gamma=1 emits its nearest word."""
    config = GeneratorConfig(alpha=1e-6, beta=1, gamma=1)
    generator = PseudoDocumentGenerator(config, topic_embeddings, _uniform_background(10),
                                        doc_length=200)
    dist = vmf.VmfDistribution(mu=topic_embeddings.vector("ball"), kappa=vmf.KAPPA_MAX)
    doc = generator.generate_document(dist, class_index=0, n_classes=2, rng=rng)

    assert len(doc) == 200
    share = np.mean(doc.tokens == topic_embeddings.index_of["ball"])
    assert share >= 1.0 - 10 * config.alpha - 0.01
    np.testing.assert_allclose(doc.pseudo_label, pseudo_label(0, config.alpha, 2))


def test_generate_document_matches_word_distribution(topic_embeddings, monkeypatch):
    """Test token counts of a fixed document vector against the mixture distribution."""
    monkeypatch.setattr(vmf, "sample", lambda dist, n, rng: dist.mu[None, :])
    background = BackgroundDistribution(probs=np.linspace(1, 10, 10) / 55.0)
    config = GeneratorConfig(alpha=0.2, beta=1, gamma=4)
    n = 20_000
    generator = PseudoDocumentGenerator(config, topic_embeddings, background, doc_length=n)
    mu = topic_embeddings.vector("ball")
    doc = generator.generate_document(vmf.VmfDistribution(mu=mu, kappa=10.0), 0, 2,
                                      np.random.default_rng(3))

    counts = np.bincount(doc.tokens, minlength=10)
    expected = word_distribution(mu, topic_embeddings, background, alpha=0.2, gamma=4) * n
    assert stats.chisquare(counts, expected).pvalue > 1e-3


def test_generate_document_same_seed_same_tokens(topic_embeddings):
    """Test that equal seeds reproduce a document and a new seed changes it."""
    generator = PseudoDocumentGenerator(GeneratorConfig(gamma=4), topic_embeddings,
                                        _uniform_background(10), doc_length=40)
    dist = vmf.VmfDistribution(mu=topic_embeddings.vector("law"), kappa=20.0)
    first = generator.generate_document(dist, 1, 2, np.random.default_rng(21))
    again = generator.generate_document(dist, 1, 2, np.random.default_rng(21))
    other = generator.generate_document(dist, 1, 2, np.random.default_rng(22))

    np.testing.assert_array_equal(first.tokens, again.tokens)
    assert not np.array_equal(first.tokens, other.tokens)


def _class_dists(embeddings, words, kappa=20.0):
    return [vmf.VmfDistribution(mu=embeddings.vector(w), kappa=kappa) for w in words]


def test_generate_all_counts(topic_embeddings):
    """Test m*beta documents in class-major order."""
    background = _uniform_background(10)
    config = GeneratorConfig(beta=500, gamma=3)
    docs = generate_all(_class_dists(topic_embeddings, ["ball", "law", "goal", "vote"]), config,
                        topic_embeddings, background, doc_length=12, seed=1)
    assert len(docs) == 2000
    assert [d.class_of_origin for d in docs[:500]] == [0] * 500
    assert docs[-1].class_of_origin == 3

    minimal = generate_all(_class_dists(topic_embeddings, ["ball", "law"]),
                           GeneratorConfig(beta=1, gamma=3), topic_embeddings, background,
                           doc_length=5, seed=1)
    assert len(minimal) == 2


def test_generate_all_independent_of_workers(topic_embeddings):
    """Test that per-class streams make threaded generation identical."""
    config = GeneratorConfig(beta=20, gamma=4)
    args = (_class_dists(topic_embeddings, ["ball", "law", "team"]), config, topic_embeddings,
            _uniform_background(10))
    serial = generate_all(*args, doc_length=15, seed=9, workers=1)
    threaded = generate_all(*args, doc_length=15, seed=9, workers=3)
    for a, b in zip(serial, threaded):
        np.testing.assert_array_equal(a.tokens, b.tokens)


def test_generate_all_topical(topic_embeddings):
    """Test that documents of a topic class mostly use that topic's words."""
    config = GeneratorConfig(alpha=0.1, beta=50, gamma=5)
    docs = generate_all(_class_dists(topic_embeddings, ["ball", "law"], kappa=100.0), config,
                        topic_embeddings, _uniform_background(10), doc_length=20, seed=3)
    topic_a = {topic_embeddings.index_of[w] for w in ("ball", "goal", "match", "score", "team")}
    first_class = np.concatenate([d.tokens for d in docs[:50]])
    assert np.mean([t in topic_a for t in first_class]) > 0.8


def test_gamma_capped_at_vocabulary(topic_embeddings):
    """Test that gamma larger than V uses the whole vocabulary."""
    generator = PseudoDocumentGenerator(GeneratorConfig(gamma=50), topic_embeddings,
                                        _uniform_background(10), doc_length=10)
    assert generator.gamma == 10


def test_resolve_doc_length():
    """Test the configured length and the clamped corpus mean."""
    corpus, _ = build_corpus(["a b c", "a b"], min_count=1)
    assert resolve_doc_length(GeneratorConfig(doc_length=33), corpus) == 33
    assert resolve_doc_length(GeneratorConfig(), corpus) == 10

    long_corpus, _ = build_corpus([" ".join(["w"] * 700)], min_count=1)
    assert resolve_doc_length(GeneratorConfig(), long_corpus) == 500
