"""Shared fixtures: a two-topic toy vocabulary with hand-built embeddings."""

import numpy as np
import pytest

from src.services.corpus import build_corpus
from src.services.embedding_service import EmbeddingMatrix, normalize_rows

TOPIC_A = ["ball", "goal", "match", "score", "team"]
TOPIC_B = ["court", "judge", "law", "trial", "vote"]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def topic_embeddings():
    """Ten words in two tight clusters around orthogonal axes of R^6."""
    rng = np.random.default_rng(0)
    words = tuple(sorted(TOPIC_A + TOPIC_B))
    vectors = np.zeros((len(words), 6))
    for i, word in enumerate(words):
        axis = 0 if word in TOPIC_A else 1
        vectors[i, axis] = 1.0
        vectors[i, 2:] = 0.15 * rng.normal(size=4)
    return EmbeddingMatrix(words=words, vectors=normalize_rows(vectors))


@pytest.fixture
def topic_corpus():
    """Labeled corpus over the two topics; every word appears often enough."""
    rng = np.random.default_rng(5)
    lines = []
    for i in range(40):
        label = i % 2
        topic = TOPIC_A if label == 0 else TOPIC_B
        words = rng.choice(topic, size=8).tolist()
        lines.append((" ".join(words), label))
    corpus, _ = build_corpus(lines, min_count=1)
    return corpus
