"""Word embeddings on the unit sphere: Skip-Gram training, word2vec I/O, neighbors."""

import logging
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
from gensim.models import Word2Vec

from src.core.config import SkipGramConfig
from src.core.exceptions import DimensionMismatch, MalformedHeader, VocabularyTooSmall
from src.services.corpus import Corpus, Vocabulary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Unit-norm word vectors aligned with a vocabulary.

    Row ``i`` belongs to ``words[i]``; every row has Euclidean norm 1.
    """

    words: tuple
    vectors: np.ndarray
    index_of: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "index_of", {w: i for i, w in enumerate(self.words)})

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return len(self.words)

    def vector(self, word: str) -> np.ndarray:
        """Return the unit vector of a word."""
        return self.vectors[self.index_of[word]]


def normalize_rows(vectors: np.ndarray) -> np.ndarray:
    """Project every row onto the unit sphere."""
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return vectors / norms


def _stable_hash(text: str) -> int:
    # passed as gensim's hashfxn; the builtin str hash is salted per process
    return zlib.crc32(text.encode("utf-8"))


def train_skipgram(
    corpus: Corpus, config: SkipGramConfig, seed: int = 0, workers: int = 1
) -> EmbeddingMatrix:
    """Train Skip-Gram embeddings with negative sampling on the corpus.

    Negatives come from the unigram^(3/4) table and frequent words are
    subsampled. With ``workers=1`` the result is bit-reproducible for a seed.

    Args:
        corpus: Tokenized corpus.
        config: Skip-Gram hyperparameters; ``config.rng_seed`` overrides ``seed``.
        seed: Seed used when the config does not pin one.
        workers: Training threads. Only one thread is reproducible.

    Returns:
        Unit-normalized embeddings in vocabulary order.

    Raises:
        VocabularyTooSmall: If the vocabulary has fewer than two words.
    """
    vocabulary = corpus.vocabulary
    if len(vocabulary) < 2:
        raise VocabularyTooSmall(f"Skip-Gram needs at least 2 words, got {len(vocabulary)}")

    rng_seed = config.rng_seed if config.rng_seed is not None else seed
    sentences = [[vocabulary.words[i] for i in doc.tokens] for doc in corpus.documents]
    logger.info(
        f"Training Skip-Gram: dim={config.dim}, window={config.window}, "
        f"negatives={config.negatives}, epochs={config.epochs}, workers={workers}"
    )
    model = Word2Vec(
        sentences=sentences,
        vector_size=config.dim,
        window=config.window,
        min_count=1,
        sg=1,
        hs=0,
        negative=config.negatives,
        ns_exponent=0.75,
        sample=config.subsample_threshold,
        alpha=config.learning_rate,
        min_alpha=config.learning_rate * 1e-4,
        epochs=config.epochs,
        seed=rng_seed,
        workers=workers,
        hashfxn=_stable_hash,
    )
    vectors = np.vstack([model.wv[word] for word in vocabulary.words]).astype(np.float64)
    return EmbeddingMatrix(words=vocabulary.words, vectors=normalize_rows(vectors))


def load_embeddings(
    path: Union[str, Path], vocabulary: Vocabulary, seed: int = 0
) -> EmbeddingMatrix:
    """Load word2vec text-format vectors for the vocabulary.

    Words absent from the file receive seeded uniform(-0.5/p, 0.5/p) vectors
    before normalization; words absent from the vocabulary are ignored.

    Args:
        path: word2vec text file (header ``"V p"``).
        vocabulary: Corpus vocabulary to align with.
        seed: Seed for the missing-word initialization.

    Returns:
        Unit-normalized embeddings in vocabulary order.

    Raises:
        MalformedHeader: If the header is not two positive integers.
        DimensionMismatch: If a row does not have ``p`` values.
    """
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2 or not all(part.isdigit() for part in header):
            raise MalformedHeader(f"{path}: expected header 'V p', got {' '.join(header)!r}")
        dim = int(header[1])
        if dim < 1:
            raise MalformedHeader(f"{path}: dimensionality must be positive")

        found = {}
        for line_no, line in enumerate(f, start=2):
            parts = line.rstrip("\n").split(" ")
            if not parts or parts == [""]:
                continue
            word, values = parts[0], [v for v in parts[1:] if v]
            if len(values) != dim:
                raise DimensionMismatch(
                    f"{path}:{line_no}: expected {dim} values for '{word}', got {len(values)}"
                )
            if word in vocabulary:
                found[word] = np.array(values, dtype=np.float64)

    rng = np.random.default_rng(seed)
    vectors = np.empty((len(vocabulary), dim), dtype=np.float64)
    missing: List[str] = []
    for i, word in enumerate(vocabulary.words):
        if word in found:
            vectors[i] = found[word]
        else:
            missing.append(word)
            vectors[i] = rng.uniform(-0.5 / dim, 0.5 / dim, size=dim)
    if missing:
        logger.warning(
            f"{len(missing)} vocabulary words missing from {path}; assigned random vectors"
        )
    logger.info(f"Loaded {len(found)} vectors of dimension {dim} from {path}")
    return EmbeddingMatrix(words=vocabulary.words, vectors=normalize_rows(vectors))


def save_embeddings(path: Union[str, Path], embeddings: EmbeddingMatrix) -> None:
    """Write embeddings in word2vec text format with 6 decimal places."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{len(embeddings)} {embeddings.dim}\n")
        for word, row in zip(embeddings.words, embeddings.vectors):
            f.write(word + " " + " ".join(f"{value:.6f}" for value in row) + "\n")


def rank_by_score(scores: np.ndarray, words: Sequence[str]) -> np.ndarray:
    """Order indices by descending score, ties broken lexicographically."""
    return np.lexsort((np.asarray(words), -scores))


def nearest_words(
    embeddings: EmbeddingMatrix,
    query: np.ndarray,
    k: int,
    exclude: Optional[Iterable[str]] = None,
) -> List[str]:
    """Return the ``k`` words most similar to a unit query vector.

    Dot product equals cosine similarity on the sphere.

    Args:
        embeddings: Unit-norm embeddings.
        query: Unit query vector.
        k: Number of words to return.
        exclude: Words to skip.

    Returns:
        Up to ``k`` words ordered by similarity.
    """
    if k <= 0:
        return []
    excluded = set(exclude or ())
    scores = embeddings.vectors @ query
    result: List[str] = []
    for i in rank_by_score(scores, embeddings.words):
        word = embeddings.words[i]
        if word in excluded:
            continue
        result.append(word)
        if len(result) >= k:
            break
    return result
