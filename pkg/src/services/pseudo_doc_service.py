"""Pseudo-document generation from class vMF distributions.

Each pseudo document draws one document vector ``d`` from its class
distribution, then ``dl`` i.i.d. tokens from the mixture

    p(w | d) = alpha * p_B(w) + (1 - alpha) * softmax_{V_d}(d^T v_w)

where ``V_d`` holds the ``gamma`` words closest to ``d`` (zero mass outside).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from src.core.config import GeneratorConfig
from src.services.alias_sampler import AliasSampler
from src.services.corpus import BackgroundDistribution, Corpus
from src.services.embedding_service import EmbeddingMatrix, rank_by_score
from src.services import vmf

logger = logging.getLogger(__name__)

MIN_DOC_LENGTH = 10
MAX_DOC_LENGTH = 500


@dataclass(frozen=True)
class PseudoDocument:
    """Generated bag of tokens with its soft pseudo-label."""

    tokens: np.ndarray
    class_of_origin: int
    pseudo_label: np.ndarray

    def __len__(self) -> int:
        return int(self.tokens.shape[0])


def pseudo_label(j: int, alpha: float, m: int) -> np.ndarray:
    """Soft label: ``(1 - alpha) + alpha / m`` at ``j``, ``alpha / m`` elsewhere."""
    label = np.full(m, alpha / m, dtype=np.float64)
    label[j] = (1.0 - alpha) + alpha / m
    return label


def _class_component(
    doc_vector: np.ndarray, embeddings: EmbeddingMatrix, gamma: int
) -> Tuple[np.ndarray, np.ndarray]:
    scores = embeddings.vectors @ doc_vector
    top = rank_by_score(scores, embeddings.words)[:gamma]
    logits = scores[top]
    weights = np.exp(logits - logits.max())
    return top, weights / weights.sum()


def word_distribution(
    doc_vector: np.ndarray,
    embeddings: EmbeddingMatrix,
    background: BackgroundDistribution,
    alpha: float,
    gamma: int,
) -> np.ndarray:
    """Full vocabulary distribution of a pseudo document.

    Args:
        doc_vector: Unit document vector.
        embeddings: Unit word embeddings.
        background: Corpus unigram distribution.
        alpha: Background weight.
        gamma: Size of the class-specific vocabulary ``V_d``.

    Returns:
        Probability vector over the vocabulary.
    """
    top, softmax = _class_component(doc_vector, embeddings, gamma)
    probs = alpha * background.probs
    probs[top] += (1.0 - alpha) * softmax
    return probs


def resolve_doc_length(config: GeneratorConfig, corpus: Corpus) -> int:
    """Configured ``dl``, else the rounded mean corpus length clamped to [10, 500]."""
    if config.doc_length is not None:
        return config.doc_length
    return int(np.clip(round(corpus.mean_length()), MIN_DOC_LENGTH, MAX_DOC_LENGTH))


class PseudoDocumentGenerator:
    """Generates pseudo documents for every class of a run."""

    def __init__(
        self,
        config: GeneratorConfig,
        embeddings: EmbeddingMatrix,
        background: BackgroundDistribution,
        doc_length: int,
    ):
        """Initialize the generator.

        Args:
            config: alpha, beta and gamma.
            embeddings: Unit word embeddings.
            background: Corpus unigram distribution.
            doc_length: Tokens per pseudo document.
        """
        self.config = config
        self.embeddings = embeddings
        self.background = background
        self.doc_length = doc_length
        self.gamma = min(config.gamma, len(embeddings))
        self._background_sampler = AliasSampler(background.probs)

    def generate_document(
        self,
        class_dist: vmf.VmfDistribution,
        class_index: int,
        n_classes: int,
        rng: np.random.Generator,
    ) -> PseudoDocument:
        """Generate one pseudo document of a class.

        Tokens are drawn by first picking the mixture component (background
        with probability alpha) and then a word from that component, which is
        the same categorical as the full mixture.

        Args:
            class_dist: Fitted class distribution.
            class_index: Class the document is generated for.
            n_classes: Number of classes ``m``.
            rng: Random generator.

        Returns:
            A pseudo document with ``doc_length`` tokens.
        """
        alpha = self.config.alpha
        doc_vector = vmf.sample(class_dist, 1, rng)[0]
        top, softmax = _class_component(doc_vector, self.embeddings, self.gamma)

        from_background = rng.uniform(size=self.doc_length) < alpha
        n_background = int(from_background.sum())
        tokens = np.empty(self.doc_length, dtype=np.int64)
        tokens[from_background] = self._background_sampler.draw(n_background, rng)
        tokens[~from_background] = top[
            AliasSampler(softmax).draw(self.doc_length - n_background, rng)
        ]
        return PseudoDocument(
            tokens=tokens,
            class_of_origin=class_index,
            pseudo_label=pseudo_label(class_index, alpha, n_classes),
        )

    def _generate_class(
        self,
        class_dist: vmf.VmfDistribution,
        class_index: int,
        n_classes: int,
        seed_sequence: np.random.SeedSequence,
    ) -> List[PseudoDocument]:
        rng = np.random.default_rng(seed_sequence)
        return [
            self.generate_document(class_dist, class_index, n_classes, rng)
            for _ in range(self.config.beta)
        ]

    def generate_all(
        self,
        class_dists: Sequence[vmf.VmfDistribution],
        seed: int,
        workers: int = 1,
    ) -> List[PseudoDocument]:
        """Generate ``beta`` documents per class, class-major.

        Every class draws from its own stream split off ``seed``, so the output
        does not depend on ``workers``.

        Args:
            class_dists: One distribution per class, ``m >= 2``.
            seed: Master seed of the generation stage.
            workers: Threads generating classes concurrently.

        Returns:
            ``m * beta`` pseudo documents.
        """
        m = len(class_dists)
        streams = np.random.SeedSequence(seed).spawn(m)
        jobs = [(dist, j, m, streams[j]) for j, dist in enumerate(class_dists)]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                per_class = list(pool.map(lambda job: self._generate_class(*job), jobs))
        else:
            per_class = [self._generate_class(*job) for job in jobs]
        documents = [doc for docs in per_class for doc in docs]
        logger.info(
            f"Generated {len(documents)} pseudo documents "
            f"(beta={self.config.beta}, dl={self.doc_length}, gamma={self.gamma})"
        )
        return documents


def generate_all(
    class_dists: Sequence[vmf.VmfDistribution],
    config: GeneratorConfig,
    embeddings: EmbeddingMatrix,
    background: BackgroundDistribution,
    doc_length: int,
    seed: int,
    workers: int = 1,
) -> List[PseudoDocument]:
    """Convenience wrapper building a generator and producing all documents."""
    generator = PseudoDocumentGenerator(config, embeddings, background, doc_length)
    return generator.generate_all(class_dists, seed=seed, workers=workers)
