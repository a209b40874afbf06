"""Neural classifier wrapper: batching, SGD training, prediction and checkpoints."""

import copy
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from src.classifiers.bag_of_embeddings import BagOfEmbeddingsModel
from src.classifiers.losses import kl_divergence_from_log_probs
from src.classifiers.word_cnn import WordCnnModel
from src.core.config import ClassifierConfig, TrainConfig
from src.core.exceptions import CheckpointMismatch, EmptyDocument
from src.services.embedding_service import EmbeddingMatrix

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1
PREDICT_CHUNK_SIZE = 512

Example = Tuple[np.ndarray, np.ndarray]


class NeuralClassifier:
    """Probabilistic classifier ``f(D) -> y`` over word-index documents.

    Wraps a torch module producing logits; all arithmetic is float64 on CPU.
    Documents are 1-D arrays of vocabulary indices.
    """

    def __init__(
        self,
        model: nn.Module,
        config: ClassifierConfig,
        n_classes: int,
        vocabulary_fingerprint: str = "",
    ):
        self.model = model.double()
        self.config = config
        self.n_classes = n_classes
        self.vocabulary_fingerprint = vocabulary_fingerprint
        self._optimizer: Optional[torch.optim.Optimizer] = None
        self._optimizer_key: Optional[Tuple[float, float]] = None

    @property
    def pad_index(self) -> int:
        return self.model.pad_index

    def trainable_parameters(self) -> List[nn.Parameter]:
        return [p for p in self.model.parameters() if p.requires_grad]

    def _pad(self, documents: Sequence[np.ndarray]) -> Tuple[torch.Tensor, torch.Tensor]:
        for doc in documents:
            if len(doc) == 0:
                raise EmptyDocument("Cannot classify an empty document")
        lengths = [len(doc) for doc in documents]
        width = max(max(lengths), self.model.min_length)
        tokens = np.full((len(documents), width), self.pad_index, dtype=np.int64)
        for row, doc in enumerate(documents):
            tokens[row, : len(doc)] = doc
        return torch.from_numpy(tokens), torch.tensor(lengths, dtype=torch.int64)

    def logits(self, documents: Sequence[np.ndarray]) -> torch.Tensor:
        tokens, lengths = self._pad(documents)
        return self.model(tokens, lengths)

    def predict_proba(self, tokens: np.ndarray) -> np.ndarray:
        """Class probabilities of a single document.

        Raises:
            EmptyDocument: If ``tokens`` is empty.
        """
        return self.predict_batch([tokens])[0]

    def _predict_chunk(self, documents: Sequence[np.ndarray]) -> np.ndarray:
        with torch.no_grad():
            return F.softmax(self.logits(documents), dim=1).numpy()

    def predict_batch(self, documents: Sequence[np.ndarray], workers: int = 1) -> np.ndarray:
        """Class probabilities for many documents.

        Documents are split into fixed chunks, so results do not depend on
        ``workers``.

        Args:
            documents: Word-index documents, none empty.
            workers: Threads scoring chunks concurrently.

        Returns:
            ``n x m`` row-stochastic matrix.
        """
        if not documents:
            return np.zeros((0, self.n_classes), dtype=np.float64)
        self.model.eval()
        chunks = [
            documents[start : start + PREDICT_CHUNK_SIZE]
            for start in range(0, len(documents), PREDICT_CHUNK_SIZE)
        ]
        if workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(self._predict_chunk, chunks))
        else:
            parts = [self._predict_chunk(chunk) for chunk in chunks]
        return np.vstack(parts)

    def _get_optimizer(self, config: TrainConfig) -> torch.optim.Optimizer:
        key = (config.learning_rate, config.momentum)
        if self._optimizer is None or self._optimizer_key != key:
            self._optimizer = torch.optim.SGD(
                self.trainable_parameters(), lr=config.learning_rate, momentum=config.momentum
            )
            self._optimizer_key = key
        return self._optimizer

    def batch_loss(self, documents: Sequence[np.ndarray], targets: np.ndarray) -> torch.Tensor:
        """Mean per-example KL divergence of the model's predictions from ``targets``."""
        log_probs = F.log_softmax(self.logits(documents), dim=1)
        target_tensor = torch.as_tensor(np.asarray(targets, dtype=np.float64))
        return kl_divergence_from_log_probs(target_tensor, log_probs) / len(documents)

    def _step(self, batch: Sequence[Example], optimizer: torch.optim.Optimizer) -> float:
        documents = [doc for doc, _ in batch]
        targets = np.vstack([target for _, target in batch])
        optimizer.zero_grad()
        loss = self.batch_loss(documents, targets)
        loss.backward()
        optimizer.step()
        return float(loss.detach()) * len(batch)

    def train_epoch(
        self, examples: Sequence[Example], config: TrainConfig, rng: np.random.Generator
    ) -> float:
        """One pass of mini-batch SGD over ``examples`` in a seeded order.

        Args:
            examples: ``(tokens, target)`` pairs.
            config: Learning rate, momentum and batch size.
            rng: Generator deciding the example order.

        Returns:
            Mean per-example KL loss over the epoch.
        """
        self.model.train()
        optimizer = self._get_optimizer(config)
        order = rng.permutation(len(examples))
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = [examples[i] for i in order[start : start + config.batch_size]]
            total += self._step(batch, optimizer)
        return total / max(len(examples), 1)

    def train_batches(
        self,
        examples: Sequence[Example],
        config: TrainConfig,
        n_batches: int,
        rng: np.random.Generator,
    ) -> float:
        """Run exactly ``n_batches`` SGD steps, reshuffling after each full pass.

        Returns:
            Mean per-example loss over the steps.
        """
        self.model.train()
        optimizer = self._get_optimizer(config)
        total, seen = 0.0, 0
        order = rng.permutation(len(examples))
        cursor = 0
        for _ in range(n_batches):
            if cursor >= len(order):
                order = rng.permutation(len(examples))
                cursor = 0
            batch = [examples[i] for i in order[cursor : cursor + config.batch_size]]
            cursor += config.batch_size
            total += self._step(batch, optimizer)
            seen += len(batch)
        return total / max(seen, 1)

    def fit(
        self,
        examples: Sequence[Example],
        config: TrainConfig,
        rng: np.random.Generator,
        epochs: Optional[int] = None,
    ) -> List[float]:
        """Train for ``epochs`` (default ``config.epochs``) and return per-epoch losses."""
        losses = []
        for epoch in range(epochs if epochs is not None else config.epochs):
            loss = self.train_epoch(examples, config, rng)
            logger.info(f"Epoch {epoch + 1}: mean KL loss {loss:.6f}")
            losses.append(loss)
        return losses

    def snapshot(self) -> Dict[str, torch.Tensor]:
        """Deep copy of the current parameters."""
        return copy.deepcopy(self.model.state_dict())

    def reset_optimizer(self) -> None:
        """Drop the optimizer so momentum restarts from zero."""
        self._optimizer = None
        self._optimizer_key = None

    def restore(self, state: Dict[str, torch.Tensor]) -> None:
        self.model.load_state_dict(state)
        self.reset_optimizer()

    def save(self, path: Union[str, Path], metadata: Optional[Dict[str, Any]] = None) -> None:
        """Write a checkpoint with parameters, architecture and vocabulary fingerprint."""
        payload = {
            "format_version": CHECKPOINT_FORMAT_VERSION,
            "kind": self.config.kind,
            "config": self.config.model_dump(mode="json"),
            "n_classes": self.n_classes,
            "vocabulary_fingerprint": self.vocabulary_fingerprint,
            "metadata": metadata or {},
            "state_dict": self.model.state_dict(),
        }
        torch.save(payload, path)
        logger.info(f"Saved {self.config.kind} checkpoint to {path}")

    def load(self, path: Union[str, Path], vocabulary_fingerprint: Optional[str] = None) -> Dict:
        """Load parameters from a checkpoint written by ``save``.

        Args:
            path: Checkpoint file.
            vocabulary_fingerprint: Expected fingerprint; ``None`` skips the check.

        Returns:
            The checkpoint's metadata.

        Raises:
            CheckpointMismatch: On version, architecture or vocabulary mismatch.
        """
        payload = torch.load(path, map_location="cpu", weights_only=False)
        if payload.get("format_version") != CHECKPOINT_FORMAT_VERSION:
            raise CheckpointMismatch(f"{path}: unsupported checkpoint format")
        if payload.get("kind") != self.config.kind or payload.get("n_classes") != self.n_classes:
            raise CheckpointMismatch(
                f"{path}: checkpoint is a {payload.get('kind')} with "
                f"{payload.get('n_classes')} classes, expected {self.config.kind} "
                f"with {self.n_classes}"
            )
        if (
            vocabulary_fingerprint is not None
            and payload.get("vocabulary_fingerprint") != vocabulary_fingerprint
        ):
            raise CheckpointMismatch(f"{path}: checkpoint was trained on a different vocabulary")
        try:
            self.model.load_state_dict(payload["state_dict"])
        except RuntimeError as e:
            raise CheckpointMismatch(f"{path}: {e}")
        self.reset_optimizer()
        return payload.get("metadata", {})


def checkpoint_info(path: Union[str, Path]) -> Dict[str, Any]:
    """Checkpoint header (kind, classes, fingerprint, metadata) without the parameters."""
    payload = torch.load(path, map_location="cpu", weights_only=False)
    return {key: value for key, value in payload.items() if key != "state_dict"}


def build_classifier(
    config: ClassifierConfig,
    embeddings: EmbeddingMatrix,
    n_classes: int,
    seed: int = 0,
    fine_tune_embeddings: bool = False,
    vocabulary_fingerprint: str = "",
) -> NeuralClassifier:
    """Build a classifier whose embedding layer is initialized from ``embeddings``.

    Row ``i`` of the embedding table is the vector of ``embeddings.words[i]``;
    the extra last row is the zero padding vector.
    """
    generator = torch.Generator().manual_seed(seed)
    vocab_size, dim = embeddings.vectors.shape
    if config.kind == "word_cnn":
        model: nn.Module = WordCnnModel(
            vocab_size,
            dim,
            n_classes,
            window_sizes=config.window_sizes,
            filters=config.filters,
            fine_tune_embeddings=fine_tune_embeddings,
            generator=generator,
        )
    else:
        model = BagOfEmbeddingsModel(
            vocab_size,
            dim,
            n_classes,
            fine_tune_embeddings=fine_tune_embeddings,
            generator=generator,
        )
    model = model.double()
    with torch.no_grad():
        table = np.vstack([embeddings.vectors, np.zeros((1, dim))])
        model.embedding.weight.copy_(torch.from_numpy(table))
    logger.info(f"Built {config.kind} classifier: V={vocab_size}, p={dim}, m={n_classes}")
    return NeuralClassifier(model, config, n_classes, vocabulary_fingerprint)
