"""Pre-training on pseudo documents and iterative self-training on the real corpus."""

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.classifiers.base import Example, NeuralClassifier
from src.core.config import SelfTrainConfig, TrainConfig
from src.core.exceptions import DegenerateFrequency, LengthMismatch
from src.services.corpus import Corpus
from src.services.evaluation import evaluate_labels
from src.services.pseudo_doc_service import PseudoDocument

logger = logging.getLogger(__name__)

MIN_FREQUENCY = 1e-12


@dataclass(frozen=True)
class SelfTrainCheckpoint:
    """One target recomputation of the self-training loop."""

    iteration: int
    change_fraction: float
    mean_kl: float
    macro_f1: Optional[float] = None
    micro_f1: Optional[float] = None


@dataclass
class SelfTrainReport:
    """All checkpoints of a self-training run, in order."""

    checkpoints: List[SelfTrainCheckpoint] = field(default_factory=list)
    converged: bool = False

    def to_jsonl(self) -> str:
        return "".join(json.dumps(asdict(c), sort_keys=True) + "\n" for c in self.checkpoints)

    def write(self, path: Union[str, Path]) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_jsonl())

    @classmethod
    def read(cls, path: Union[str, Path]) -> "SelfTrainReport":
        with open(path, "r", encoding="utf-8") as f:
            rows = [json.loads(line) for line in f if line.strip()]
        rows = [row for row in rows if "_meta" not in row]
        return cls(checkpoints=[SelfTrainCheckpoint(**row) for row in rows])


def one_hot(j: int, m: int) -> np.ndarray:
    target = np.zeros(m, dtype=np.float64)
    target[j] = 1.0
    return target


def labeled_examples(
    labeled_docs: Optional[Sequence[Sequence[int]]], corpus: Corpus
) -> List[Example]:
    """One-hot training examples for labeled documents, class-major."""
    if not labeled_docs:
        return []
    m = len(labeled_docs)
    examples = []
    for j, doc_ids in enumerate(labeled_docs):
        for doc_id in doc_ids:
            doc = corpus.get(doc_id)
            if doc is not None:
                examples.append((doc.tokens, one_hot(j, m)))
    return examples


def pretrain(
    classifier: NeuralClassifier,
    pseudo_docs: Sequence[PseudoDocument],
    config: TrainConfig,
    epochs: int,
    rng: np.random.Generator,
    labeled_docs: Optional[Sequence[Sequence[int]]] = None,
    corpus: Optional[Corpus] = None,
) -> List[float]:
    """Train on pseudo documents plus any labeled documents, shuffled together.

    Args:
        classifier: Freshly built classifier.
        pseudo_docs: Generated documents with soft pseudo-labels.
        config: SGD settings.
        epochs: Pre-training epochs.
        rng: Generator for the per-epoch shuffles.
        labeled_docs: Document ids per class when supervision is labeled documents.
        corpus: Corpus the labeled ids refer to.

    Returns:
        Mean loss per epoch.
    """
    if not pseudo_docs:
        raise ValueError("Pre-training needs at least one pseudo document")
    examples: List[Example] = [(d.tokens, d.pseudo_label) for d in pseudo_docs]
    if labeled_docs and corpus is not None:
        examples.extend(labeled_examples(labeled_docs, corpus))
    logger.info(f"Pre-training on {len(examples)} examples for {epochs} epochs")
    return classifier.fit(examples, config, rng, epochs=epochs)


def self_train_targets(Y: np.ndarray) -> np.ndarray:
    """Sharpened targets ``l_ij = (y_ij^2 / f_j) / sum_j' (y_ij'^2 / f_j')``.

    ``f_j`` is the soft frequency of class ``j``, the column sum of ``Y``.

    Raises:
        DegenerateFrequency: If some class has total mass below 1e-12.
    """
    Y = np.asarray(Y, dtype=np.float64)
    frequency = Y.sum(axis=0)
    collapsed = np.flatnonzero(frequency < MIN_FREQUENCY)
    if collapsed.size:
        raise DegenerateFrequency(
            f"Classes {collapsed.tolist()} received no predicted mass; "
            "self-training cannot continue"
        )
    weights = Y**2 / frequency
    return weights / weights.sum(axis=1, keepdims=True)


def assignment_change_fraction(prev_labels: Sequence[int], new_labels: Sequence[int]) -> float:
    """Fraction of documents whose argmax label changed.

    Raises:
        LengthMismatch: If the labelings differ in length.
    """
    prev = np.asarray(prev_labels)
    new = np.asarray(new_labels)
    if prev.shape != new.shape:
        raise LengthMismatch(f"{prev.shape[0]} previous labels vs {new.shape[0]} new labels")
    if prev.size == 0:
        return 0.0
    return float(np.mean(prev != new))


def _mean_kl(L: np.ndarray, Y: np.ndarray) -> float:
    mask = L > 0
    return float(np.sum(L[mask] * (np.log(L[mask]) - np.log(Y[mask]))) / L.shape[0])


class SelfTrainer:
    """Runs the self-training loop on one classifier over one corpus."""

    def __init__(
        self,
        classifier: NeuralClassifier,
        corpus: Corpus,
        train_config: TrainConfig,
        config: SelfTrainConfig,
        workers: int = 1,
        labeled_docs: Optional[Sequence[Sequence[int]]] = None,
    ):
        self.classifier = classifier
        self.corpus = corpus
        self.train_config = train_config
        self.config = config
        self.workers = workers
        self.documents = [doc.tokens for doc in corpus.documents]
        self.gold = corpus.gold_labels()
        self._fixed_targets = self._labeled_positions(labeled_docs)

    def _labeled_positions(
        self, labeled_docs: Optional[Sequence[Sequence[int]]]
    ) -> List[Tuple[int, int]]:
        if not labeled_docs:
            return []
        row_of = {doc.id: row for row, doc in enumerate(self.corpus.documents)}
        return [
            (row_of[doc_id], j)
            for j, doc_ids in enumerate(labeled_docs)
            for doc_id in doc_ids
            if doc_id in row_of
        ]

    def _checkpoint(
        self, iteration: int, Y: np.ndarray, L: np.ndarray, change: float
    ) -> SelfTrainCheckpoint:
        labels = np.argmax(Y, axis=1)
        macro = micro = None
        if self.gold is not None:
            metrics = evaluate_labels(self.gold, labels, self.classifier.n_classes)
            macro, micro = metrics["macro_f1"], metrics["micro_f1"]
        return SelfTrainCheckpoint(
            iteration=iteration,
            change_fraction=change,
            mean_kl=_mean_kl(L, Y),
            macro_f1=macro,
            micro_f1=micro,
        )

    def targets(self, Y: np.ndarray) -> np.ndarray:
        L = self_train_targets(Y)
        m = L.shape[1]
        for row, j in self._fixed_targets:
            L[row] = one_hot(j, m)
        return L

    def run(self, rng: np.random.Generator) -> SelfTrainReport:
        """Iterate until fewer than ``delta`` percent of assignments change.

        Checkpoint 0 holds the pre-trained model's predictions as the
        baseline. Each later checkpoint follows ``update_interval`` batches
        trained on the targets of the previous one.

        Args:
            rng: Generator for the mini-batch order.

        Returns:
            The report with one entry per checkpoint.
        """
        threshold = self.config.delta / 100.0
        report = SelfTrainReport()

        Y = self.classifier.predict_batch(self.documents, workers=self.workers)
        labels = np.argmax(Y, axis=1)
        L = self.targets(Y)
        report.checkpoints.append(self._checkpoint(0, Y, L, 0.0))

        for iteration in range(1, self.config.max_iterations + 1):
            examples = list(zip(self.documents, L))
            self.classifier.train_batches(
                examples, self.train_config, self.config.update_interval, rng
            )
            Y = self.classifier.predict_batch(self.documents, workers=self.workers)
            new_labels = np.argmax(Y, axis=1)
            change = assignment_change_fraction(labels, new_labels)
            labels = new_labels
            L = self.targets(Y)
            checkpoint = self._checkpoint(iteration, Y, L, change)
            report.checkpoints.append(checkpoint)
            score = "" if checkpoint.micro_f1 is None else f", micro-F1 {checkpoint.micro_f1:.4f}"
            logger.info(
                f"Self-training iteration {iteration}: {change:.4%} of assignments changed{score}"
            )
            if change < threshold:
                report.converged = True
                break
        else:
            logger.warning(
                f"Self-training stopped at max_iterations={self.config.max_iterations} "
                f"without converging"
            )
        return report


def self_train(
    classifier: NeuralClassifier,
    corpus: Corpus,
    train_config: TrainConfig,
    config: SelfTrainConfig,
    rng: np.random.Generator,
    workers: int = 1,
    labeled_docs: Optional[Sequence[Sequence[int]]] = None,
) -> Tuple[NeuralClassifier, SelfTrainReport]:
    """Refine a pre-trained classifier on the unlabeled corpus.

    Returns:
        The refined classifier (updated in place) and the report.
    """
    if len(corpus) == 0:
        raise ValueError("Self-training needs a non-empty corpus")
    # momentum starts fresh, as it does after loading the pre-trained checkpoint
    classifier.reset_optimizer()
    trainer = SelfTrainer(classifier, corpus, train_config, config, workers, labeled_docs)
    report = trainer.run(rng)
    return classifier, report
