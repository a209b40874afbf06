"""Evaluation Agent: score the final predictions against gold labels."""

import logging
from typing import List

import numpy as np

from src.agents.loaders import get_store, input_paths, load_classifier
from src.core.exceptions import InvalidCorpusFormat
from src.core.state import PipelineState, mark_completed, record_failure
from src.database.artifact_store import CHECKPOINT_PRETRAIN, PREDICTIONS
from src.services.corpus import Corpus
from src.services.evaluation import evaluate_labels

logger = logging.getLogger(__name__)

STAGE = "eval"


def _gold_for(corpus: Corpus, doc_ids: List[int]) -> np.ndarray:
    gold = []
    for doc_id in doc_ids:
        doc = corpus.get(doc_id)
        if doc is None:
            raise InvalidCorpusFormat(f"Predicted document {doc_id} is not in the corpus")
        gold.append(doc.gold_label)
    return np.array(gold, dtype=np.int64)


def evaluation_agent(state: PipelineState) -> PipelineState:
    """Write predictions if no earlier stage did, then metrics when gold labels exist.

    Args:
        state: Current pipeline state.

    Returns:
        Updated state with predictions and metrics.
    """
    try:
        config = state["config"]
        store = get_store(config)
        corpus = state["corpus"]
        doc_ids = [doc.id for doc in corpus.documents]
        predictions = state.get("predictions")

        if predictions is None and not config.self_train.enabled:
            predictions = state.get("pretrain_predictions")
            if predictions is None and not store.exists(PREDICTIONS):
                classifier = load_classifier(state, STAGE, CHECKPOINT_PRETRAIN)
                predictions = classifier.predict_batch(
                    [doc.tokens for doc in corpus.documents], workers=config.effective_workers
                )
            if predictions is not None:
                store.write_predictions(doc_ids, predictions)

        if predictions is not None:
            labels = np.argmax(predictions, axis=1)
            n_classes = int(predictions.shape[1])
        else:
            doc_ids, labels, probabilities = store.read_predictions(STAGE)
            n_classes = int(probabilities.shape[1])
            predictions = probabilities

        state["predictions"] = predictions
        if corpus.has_gold_labels:
            metrics = evaluate_labels(_gold_for(corpus, doc_ids), labels, n_classes)
            store.write_metrics(metrics)
            state["metrics"] = metrics
            logger.info(
                f"Macro-F1 {metrics['macro_f1']:.4f}, micro-F1 {metrics['micro_f1']:.4f} "
                f"on {len(doc_ids)} documents"
            )
        else:
            logger.info("Corpus has no gold labels; skipping metrics")

        store.record_stage(config, STAGE, input_paths(config))
        mark_completed(state, STAGE)
        return state

    except Exception as e:
        return record_failure(state, STAGE, e)
