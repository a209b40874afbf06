"""Pretrain Agent: fit the classifier to pseudo documents."""

import logging

import numpy as np

from src.agents.loaders import ensure_embeddings, ensure_pseudo_docs, get_store, input_paths
from src.classifiers.base import build_classifier
from src.core.state import PipelineState, mark_completed, record_failure
from src.database.artifact_store import CHECKPOINT_PRETRAIN
from src.services.evaluation import evaluate_labels
from src.services.self_training import pretrain

logger = logging.getLogger(__name__)

STAGE = "pretrain"


def pretrain_agent(state: PipelineState) -> PipelineState:
    """Pre-train on pseudo documents plus any labeled documents.

    Also scores the pre-trained model on the corpus, so the pre-training-only
    variant is reported whenever gold labels exist.

    Args:
        state: Current pipeline state.

    Returns:
        Updated state with the pre-trained classifier and its predictions.
    """
    try:
        config = state["config"]
        embeddings = ensure_embeddings(state, STAGE)
        pseudo_docs = ensure_pseudo_docs(state, STAGE)
        supervision = state["supervision"]
        corpus = state["corpus"]
        n_classes = int(pseudo_docs[0].pseudo_label.shape[0])
        seed = config.stage_seed(STAGE)

        classifier = build_classifier(
            config.classifier,
            embeddings,
            n_classes,
            seed=seed,
            fine_tune_embeddings=config.train.fine_tune_embeddings,
            vocabulary_fingerprint=state["vocabulary"].fingerprint(),
        )
        labeled_docs = supervision.labeled_docs if supervision.kind == "docs" else None
        pretrain(
            classifier,
            pseudo_docs,
            config.train,
            epochs=config.self_train.pretrain_epochs,
            rng=np.random.default_rng(seed),
            labeled_docs=labeled_docs,
            corpus=corpus,
        )

        store = get_store(config)
        store.write_checkpoint(classifier, CHECKPOINT_PRETRAIN, seed)

        predictions = classifier.predict_batch(
            [doc.tokens for doc in corpus.documents], workers=config.effective_workers
        )
        gold = corpus.gold_labels()
        if gold is not None:
            metrics = evaluate_labels(gold, np.argmax(predictions, axis=1), n_classes)
            store.write_metrics(metrics, pretrain=True)
            logger.info(
                f"Pre-training only: macro-F1 {metrics['macro_f1']:.4f}, "
                f"micro-F1 {metrics['micro_f1']:.4f}"
            )
        store.record_stage(config, STAGE, input_paths(config))

        state["classifier"] = classifier
        state["pretrain_predictions"] = predictions
        mark_completed(state, STAGE)
        return state

    except Exception as e:
        return record_failure(state, STAGE, e)
