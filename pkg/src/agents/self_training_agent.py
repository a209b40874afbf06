"""Self-Training Agent: refine the pre-trained classifier on the real corpus."""

import logging

import numpy as np

from src.agents.loaders import get_store, input_paths, load_classifier
from src.core.state import PipelineState, mark_completed, record_failure
from src.database.artifact_store import CHECKPOINT_FINAL, CHECKPOINT_PRETRAIN
from src.services.self_training import self_train

logger = logging.getLogger(__name__)

STAGE = "selftrain"


def self_training_agent(state: PipelineState) -> PipelineState:
    """Run self-training and write the final checkpoint, report and predictions.

    Args:
        state: Current pipeline state.

    Returns:
        Updated state with the refined classifier, report and predictions.
    """
    try:
        config = state["config"]
        store = get_store(config)
        seed = config.stage_seed(STAGE)
        classifier = state.get("classifier")
        if classifier is None:
            classifier = load_classifier(state, STAGE, CHECKPOINT_PRETRAIN)

        corpus = state["corpus"]
        supervision = state["supervision"]
        labeled_docs = supervision.labeled_docs if supervision.kind == "docs" else None
        classifier, report = self_train(
            classifier,
            corpus,
            config.train,
            config.self_train,
            rng=np.random.default_rng(seed),
            workers=config.effective_workers,
            labeled_docs=labeled_docs,
        )

        predictions = classifier.predict_batch(
            [doc.tokens for doc in corpus.documents], workers=config.effective_workers
        )
        store.write_checkpoint(classifier, CHECKPOINT_FINAL, seed)
        store.write_report(report)
        store.write_predictions([doc.id for doc in corpus.documents], predictions)
        store.record_stage(config, STAGE, input_paths(config))
        logger.info(
            f"Self-training finished after {len(report.checkpoints) - 1} iterations "
            f"(converged={report.converged})"
        )

        state["classifier"] = classifier
        state["report"] = report
        state["predictions"] = predictions
        mark_completed(state, STAGE)
        return state

    except Exception as e:
        return record_failure(state, STAGE, e)
