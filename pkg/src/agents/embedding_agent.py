"""Embedding Agent: build the shared semantic sphere."""

import logging

from src.agents.loaders import get_store, input_paths
from src.core.state import PipelineState, mark_completed, record_failure
from src.services.embedding_service import load_embeddings, train_skipgram

logger = logging.getLogger(__name__)

STAGE = "embed"


def embedding_agent(state: PipelineState) -> PipelineState:
    """Train Skip-Gram embeddings or load pretrained vectors, then export them.

    Downstream stages use the exported vectors, so a pipeline run and a
    stage-by-stage run see the same numbers.

    Args:
        state: Current pipeline state.

    Returns:
        Updated state with embeddings.
    """
    try:
        config = state["config"]
        store = get_store(config)
        seed = config.stage_seed(STAGE)

        if config.embedding.source == "train":
            embeddings = train_skipgram(
                state["corpus"],
                config.embedding.skipgram,
                seed=seed,
                workers=config.effective_workers,
            )
        else:
            embeddings = load_embeddings(config.embedding.path, state["vocabulary"], seed=seed)

        store.write_embeddings(embeddings)
        state["embeddings"] = store.read_embeddings(STAGE, state["vocabulary"])
        store.record_stage(config, STAGE, input_paths(config))
        mark_completed(state, STAGE)
        logger.info(f"Embedded {len(embeddings)} words in {embeddings.dim} dimensions")
        return state

    except Exception as e:
        return record_failure(state, STAGE, e)
