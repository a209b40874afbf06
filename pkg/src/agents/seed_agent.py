"""Seed Agent: expand the supervision into per-class keywords."""

import logging

from src.agents.loaders import ensure_embeddings, get_store, input_paths
from src.core.state import PipelineState, mark_completed, record_failure
from src.services.seed_service import expand_supervision

logger = logging.getLogger(__name__)

STAGE = "seeds"


def seed_agent(state: PipelineState) -> PipelineState:
    """Expand label names, keywords or labeled documents into keyword sets.

    Args:
        state: Current pipeline state.

    Returns:
        Updated state with class keywords.
    """
    try:
        config = state["config"]
        embeddings = ensure_embeddings(state, STAGE)
        keywords = expand_supervision(
            state["supervision"],
            embeddings,
            state["corpus"],
            state["tfidf"],
            t=config.seeds.t,
            min_t=config.seeds.min_t,
        )
        for j, words in enumerate(keywords.words):
            logger.info(f"Class {j} keywords: {', '.join(words[:10])}")

        store = get_store(config)
        store.write_keywords(keywords, state["supervision"].kind)
        store.record_stage(config, STAGE, input_paths(config))
        state["keywords"] = keywords
        mark_completed(state, STAGE)
        return state

    except Exception as e:
        return record_failure(state, STAGE, e)
