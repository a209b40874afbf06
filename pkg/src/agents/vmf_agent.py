"""vMF Agent: fit one spherical distribution per class."""

import logging

from src.agents.loaders import ensure_keywords, get_store, input_paths
from src.core.state import PipelineState, mark_completed, record_failure
from src.services import vmf

logger = logging.getLogger(__name__)

STAGE = "vmf"


def vmf_agent(state: PipelineState) -> PipelineState:
    """Estimate the mean direction and concentration of each class's keywords.

    Args:
        state: Current pipeline state.

    Returns:
        Updated state with class distributions.
    """
    try:
        config = state["config"]
        keywords = ensure_keywords(state, STAGE)
        distributions = []
        for j, vectors in enumerate(keywords.vectors):
            dist = vmf.estimate(vectors)
            logger.info(f"Class {j}: kappa={dist.kappa:.4f} from {vectors.shape[0]} keywords")
            distributions.append(dist)

        store = get_store(config)
        store.write_vmf(distributions)
        store.record_stage(config, STAGE, input_paths(config))
        state["distributions"] = distributions
        mark_completed(state, STAGE)
        return state

    except Exception as e:
        return record_failure(state, STAGE, e)
