"""Generation Agent: draw pseudo documents from the class distributions."""

import logging

from src.agents.loaders import ensure_distributions, ensure_embeddings, get_store, input_paths
from src.core.state import PipelineState, mark_completed, record_failure
from src.services.pseudo_doc_service import PseudoDocumentGenerator, resolve_doc_length

logger = logging.getLogger(__name__)

STAGE = "generate"


def generation_agent(state: PipelineState) -> PipelineState:
    """Generate ``beta`` pseudo documents per class.

    The documents are persisted when ``dump_pseudo`` is set and always in
    stage mode, where the pretrain stage reads them back.

    Args:
        state: Current pipeline state.

    Returns:
        Updated state with pseudo documents.
    """
    try:
        config = state["config"]
        distributions = ensure_distributions(state, STAGE)
        embeddings = ensure_embeddings(state, STAGE)
        doc_length = resolve_doc_length(config.generator, state["corpus"])

        generator = PseudoDocumentGenerator(
            config.generator, embeddings, state["background"], doc_length
        )
        pseudo_docs = generator.generate_all(
            distributions, seed=config.stage_seed(STAGE), workers=config.effective_workers
        )

        store = get_store(config)
        if config.dump_pseudo or state["mode"] == "stage":
            store.write_pseudo_docs(pseudo_docs, state["vocabulary"])
        store.record_stage(config, STAGE, input_paths(config))

        state["doc_length"] = doc_length
        state["pseudo_docs"] = pseudo_docs
        mark_completed(state, STAGE)
        return state

    except Exception as e:
        return record_failure(state, STAGE, e)
