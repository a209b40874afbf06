"""Ingestion Agent: read the corpus and the supervision source."""

import logging

from src.core.exceptions import ConfigValidationError
from src.core.state import PipelineState, record_failure
from src.services.corpus import (
    background_distribution,
    build_corpus,
    build_tfidf_index,
    read_corpus_file,
)
from src.services.seed_service import read_supervision
from src.utils.validators import validate_pipeline_config

logger = logging.getLogger(__name__)


def ingestion_agent(state: PipelineState) -> PipelineState:
    """Build the corpus, vocabulary, background distribution and tf-idf index.

    Args:
        state: Current pipeline state.

    Returns:
        Updated state with corpus statistics and the parsed supervision.
    """
    try:
        config = state["config"]
        is_valid, error_msg = validate_pipeline_config(config)
        if not is_valid:
            raise ConfigValidationError(error_msg)

        supervision = read_supervision(config.supervision.kind, config.supervision.path)
        label_names = supervision.label_names if supervision.kind == "labels" else None
        lines = read_corpus_file(config.corpus.path, config.corpus.format)
        corpus, vocabulary = build_corpus(
            lines, min_count=config.corpus.min_count, label_names=label_names
        )

        state["corpus"] = corpus
        state["vocabulary"] = vocabulary
        state["supervision"] = supervision
        state["background"] = background_distribution(corpus)
        state["tfidf"] = build_tfidf_index(corpus)
        logger.info(
            f"Ingested {len(corpus)} documents with {supervision.kind} supervision "
            f"for {supervision.n_classes} classes"
        )
        return state

    except Exception as e:
        return record_failure(state, "ingestion", e)
