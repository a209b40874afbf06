"""State management for the LangGraph stage workflow."""

import logging
from typing import Any, Dict, List, Literal, Optional, TypedDict

import numpy as np

from src.core.config import PipelineConfig
from src.core.exceptions import EXIT_OK, EXIT_RUNTIME

logger = logging.getLogger(__name__)


class PipelineState(TypedDict):
    """State shared by the stage agents of one run."""

    config: PipelineConfig
    mode: Literal["pipeline", "stage"]
    stage: Optional[str]  # Stage requested in stage mode

    # Corpus
    corpus: Optional[Any]  # Corpus
    vocabulary: Optional[Any]  # Vocabulary
    tfidf: Optional[Any]  # TfIdfIndex
    background: Optional[Any]  # BackgroundDistribution
    supervision: Optional[Any]  # Supervision

    # Semantic space and class distributions
    embeddings: Optional[Any]  # EmbeddingMatrix
    keywords: Optional[Any]  # ClassKeywords
    distributions: Optional[List[Any]]  # VmfDistribution per class
    doc_length: Optional[int]

    # Training
    pseudo_docs: Optional[List[Any]]  # PseudoDocument
    classifier: Optional[Any]  # NeuralClassifier
    pretrain_predictions: Optional[np.ndarray]
    report: Optional[Any]  # SelfTrainReport

    # Results
    predictions: Optional[np.ndarray]
    metrics: Optional[Dict[str, Any]]

    # Metadata
    errors: List[str]  # Stage-tagged error messages
    exit_code: int
    metadata: Dict[str, Any]


def create_pipeline_state(config: PipelineConfig) -> PipelineState:
    """Create the initial state of a full pipeline run.

    Args:
        config: Validated pipeline configuration.

    Returns:
        Initial PipelineState.
    """
    return PipelineState(
        config=config,
        mode="pipeline",
        stage=None,
        corpus=None,
        vocabulary=None,
        tfidf=None,
        background=None,
        supervision=None,
        embeddings=None,
        keywords=None,
        distributions=None,
        doc_length=None,
        pseudo_docs=None,
        classifier=None,
        pretrain_predictions=None,
        report=None,
        predictions=None,
        metrics=None,
        errors=[],
        exit_code=EXIT_OK,
        metadata={"completed_stages": []},
    )


def create_stage_state(config: PipelineConfig, stage: str) -> PipelineState:
    """Create state for running a single stage against an existing run directory.

    Args:
        config: Validated pipeline configuration.
        stage: Stage to run.

    Returns:
        PipelineState in stage mode.
    """
    state = create_pipeline_state(config)
    state["mode"] = "stage"
    state["stage"] = stage
    return state


def record_failure(state: PipelineState, stage: str, error: Exception) -> PipelineState:
    """Log a stage failure and mark the state so the graph stops."""
    message = f"[{stage}] {type(error).__name__}: {error}"
    logger.error(message)
    state["errors"].append(message)
    state["exit_code"] = getattr(error, "exit_code", EXIT_RUNTIME)
    return state


def mark_completed(state: PipelineState, stage: str) -> None:
    state["metadata"].setdefault("completed_stages", []).append(stage)
