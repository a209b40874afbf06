"""Fetch stage inputs from the state, falling back to the run directory.

In pipeline mode every input is already in the state; a single stage run
loads what earlier stages persisted and fails with MissingArtifact otherwise.
"""

import logging
from pathlib import Path
from typing import List, Optional

from src.classifiers.base import NeuralClassifier, build_classifier, checkpoint_info
from src.core.config import PipelineConfig
from src.core.exceptions import CheckpointMismatch
from src.core.state import PipelineState
from src.database.artifact_store import ArtifactStore
from src.services.embedding_service import EmbeddingMatrix
from src.services.pseudo_doc_service import PseudoDocument
from src.services.seed_service import ClassKeywords
from src.services.vmf import VmfDistribution

logger = logging.getLogger(__name__)


def get_store(config: PipelineConfig) -> ArtifactStore:
    """Artifact store of the configured run directory."""
    return ArtifactStore(config.output_dir, config.rng_seed)


def input_paths(config: PipelineConfig) -> List[str]:
    """Input files whose hashes go into the manifest."""
    paths = [config.corpus.path, config.supervision.path]
    if config.embedding.source == "load":
        paths.append(config.embedding.path)
    return [p for p in paths if p]


def ensure_embeddings(state: PipelineState, stage: str) -> EmbeddingMatrix:
    if state.get("embeddings") is None:
        store = get_store(state["config"])
        state["embeddings"] = store.read_embeddings(stage, state["vocabulary"])
        logger.info(f"Loaded embeddings from {store.run_dir}")
    return state["embeddings"]


def ensure_keywords(state: PipelineState, stage: str) -> ClassKeywords:
    if state.get("keywords") is None:
        embeddings = ensure_embeddings(state, stage)
        state["keywords"] = get_store(state["config"]).read_keywords(stage, embeddings)
    return state["keywords"]


def ensure_distributions(state: PipelineState, stage: str) -> List[VmfDistribution]:
    if state.get("distributions") is None:
        state["distributions"] = get_store(state["config"]).read_vmf(stage)
    return state["distributions"]


def ensure_pseudo_docs(state: PipelineState, stage: str) -> List[PseudoDocument]:
    if state.get("pseudo_docs") is None:
        store = get_store(state["config"])
        state["pseudo_docs"] = store.read_pseudo_docs(stage, state["vocabulary"])
    return state["pseudo_docs"]


def load_classifier(
    state: PipelineState, stage: str, checkpoint: str, seed: Optional[int] = None
) -> NeuralClassifier:
    """Rebuild a classifier from a checkpoint in the run directory.

    Raises:
        MissingArtifact: If the checkpoint does not exist.
        CheckpointMismatch: If it was trained on another vocabulary or architecture.
    """
    config = state["config"]
    store = get_store(config)
    path: Path = store.require(stage, checkpoint)
    info = checkpoint_info(path)
    n_classes = info.get("n_classes")
    if not isinstance(n_classes, int) or n_classes < 2:
        raise CheckpointMismatch(f"{path}: checkpoint does not record a class count")
    embeddings = ensure_embeddings(state, stage)
    classifier = build_classifier(
        config.classifier,
        embeddings,
        n_classes,
        seed=seed if seed is not None else config.stage_seed("pretrain"),
        fine_tune_embeddings=config.train.fine_tune_embeddings,
        vocabulary_fingerprint=state["vocabulary"].fingerprint(),
    )
    store.read_checkpoint(stage, checkpoint, classifier, state["vocabulary"])
    logger.info(f"Loaded classifier from {path}")
    return classifier
