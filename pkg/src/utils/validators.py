"""Input validation utilities."""

from pathlib import Path
from typing import Optional

from src.core.config import STAGES, PipelineConfig


def _is_file(path: Optional[str]) -> bool:
    return bool(path) and Path(path).is_file()


def validate_pipeline_config(config: PipelineConfig) -> tuple[bool, Optional[str]]:
    """Validate that a configuration can start a pipeline run.

    Checks the cross-field rules pydantic cannot see: exactly one supervision
    source and every referenced input file present.

    Args:
        config: Parsed pipeline configuration.

    Returns:
        Tuple of (is_valid, error_message).
    """
    if not config.corpus.path:
        return False, "corpus.path is required"
    if not _is_file(config.corpus.path):
        return False, f"Corpus file not found: {config.corpus.path}"

    if config.supervision.kind is None or not config.supervision.path:
        return False, "Exactly one supervision source (supervision.kind and .path) is required"
    if not _is_file(config.supervision.path):
        return False, f"Supervision file not found: {config.supervision.path}"

    if config.embedding.source == "load":
        if not config.embedding.path:
            return False, "embedding.path is required when embedding.source is 'load'"
        if not _is_file(config.embedding.path):
            return False, f"Embedding file not found: {config.embedding.path}"

    return True, None


def validate_stage_name(stage: str) -> tuple[bool, Optional[str]]:
    """Validate a stage name.

    Args:
        stage: Requested stage.

    Returns:
        Tuple of (is_valid, error_message).
    """
    if stage not in STAGES:
        return False, f"Unknown stage '{stage}'; expected one of {', '.join(STAGES)}"
    return True, None
