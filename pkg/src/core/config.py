"""Configuration management for the application.

Process-level options come from the environment (``SEEDCLS_*`` or ``.env``);
everything a run depends on lives in a YAML ``PipelineConfig`` so a run
directory can be reproduced from its config alone.
"""

from pathlib import Path
from typing import List, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

STAGES = ("embed", "seeds", "vmf", "generate", "pretrain", "selftrain", "eval")


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SEEDCLS_",
        case_sensitive=False,
        extra="ignore",
    )

    log_level: str = "INFO"
    workers: int = 1
    single_thread: bool = False


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CorpusConfig(_Section):
    """Where the corpus lives and how it is read."""

    path: Optional[str] = None
    format: Literal["text", "labeled"] = "text"
    min_count: int = Field(5, ge=1)


class SupervisionConfig(_Section):
    """The single weak-supervision source of a run."""

    kind: Optional[Literal["labels", "keywords", "docs"]] = None
    path: Optional[str] = None


class SkipGramConfig(_Section):
    """Skip-Gram with negative sampling hyperparameters."""

    dim: int = Field(100, ge=2)
    window: int = Field(5, ge=1)
    negatives: int = Field(5, ge=1)
    epochs: int = Field(5, ge=1)
    learning_rate: float = Field(0.025, gt=0.0)
    subsample_threshold: float = Field(1e-3, ge=0.0)
    rng_seed: Optional[int] = None


class EmbeddingConfig(_Section):
    """Train embeddings on the corpus or load a word2vec text file."""

    source: Literal["train", "load"] = "train"
    path: Optional[str] = None
    skipgram: SkipGramConfig = Field(default_factory=SkipGramConfig)


class SeedConfig(_Section):
    """Seed expansion options.

    ``t`` pins the expansion size for keyword and labeled-document
    supervision; when unset the disjointness rule with a floor of ``min_t``
    applies. Label-name supervision always uses the disjointness rule.
    """

    t: Optional[int] = Field(None, ge=1)
    min_t: int = Field(10, ge=1)


class GeneratorConfig(_Section):
    """Pseudo-document generator settings."""

    alpha: float = Field(0.2, ge=0.0, le=1.0)
    beta: int = Field(500, ge=1)
    gamma: int = Field(50, ge=1)
    doc_length: Optional[int] = Field(None, ge=1)
    parameter_study: bool = False
    rng_seed: Optional[int] = None

    @model_validator(mode="after")
    def _check_alpha(self) -> "GeneratorConfig":
        if not self.parameter_study and not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1) outside parameter-study mode")
        return self


class ClassifierConfig(_Section):
    """Which classifier to build and its architecture."""

    kind: Literal["word_cnn", "bag_of_embeddings"] = "word_cnn"
    window_sizes: List[int] = Field(default_factory=lambda: [2, 3, 4, 5])
    filters: int = Field(20, ge=1)

    @model_validator(mode="after")
    def _check_windows(self) -> "ClassifierConfig":
        if not self.window_sizes or min(self.window_sizes) < 1:
            raise ValueError("window_sizes must be a non-empty list of positive integers")
        return self


class TrainConfig(_Section):
    """Mini-batch SGD settings shared by pre-training and self-training."""

    learning_rate: float = Field(0.01, gt=0.0)
    batch_size: int = Field(256, ge=1)
    epochs: int = Field(5, ge=1)
    momentum: float = Field(0.9, ge=0.0, lt=1.0)
    fine_tune_embeddings: bool = False
    rng_seed: Optional[int] = None


class SelfTrainConfig(_Section):
    """Self-training loop settings. ``delta`` is a percentage."""

    delta: float = Field(0.1, gt=0.0)
    update_interval: int = Field(50, ge=1)
    max_iterations: int = Field(100, ge=1)
    pretrain_epochs: int = Field(5, ge=1)
    enabled: bool = True
    rng_seed: Optional[int] = None


class SyntheticConfig(_Section):
    """Shape of the bundled synthetic topical corpus."""

    n_classes: int = Field(3, ge=2, le=6)
    topic_words: int = Field(60, ge=4)
    background_words: int = Field(200, ge=1)
    docs_per_class: int = Field(500, ge=1)
    min_length: int = Field(20, ge=1)
    max_length: int = Field(40, ge=1)
    topic_fraction: float = Field(0.6, gt=0.0, le=1.0)
    seeds_per_class: int = Field(3, ge=1)
    labeled_per_class: int = Field(10, ge=1)
    rng_seed: int = 7

    @model_validator(mode="after")
    def _check_lengths(self) -> "SyntheticConfig":
        if self.min_length > self.max_length:
            raise ValueError("min_length must not exceed max_length")
        if self.seeds_per_class > self.topic_words:
            raise ValueError("seeds_per_class must not exceed topic_words")
        return self


class PipelineConfig(_Section):
    """Everything a pipeline run depends on."""

    corpus: CorpusConfig = Field(default_factory=CorpusConfig)
    supervision: SupervisionConfig = Field(default_factory=SupervisionConfig)
    embedding: EmbeddingConfig = Field(default_factory=EmbeddingConfig)
    seeds: SeedConfig = Field(default_factory=SeedConfig)
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    classifier: ClassifierConfig = Field(default_factory=ClassifierConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    self_train: SelfTrainConfig = Field(default_factory=SelfTrainConfig)
    output_dir: str = "./runs/latest"
    rng_seed: int = 42
    dump_pseudo: bool = False
    single_thread: bool = True
    workers: int = Field(1, ge=1)

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "PipelineConfig":
        """Load a pipeline configuration from a YAML file.

        Args:
            path: Path to the YAML file.

        Returns:
            Parsed and validated configuration.
        """
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        return cls.model_validate(data)

    def to_yaml(self) -> str:
        """Serialize the configuration to YAML text."""
        return yaml.safe_dump(self.model_dump(mode="json"), sort_keys=False)

    def stage_seed(self, stage: str) -> int:
        """Derive the deterministic seed of a stage from the master seed.

        A section-level ``rng_seed`` pins its stage's seed instead.

        Args:
            stage: One of ``STAGES``.

        Returns:
            A 32-bit seed, unique per stage.
        """
        pinned = {
            "embed": self.embedding.skipgram.rng_seed,
            "generate": self.generator.rng_seed,
            "pretrain": self.train.rng_seed,
            "selftrain": self.self_train.rng_seed,
        }.get(stage)
        if pinned is not None:
            return pinned
        sequence = np.random.SeedSequence(self.rng_seed, spawn_key=(STAGES.index(stage),))
        return int(sequence.generate_state(1)[0])

    @property
    def effective_workers(self) -> int:
        """Worker count after the single-thread switch is applied."""
        return 1 if self.single_thread else self.workers


# Global settings instance
settings = Settings()
