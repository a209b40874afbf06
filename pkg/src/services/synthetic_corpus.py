"""Bundled synthetic topical corpus for desk-scale end-to-end runs.

Every class owns a disjoint topical vocabulary headed by its class-name word;
all classes share one background vocabulary. Documents mix Zipf-weighted
topical words with background words.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from src.core.config import PipelineConfig, SyntheticConfig
from src.services.corpus import build_corpus
from src.services.seed_service import Supervision, sample_labeled_docs, write_supervision

logger = logging.getLogger(__name__)

CLASS_NAMES = ("sports", "politics", "science", "business", "health", "travel")


@dataclass(frozen=True)
class SyntheticCorpus:
    """Generated documents with their vocabularies."""

    texts: List[str]
    labels: List[int]
    class_names: List[str]
    topic_vocabularies: List[List[str]]
    background_vocabulary: List[str]


def _zipf_weights(size: int) -> np.ndarray:
    weights = 1.0 / np.arange(1, size + 1, dtype=np.float64)
    return weights / weights.sum()


def topic_vocabulary(name: str, size: int) -> List[str]:
    """Class-name word followed by ``size - 1`` words derived from it."""
    return [name] + [f"{name}{k:02d}" for k in range(1, size)]


def generate_synthetic_corpus(config: SyntheticConfig) -> SyntheticCorpus:
    """Generate a shuffled labeled corpus.

    Args:
        config: Corpus shape and seed.

    Returns:
        Document texts with gold labels, in shuffled order.
    """
    rng = np.random.default_rng(config.rng_seed)
    names = list(CLASS_NAMES[: config.n_classes])
    topics = [topic_vocabulary(name, config.topic_words) for name in names]
    background = [f"bg{k:03d}" for k in range(config.background_words)]
    topic_weights = _zipf_weights(config.topic_words)
    background_weights = _zipf_weights(config.background_words)

    texts: List[str] = []
    labels: List[int] = []
    for j, vocabulary in enumerate(topics):
        for _ in range(config.docs_per_class):
            length = int(rng.integers(config.min_length, config.max_length + 1))
            topical = rng.uniform(size=length) < config.topic_fraction
            tokens = np.where(
                topical,
                rng.choice(config.topic_words, size=length, p=topic_weights),
                rng.choice(config.background_words, size=length, p=background_weights),
            )
            words = [
                vocabulary[i] if is_topic else background[i] for i, is_topic in zip(tokens, topical)
            ]
            texts.append(" ".join(words))
            labels.append(j)

    order = rng.permutation(len(texts))
    logger.info(
        f"Generated synthetic corpus: {len(texts)} documents, {config.n_classes} classes, "
        f"{config.topic_words} topic words per class, {config.background_words} background words"
    )
    return SyntheticCorpus(
        texts=[texts[i] for i in order],
        labels=[labels[i] for i in order],
        class_names=names,
        topic_vocabularies=topics,
        background_vocabulary=background,
    )


def default_synthetic_pipeline(output_dir: Union[str, Path]) -> PipelineConfig:
    """Default pipeline settings with fewer and shorter pseudo-documents.

    Only ``generator.beta`` and ``generator.doc_length`` depart from the
    defaults; the corpus is read as labeled so the run can be scored.
    """
    return PipelineConfig.model_validate(
        {
            "corpus": {"format": "labeled"},
            "generator": {"beta": 100, "doc_length": 50},
            "output_dir": str(Path(output_dir) / "run"),
        }
    )


def write_synthetic_dataset(
    output_dir: Union[str, Path],
    config: SyntheticConfig,
    supervision: str = "keywords",
) -> Dict[str, Path]:
    """Write the corpus, all three supervision files and a pipeline YAML.

    Args:
        output_dir: Directory to write into; created if missing.
        config: Corpus shape and seed.
        supervision: Supervision kind the pipeline YAML points at.

    Returns:
        Paths of the written files keyed by role.
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    synthetic = generate_synthetic_corpus(config)

    paths = {
        "corpus": out / "corpus.tsv",
        "labels": out / "labels.txt",
        "keywords": out / "keywords.tsv",
        "docs": out / "docs.tsv",
        "config": out / "pipeline.yaml",
    }
    with open(paths["corpus"], "w", encoding="utf-8") as f:
        for label, text in zip(synthetic.labels, synthetic.texts):
            f.write(f"{label}\t{text}\n")

    names = Supervision(kind="labels", label_names=synthetic.class_names)
    write_supervision(paths["labels"], names)
    seeds = [vocab[: config.seeds_per_class] for vocab in synthetic.topic_vocabularies]
    write_supervision(paths["keywords"], Supervision(kind="keywords", keyword_lists=seeds))

    pipeline = default_synthetic_pipeline(out)
    corpus, _ = build_corpus(
        list(zip(synthetic.texts, synthetic.labels)), min_count=pipeline.corpus.min_count
    )
    labeled = sample_labeled_docs(
        corpus, config.labeled_per_class, np.random.default_rng(config.rng_seed)
    )
    write_supervision(paths["docs"], Supervision(kind="docs", labeled_docs=labeled))

    pipeline.corpus.path = str(paths["corpus"])
    pipeline.supervision.kind = supervision
    pipeline.supervision.path = str(paths[supervision])
    with open(paths["config"], "w", encoding="utf-8") as f:
        f.write(pipeline.to_yaml())
    logger.info(f"Wrote synthetic dataset to {out}")
    return paths
