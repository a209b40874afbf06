"""Run-directory persistence for stage artifacts and the run manifest.

Plain-text artifacts (TSV, JSON lines) start with a ``# seed=<master>`` or
``{"_meta": ...}`` header line; JSON artifacts carry a ``seed`` field;
checkpoints carry it in their metadata.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.classifiers.base import NeuralClassifier
from src.core.config import STAGES, PipelineConfig
from src.core.exceptions import InvalidCorpusFormat, MissingArtifact
from src.core.schemas import (
    ClassKeywordsSchema,
    ClassVmfSchema,
    KeywordsArtifact,
    MetricsArtifact,
    RunManifest,
    VmfArtifact,
)
from src.services.corpus import Vocabulary
from src.services.embedding_service import EmbeddingMatrix, load_embeddings, save_embeddings
from src.services.pseudo_doc_service import PseudoDocument
from src.services.seed_service import ClassKeywords
from src.services.self_training import SelfTrainReport
from src.services.vmf import VmfDistribution

logger = logging.getLogger(__name__)

EMBEDDINGS = "embeddings.txt"
KEYWORDS = "keywords.json"
VMF = "vmf.json"
PSEUDO_DOCS = "pseudo_docs.tsv"
PSEUDO_LABELS = "pseudo_labels.jsonl"
CHECKPOINT_PRETRAIN = "checkpoint_pretrain.pt"
CHECKPOINT_FINAL = "checkpoint_final.pt"
SELF_TRAIN_REPORT = "self_train_report.jsonl"
PREDICTIONS = "predictions.tsv"
METRICS = "metrics.json"
METRICS_PRETRAIN = "metrics_pretrain.json"
MANIFEST = "manifest.json"
CONFIG = "config.yaml"

STAGE_VERSIONS = {stage: 1 for stage in STAGES}
PROBABILITY_FORMAT = "{:.10f}"


def file_sha256(path: Union[str, Path]) -> str:
    """SHA-256 hex digest of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _dump_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


class ArtifactStore:
    """Reads and writes the artifacts of one run directory.

    ``embeddings.txt`` is plain word2vec text with no seed header; its seed
    is the one recorded in ``manifest.json``.
    """

    def __init__(self, run_dir: Union[str, Path], master_seed: int):
        """Initialize the store.

        Args:
            run_dir: Run directory; created if missing.
            master_seed: Seed recorded in every artifact.
        """
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.master_seed = master_seed

    def path(self, name: str) -> Path:
        return self.run_dir / name

    def exists(self, name: str) -> bool:
        return self.path(name).is_file()

    def require(self, stage: str, name: str) -> Path:
        """Path of an artifact a stage consumes.

        Raises:
            MissingArtifact: If the file does not exist.
        """
        path = self.path(name)
        if not path.is_file():
            raise MissingArtifact(stage, name, str(path))
        return path

    def _seed_header(self) -> str:
        return f"# seed={self.master_seed}\n"

    def _meta_line(self, artifact: str) -> str:
        return json.dumps({"_meta": {"artifact": artifact, "seed": self.master_seed}}) + "\n"

    # Embeddings
    def write_embeddings(self, embeddings: EmbeddingMatrix) -> Path:
        """Export embeddings as word2vec text, with no seed header."""
        path = self.path(EMBEDDINGS)
        save_embeddings(path, embeddings)
        return path

    def read_embeddings(self, stage: str, vocabulary: Vocabulary) -> EmbeddingMatrix:
        return load_embeddings(self.require(stage, EMBEDDINGS), vocabulary)

    # Keywords
    def write_keywords(self, keywords: ClassKeywords, kind: str) -> Path:
        artifact = KeywordsArtifact(
            seed=self.master_seed,
            kind=kind,
            t_used=keywords.t_used,
            classes=[
                ClassKeywordsSchema(index=j, words=words) for j, words in enumerate(keywords.words)
            ],
        )
        path = self.path(KEYWORDS)
        path.write_text(_dump_json(artifact.model_dump()), encoding="utf-8")
        return path

    def read_keywords(self, stage: str, embeddings: EmbeddingMatrix) -> ClassKeywords:
        path = self.require(stage, KEYWORDS)
        artifact = KeywordsArtifact.model_validate_json(path.read_text(encoding="utf-8"))
        words = [entry.words for entry in sorted(artifact.classes, key=lambda c: c.index)]
        vectors = [np.vstack([embeddings.vector(w) for w in class_words]) for class_words in words]
        return ClassKeywords(words=words, vectors=vectors, t_used=artifact.t_used)

    # vMF parameters
    def write_vmf(self, distributions: Sequence[VmfDistribution]) -> Path:
        artifact = VmfArtifact(
            seed=self.master_seed,
            p=distributions[0].p,
            classes=[
                ClassVmfSchema(index=j, mu=dist.mu.tolist(), kappa=dist.kappa)
                for j, dist in enumerate(distributions)
            ],
        )
        path = self.path(VMF)
        path.write_text(_dump_json(artifact.model_dump()), encoding="utf-8")
        return path

    def read_vmf(self, stage: str) -> List[VmfDistribution]:
        path = self.require(stage, VMF)
        artifact = VmfArtifact.model_validate_json(path.read_text(encoding="utf-8"))
        return [
            VmfDistribution(mu=np.array(entry.mu, dtype=np.float64), kappa=entry.kappa)
            for entry in sorted(artifact.classes, key=lambda c: c.index)
        ]

    # Pseudo documents
    def write_pseudo_docs(
        self, documents: Sequence[PseudoDocument], vocabulary: Vocabulary
    ) -> Tuple[Path, Path]:
        """Write tokens as ``class<TAB>words`` and soft labels as JSON lines."""
        docs_path, labels_path = self.path(PSEUDO_DOCS), self.path(PSEUDO_LABELS)
        with open(docs_path, "w", encoding="utf-8") as f:
            f.write(self._seed_header())
            for doc in documents:
                words = " ".join(vocabulary.words[i] for i in doc.tokens)
                f.write(f"{doc.class_of_origin}\t{words}\n")
        with open(labels_path, "w", encoding="utf-8") as f:
            f.write(self._meta_line(PSEUDO_LABELS))
            for doc in documents:
                row = {"class": doc.class_of_origin, "label": doc.pseudo_label.tolist()}
                f.write(json.dumps(row) + "\n")
        logger.info(f"Wrote {len(documents)} pseudo documents to {docs_path}")
        return docs_path, labels_path

    def read_pseudo_docs(self, stage: str, vocabulary: Vocabulary) -> List[PseudoDocument]:
        docs_path = self.require(stage, PSEUDO_DOCS)
        labels_path = self.require(stage, PSEUDO_LABELS)
        with open(labels_path, "r", encoding="utf-8") as f:
            labels = [json.loads(line) for line in f if line.strip()]
        labels = [row for row in labels if "_meta" not in row]
        documents = []
        with open(docs_path, "r", encoding="utf-8") as f:
            rows = [line.rstrip("\n") for line in f if line.strip() and not line.startswith("#")]
        if len(rows) != len(labels):
            raise InvalidCorpusFormat(
                f"{docs_path} has {len(rows)} documents but {labels_path} has {len(labels)} labels"
            )
        for row, label in zip(rows, labels):
            head, words = row.split("\t", 1)
            tokens = np.array([vocabulary.index_of[w] for w in words.split()], dtype=np.int64)
            documents.append(
                PseudoDocument(
                    tokens=tokens,
                    class_of_origin=int(head),
                    pseudo_label=np.array(label["label"], dtype=np.float64),
                )
            )
        return documents

    # Checkpoints
    def write_checkpoint(self, classifier: NeuralClassifier, name: str, stage_seed: int) -> Path:
        path = self.path(name)
        classifier.save(path, metadata={"seed": self.master_seed, "stage_seed": stage_seed})
        return path

    def read_checkpoint(
        self, stage: str, name: str, classifier: NeuralClassifier, vocabulary: Vocabulary
    ) -> Dict:
        return classifier.load(self.require(stage, name), vocabulary.fingerprint())

    # Self-training report
    def write_report(self, report: SelfTrainReport) -> Path:
        path = self.path(SELF_TRAIN_REPORT)
        path.write_text(self._meta_line(SELF_TRAIN_REPORT) + report.to_jsonl(), encoding="utf-8")
        return path

    def read_report(self, stage: str) -> SelfTrainReport:
        return SelfTrainReport.read(self.require(stage, SELF_TRAIN_REPORT))

    # Predictions
    def write_predictions(self, doc_ids: Sequence[int], probabilities: np.ndarray) -> Path:
        """Write ``doc_id<TAB>argmax<TAB>p_1 ... p_m`` per document."""
        path = self.path(PREDICTIONS)
        labels = np.argmax(probabilities, axis=1)
        with open(path, "w", encoding="utf-8") as f:
            f.write(self._seed_header())
            for doc_id, label, row in zip(doc_ids, labels, probabilities):
                probs = " ".join(PROBABILITY_FORMAT.format(value) for value in row)
                f.write(f"{doc_id}\t{label}\t{probs}\n")
        return path

    def read_predictions(self, stage: str) -> Tuple[List[int], np.ndarray, np.ndarray]:
        """Read predictions back as ``(doc_ids, labels, probabilities)``."""
        path = self.require(stage, PREDICTIONS)
        doc_ids, labels, rows = [], [], []
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                if not line.strip() or line.startswith("#"):
                    continue
                doc_id, label, probs = line.rstrip("\n").split("\t")
                doc_ids.append(int(doc_id))
                labels.append(int(label))
                rows.append([float(v) for v in probs.split()])
        return doc_ids, np.array(labels, dtype=np.int64), np.array(rows, dtype=np.float64)

    # Metrics
    def write_metrics(self, metrics: Dict, pretrain: bool = False) -> Path:
        artifact = MetricsArtifact.model_validate({"seed": self.master_seed, **metrics})
        path = self.path(METRICS_PRETRAIN if pretrain else METRICS)
        path.write_text(_dump_json(artifact.model_dump(by_alias=True)), encoding="utf-8")
        return path

    def read_metrics(self, stage: str, pretrain: bool = False) -> MetricsArtifact:
        path = self.require(stage, METRICS_PRETRAIN if pretrain else METRICS)
        return MetricsArtifact.model_validate_json(path.read_text(encoding="utf-8"))

    # Manifest
    def read_manifest(self) -> Optional[RunManifest]:
        if not self.exists(MANIFEST):
            return None
        return RunManifest.model_validate_json(self.path(MANIFEST).read_text(encoding="utf-8"))

    def record_stage(
        self,
        config: PipelineConfig,
        stage: str,
        inputs: Optional[Sequence[Union[str, Path]]] = None,
    ) -> RunManifest:
        """Add a completed stage to the manifest and refresh the artifact list."""
        manifest = self.read_manifest() or RunManifest(master_seed=self.master_seed)
        manifest.master_seed = self.master_seed
        manifest.stage_seeds = {s: config.stage_seed(s) for s in STAGES}
        manifest.stage_versions = dict(STAGE_VERSIONS)
        if stage not in manifest.completed_stages:
            manifest.completed_stages.append(stage)
        for path in inputs or []:
            if path and Path(path).is_file():
                manifest.inputs[str(path)] = file_sha256(path)
        manifest.config = config.model_dump(mode="json")
        manifest.artifacts = sorted(
            p.name for p in self.run_dir.iterdir() if p.is_file() and p.name != MANIFEST
        )
        self.path(MANIFEST).write_text(_dump_json(manifest.model_dump()), encoding="utf-8")
        return manifest

    def write_config(self, config: PipelineConfig) -> Path:
        path = self.path(CONFIG)
        path.write_text(config.to_yaml(), encoding="utf-8")
        return path
