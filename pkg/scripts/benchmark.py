"""Benchmark script for the acceptance timings and synthetic-corpus quality."""

import json
import logging
import sys
import tempfile
import time
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import torch

from src.core.config import PipelineConfig, SyntheticConfig
from src.core.graph import run_pipeline
from src.services import vmf
from src.services.corpus import BackgroundDistribution
from src.services.embedding_service import EmbeddingMatrix, normalize_rows
from src.services.pseudo_doc_service import word_distribution
from src.services.synthetic_corpus import write_synthetic_dataset

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def benchmark_vmf_round_trip() -> bool:
    """Sample 10,000 points at kappa=50, p=10 and re-estimate them."""
    logger.info("Benchmarking vMF sample/estimate round trip...")
    rng = np.random.default_rng(0)
    mu = normalize_rows(rng.normal(size=(1, 10)))[0]

    start = time.perf_counter()
    samples = vmf.sample(vmf.VmfDistribution(mu=mu, kappa=50.0), 10_000, rng)
    fitted = vmf.estimate(samples)
    elapsed = time.perf_counter() - start

    cosine = float(fitted.mu @ mu)
    kappa_error = abs(fitted.kappa - 50.0) / 50.0
    logger.info(f"  cos(mu_hat, mu) = {cosine:.6f}")
    logger.info(f"  kappa_hat = {fitted.kappa:.3f} (relative error {kappa_error:.4f})")
    logger.info(f"  Time: {elapsed:.3f}s")
    return cosine >= 0.999 and kappa_error <= 0.10 and elapsed < 5.0


def benchmark_word_distribution() -> bool:
    """Check mixture normalization on 100 random document vectors."""
    logger.info("Benchmarking pseudo-document word distributions...")
    rng = np.random.default_rng(1)
    vocab_size, dim = 1000, 20
    embeddings = EmbeddingMatrix(
        words=tuple(f"w{i:04d}" for i in range(vocab_size)),
        vectors=normalize_rows(rng.normal(size=(vocab_size, dim))),
    )
    counts = rng.integers(1, 100, size=vocab_size).astype(np.float64)
    background = BackgroundDistribution(probs=counts / counts.sum())

    worst = 0.0
    for _ in range(100):
        d = normalize_rows(rng.normal(size=(1, dim)))[0]
        probs = word_distribution(d, embeddings, background, alpha=0.2, gamma=50)
        worst = max(worst, abs(probs.sum() - 1.0))
    logger.info(f"  Worst normalization error: {worst:.3e}")
    return worst <= 1e-9


def benchmark_synthetic_pipeline() -> bool:
    """Full pipeline on the bundled synthetic corpus with keyword supervision."""
    logger.info("Benchmarking end-to-end synthetic pipeline...")
    torch.set_num_threads(1)
    with tempfile.TemporaryDirectory() as tmp:
        paths = write_synthetic_dataset(tmp, SyntheticConfig(), supervision="keywords")
        config = PipelineConfig.from_yaml(paths["config"])

        start = time.perf_counter()
        state = run_pipeline(config)
        elapsed = time.perf_counter() - start

        if state.get("errors"):
            logger.error(f"  Pipeline failed: {state['errors']}")
            return False
        metrics = state["metrics"]
        pretrain_path = Path(config.output_dir) / "metrics_pretrain.json"
        pretrain_metrics = json.loads(pretrain_path.read_text(encoding="utf-8"))

    logger.info(f"  Pre-training micro-F1: {pretrain_metrics['micro_f1']:.4f}")
    logger.info(f"  Final micro-F1: {metrics['micro_f1']:.4f}")
    logger.info(f"  Final macro-F1: {metrics['macro_f1']:.4f}")
    logger.info(f"  Time: {elapsed:.1f}s")
    return (
        metrics["micro_f1"] >= 0.90
        and metrics["micro_f1"] >= pretrain_metrics["micro_f1"] - 0.02
        and elapsed < 300
    )


def main():
    """Run all benchmarks."""
    logger.info("=" * 60)
    logger.info("Seed Text Classifier - Benchmarks")
    logger.info("=" * 60)

    results = {
        "vmf_round_trip": benchmark_vmf_round_trip(),
        "word_distribution": benchmark_word_distribution(),
        "synthetic_pipeline": benchmark_synthetic_pipeline(),
    }

    logger.info("=" * 60)
    logger.info("Benchmark Summary")
    logger.info("=" * 60)
    for name, passed in results.items():
        status = "PASS" if passed else "FAIL"
        logger.info(f"  {name}: {status}")

    all_passed = all(results.values())
    logger.info("=" * 60)
    logger.info(f"Overall: {'PASS' if all_passed else 'FAIL'}")
    logger.info("=" * 60)

    return 0 if all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
