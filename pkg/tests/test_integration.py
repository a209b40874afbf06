"""Integration tests for end-to-end workflow."""

import json
from pathlib import Path

import pytest

from demo.cli import main
from src.core.config import STAGES, PipelineConfig, SyntheticConfig
from src.core.exceptions import (
    EXIT_MISSING_ARTIFACT,
    EXIT_OK,
    EXIT_VALIDATION,
    ConfigValidationError,
)
from src.core.graph import run_pipeline, run_stage
from src.database.artifact_store import (
    CHECKPOINT_FINAL,
    CHECKPOINT_PRETRAIN,
    EMBEDDINGS,
    KEYWORDS,
    MANIFEST,
    METRICS,
    METRICS_PRETRAIN,
    PREDICTIONS,
    PSEUDO_DOCS,
    SELF_TRAIN_REPORT,
    VMF,
)
from src.services.synthetic_corpus import write_synthetic_dataset

SMALL_OVERRIDES = {
    "embedding": {"skipgram": {"dim": 16, "epochs": 5}},
    "generator": {"beta": 30, "gamma": 20, "doc_length": 30},
    "classifier": {"kind": "bag_of_embeddings"},
    "train": {"learning_rate": 0.3, "batch_size": 32},
    "self_train": {"update_interval": 3, "max_iterations": 3, "pretrain_epochs": 10},
}


def _merge(base: dict, overrides: dict) -> dict:
    for key, value in overrides.items():
        if isinstance(value, dict):
            _merge(base.setdefault(key, {}), value)
        else:
            base[key] = value
    return base


def _small_config(tmp_path: Path, supervision: str = "keywords", **overrides) -> PipelineConfig:
    paths = write_synthetic_dataset(
        tmp_path / "data", SyntheticConfig(docs_per_class=40), supervision=supervision
    )
    data = PipelineConfig.from_yaml(paths["config"]).model_dump(mode="json")
    _merge(data, SMALL_OVERRIDES)
    _merge(data, overrides)
    data["output_dir"] = str(tmp_path / "run")
    return PipelineConfig.model_validate(data)


def _write_yaml(config: PipelineConfig, path: Path) -> str:
    path.write_text(config.to_yaml(), encoding="utf-8")
    return str(path)


def test_synth_command_writes_dataset(tmp_path):
    """Test the synthetic corpus command and the config it writes."""
    out = tmp_path / "synthetic"
    assert main(["synth", "--output-dir", str(out), "--docs-per-class", "20"]) == EXIT_OK

    lines = (out / "corpus.tsv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 60
    assert {line.split("\t")[0] for line in lines} == {"0", "1", "2"}
    assert len((out / "keywords.tsv").read_text(encoding="utf-8").splitlines()) == 3
    assert (out / "labels.txt").read_text(encoding="utf-8").split() == [
        "sports",
        "politics",
        "science",
    ]
    config = PipelineConfig.from_yaml(out / "pipeline.yaml")
    assert config.supervision.kind == "keywords"


def test_synthetic_config_keeps_library_defaults(tmp_path):
    """Test the synthetic YAML only shrinks the pseudo-document count and length."""
    paths = write_synthetic_dataset(tmp_path / "data", SyntheticConfig(docs_per_class=10))
    config = PipelineConfig.from_yaml(paths["config"])
    defaults = PipelineConfig()

    assert config.generator.beta == 100
    assert config.generator.doc_length == 50
    assert config.generator.alpha == defaults.generator.alpha
    assert config.generator.gamma == defaults.generator.gamma
    assert config.corpus.format == "labeled"
    assert config.corpus.min_count == defaults.corpus.min_count
    for section in ("embedding", "seeds", "classifier", "train", "self_train"):
        assert getattr(config, section) == getattr(defaults, section), section
    assert config.rng_seed == defaults.rng_seed


def test_pipeline_writes_all_artifacts(tmp_path):
    """Test that a full run completes every stage and writes every artifact."""
    config = _small_config(tmp_path)
    state = run_pipeline(config)

    assert state["errors"] == []
    assert state["metadata"]["completed_stages"] == list(STAGES)
    run_dir = Path(config.output_dir)
    for name in (EMBEDDINGS, KEYWORDS, VMF, CHECKPOINT_PRETRAIN, CHECKPOINT_FINAL,
                 SELF_TRAIN_REPORT, PREDICTIONS, METRICS, METRICS_PRETRAIN, MANIFEST):
        assert (run_dir / name).is_file(), name
    assert not (run_dir / PSEUDO_DOCS).exists()

    manifest = json.loads((run_dir / MANIFEST).read_text(encoding="utf-8"))
    assert manifest["master_seed"] == config.rng_seed
    assert set(manifest["completed_stages"]) == set(STAGES)
    assert config.corpus.path in manifest["inputs"]

    metrics = json.loads((run_dir / METRICS).read_text(encoding="utf-8"))
    assert metrics["seed"] == config.rng_seed
    assert 0.0 <= metrics["micro_f1"] <= 1.0
    assert (run_dir / PREDICTIONS).read_text(encoding="utf-8").startswith(
        f"# seed={config.rng_seed}\n"
    )


def test_pipeline_is_deterministic(tmp_path):
    """Test that the same config and seed reproduce the predictions byte for byte."""
    config = _small_config(tmp_path)
    run_pipeline(config)
    first = (Path(config.output_dir) / PREDICTIONS).read_bytes()

    rerun = config.model_copy(update={"output_dir": str(tmp_path / "rerun")})
    run_pipeline(rerun)
    assert (Path(rerun.output_dir) / PREDICTIONS).read_bytes() == first


def test_eval_stage_reproduces_pipeline_metrics(tmp_path):
    """Test that scoring the predictions file matches the pipeline's metrics exactly."""
    config = _small_config(tmp_path)
    run_pipeline(config)
    metrics_path = Path(config.output_dir) / METRICS
    expected = metrics_path.read_bytes()
    metrics_path.unlink()

    state = run_stage(config, "eval")
    assert state["errors"] == []
    assert metrics_path.read_bytes() == expected


def test_pretrain_only_variant(tmp_path):
    """Test that disabling self-training scores the pre-trained model."""
    config = _small_config(tmp_path, self_train={"enabled": False})
    state = run_pipeline(config)

    assert state["errors"] == []
    assert "selftrain" not in state["metadata"]["completed_stages"]
    run_dir = Path(config.output_dir)
    assert not (run_dir / SELF_TRAIN_REPORT).exists()
    final = json.loads((run_dir / METRICS).read_text(encoding="utf-8"))
    pretrained = json.loads((run_dir / METRICS_PRETRAIN).read_text(encoding="utf-8"))
    assert final["micro_f1"] == pretrained["micro_f1"]


def test_stage_by_stage_run(tmp_path):
    """Test running every stage separately against one run directory."""
    config = _small_config(tmp_path)
    for stage in STAGES:
        state = run_stage(config, stage)
        assert state["errors"] == [], stage

    run_dir = Path(config.output_dir)
    pseudo_lines = (run_dir / PSEUDO_DOCS).read_text(encoding="utf-8").splitlines()
    assert pseudo_lines[0] == f"# seed={config.rng_seed}"
    assert len(pseudo_lines) - 1 == 3 * config.generator.beta

    manifest = json.loads((run_dir / MANIFEST).read_text(encoding="utf-8"))
    assert manifest["completed_stages"] == list(STAGES)


@pytest.mark.parametrize("supervision", ["labels", "docs"])
def test_other_supervision_kinds(tmp_path, supervision):
    """Test label-name and labeled-document supervision end to end."""
    config = _small_config(tmp_path, supervision=supervision)
    state = run_pipeline(config)
    assert state["errors"] == []
    assert state["keywords"].n_classes == 3


def test_missing_supervision_file_fails_validation(tmp_path):
    """Test that a missing supervision file stops the run before any compute."""
    config = _small_config(tmp_path)
    config.supervision.path = str(tmp_path / "absent.tsv")
    path = _write_yaml(config, tmp_path / "config.yaml")

    assert main(["pipeline", "--config", path]) == EXIT_VALIDATION
    assert not (Path(config.output_dir) / EMBEDDINGS).exists()


def test_unknown_stage_is_rejected(tmp_path):
    """Test that run_stage refuses a name outside the stage list."""
    with pytest.raises(ConfigValidationError):
        run_stage(PipelineConfig(output_dir=str(tmp_path / "run")), "finetune")


def test_missing_config_file(tmp_path):
    """Test that an absent config file is a validation error."""
    assert main(["pipeline", "--config", str(tmp_path / "nope.yaml")]) == EXIT_VALIDATION


def test_selftrain_stage_without_checkpoint(tmp_path, capsys):
    """Test that a stage run before its prerequisite names the missing artifact."""
    config = _small_config(tmp_path)
    path = _write_yaml(config, tmp_path / "config.yaml")

    assert main(["stage", "selftrain", "--config", path]) == EXIT_MISSING_ARTIFACT
    assert "MissingArtifact" in capsys.readouterr().err


def test_cli_pipeline_and_inspect(tmp_path, capsys):
    """Test the pipeline command with overrides and the inspect command."""
    config = _small_config(tmp_path)
    path = _write_yaml(config, tmp_path / "config.yaml")
    out = tmp_path / "cli_run"

    code = main(["pipeline", "--config", path, "--seed", "7", "--dump-pseudo",
                 "--output-dir", str(out)])
    assert code == EXIT_OK
    assert "Micro-F1" in capsys.readouterr().out
    assert (out / PSEUDO_DOCS).is_file()
    assert json.loads((out / METRICS).read_text(encoding="utf-8"))["seed"] == 7

    assert main(["inspect", str(out / METRICS)]) == EXIT_OK
    assert "macro_f1" in capsys.readouterr().out
    assert main(["inspect", str(out / CHECKPOINT_FINAL)]) == EXIT_OK
    assert "bag_of_embeddings" in capsys.readouterr().out


def test_sweep_command(tmp_path):
    """Test the generator parameter study writes one row per value."""
    config = _small_config(tmp_path, self_train={"enabled": False})
    path = _write_yaml(config, tmp_path / "config.yaml")

    assert main(["sweep", "--config", path, "--param", "alpha", "--values", "0.5", "1.0"]) == 0
    rows = [
        json.loads(line)
        for line in (Path(config.output_dir) / "sweep.jsonl").read_text().splitlines()
    ]
    assert [row["value"] for row in rows] == [0.5, 1.0]
    assert all(row["micro_f1"] is not None for row in rows)


@pytest.mark.slow
def test_full_synthetic_run_with_cli(tmp_path):
    """Test the default synthetic corpus with the word CNN reaches high accuracy."""
    data = tmp_path / "synthetic"
    assert main(["synth", "--output-dir", str(data)]) == EXIT_OK
    code = main(["pipeline", "--config", str(data / "pipeline.yaml"), "--single-thread"])
    assert code == EXIT_OK

    run_dir = data / "run"
    metrics = json.loads((run_dir / METRICS).read_text(encoding="utf-8"))
    pretrained = json.loads((run_dir / METRICS_PRETRAIN).read_text(encoding="utf-8"))
    assert metrics["micro_f1"] >= 0.90
    assert metrics["micro_f1"] >= pretrained["micro_f1"] - 0.02
