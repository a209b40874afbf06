"""CLI interface for the seed-driven text classifier."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import torch
from pydantic import ValidationError

from src.classifiers.base import checkpoint_info
from src.core.config import STAGES, PipelineConfig, SyntheticConfig, settings
from src.core.exceptions import (
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_VALIDATION,
    ConfigValidationError,
    SeedClassifierError,
)
from src.core.graph import run_pipeline, run_stage
from src.core.state import PipelineState
from src.services.synthetic_corpus import write_synthetic_dataset
from src.utils.validators import validate_pipeline_config

logger = logging.getLogger(__name__)

INSPECT_ROWS = 20


def load_config(args: argparse.Namespace) -> PipelineConfig:
    """Load the YAML config and apply command-line overrides.

    Raises:
        ConfigValidationError: If the file is missing or fails validation.
    """
    if not Path(args.config).is_file():
        raise ConfigValidationError(f"Config file not found: {args.config}")
    try:
        config = PipelineConfig.from_yaml(args.config)
    except ValidationError as e:
        raise ConfigValidationError(f"Invalid config {args.config}: {e}")

    if getattr(args, "seed", None) is not None:
        config.rng_seed = args.seed
    if settings.workers > 1:
        config.workers = settings.workers
    if getattr(args, "single_thread", False) or settings.single_thread:
        config.single_thread = True
    if getattr(args, "dump_pseudo", False):
        config.dump_pseudo = True
    if getattr(args, "output_dir", None):
        config.output_dir = args.output_dir
    if config.single_thread:
        torch.set_num_threads(1)
    return config


def report_state(state: PipelineState) -> int:
    """Print a run summary and return its exit code."""
    if state.get("errors"):
        for error in state["errors"]:
            print(f"Error: {error}", file=sys.stderr)
        return state.get("exit_code", EXIT_RUNTIME)

    completed = state["metadata"].get("completed_stages", [])
    print(f"Completed stages: {', '.join(completed)}")
    print(f"Artifacts written to {state['config'].output_dir}")
    metrics = state.get("metrics")
    if metrics:
        print(f"Macro-F1: {metrics['macro_f1']:.4f}")
        print(f"Micro-F1: {metrics['micro_f1']:.4f}")
    return EXIT_OK


def pipeline_command(args: argparse.Namespace) -> int:
    """Handle pipeline command."""
    config = load_config(args)
    is_valid, error_msg = validate_pipeline_config(config)
    if not is_valid:
        raise ConfigValidationError(error_msg)
    return report_state(run_pipeline(config))


def stage_command(args: argparse.Namespace) -> int:
    """Handle stage command."""
    config = load_config(args)
    is_valid, error_msg = validate_pipeline_config(config)
    if not is_valid:
        raise ConfigValidationError(error_msg)
    return report_state(run_stage(config, args.stage))


def synth_command(args: argparse.Namespace) -> int:
    """Handle synth command."""
    synthetic = SyntheticConfig(
        n_classes=args.classes,
        docs_per_class=args.docs_per_class,
        rng_seed=args.seed,
    )
    paths = write_synthetic_dataset(args.output_dir, synthetic, supervision=args.supervision)
    for role, path in paths.items():
        print(f"{role:>9}: {path}")
    return EXIT_OK


def sweep_command(args: argparse.Namespace) -> int:
    """Handle sweep command: rerun the pipeline once per generator parameter value."""
    base = load_config(args)
    is_valid, error_msg = validate_pipeline_config(base)
    if not is_valid:
        raise ConfigValidationError(error_msg)

    sweep_dir = Path(base.output_dir)
    sweep_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for raw in args.values:
        value = float(raw) if args.param == "alpha" else int(float(raw))
        data = base.model_dump(mode="json")
        data["generator"].update({"parameter_study": True, args.param: value})
        data["output_dir"] = str(sweep_dir / f"{args.param}_{raw}")
        try:
            config = PipelineConfig.model_validate(data)
        except ValidationError as e:
            raise ConfigValidationError(f"Invalid {args.param}={raw}: {e}")

        state = run_pipeline(config)
        if state.get("errors"):
            return report_state(state)
        metrics = state.get("metrics") or {}
        row = {
            "param": args.param,
            "value": value,
            "macro_f1": metrics.get("macro_f1"),
            "micro_f1": metrics.get("micro_f1"),
        }
        rows.append(row)
        print(json.dumps(row))

    with open(sweep_dir / "sweep.jsonl", "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True) + "\n")
    return EXIT_OK


def _print_lines(path: Path, limit: int) -> None:
    with open(path, "r", encoding="utf-8") as f:
        for i, line in enumerate(f):
            if i >= limit:
                print("...")
                break
            print(line.rstrip("\n"))


def inspect_command(args: argparse.Namespace) -> int:
    """Handle inspect command: pretty-print any run artifact."""
    path = Path(args.path)
    if not path.is_file():
        raise ConfigValidationError(f"No such artifact: {path}")

    print("\n" + "=" * 60)
    print(f"Artifact: {path}")
    print("=" * 60)
    if path.suffix == ".json":
        print(json.dumps(json.loads(path.read_text(encoding="utf-8")), indent=2, sort_keys=True))
    elif path.suffix == ".jsonl":
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    print(json.dumps(json.loads(line), sort_keys=True))
    elif path.suffix == ".pt":
        info = checkpoint_info(path)
        print(json.dumps(info, indent=2, sort_keys=True, default=str))
    elif path.suffix == ".txt" and path.name.startswith("embeddings"):
        with open(path, "r", encoding="utf-8") as f:
            header = f.readline().split()
        print(f"Vocabulary size: {header[0]}, dimension: {header[1]}")
        _print_lines(path, args.rows)
    else:
        _print_lines(path, args.rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Seed-driven weakly-supervised text classifier")
    parser.add_argument("--log-level", default=settings.log_level, help="Logging level")
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    def add_run_flags(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--config", required=True, help="Pipeline YAML config")
        sub.add_argument("--seed", type=int, help="Override the master seed")
        sub.add_argument(
            "--single-thread", action="store_true", help="Force the bit-reproducible path"
        )
        sub.add_argument("--dump-pseudo", action="store_true", help="Write pseudo documents")
        sub.add_argument("--output-dir", help="Override the run directory")

    # Pipeline command
    pipeline_parser = subparsers.add_parser("pipeline", help="Run every stage")
    add_run_flags(pipeline_parser)

    # Stage command
    stage_parser = subparsers.add_parser("stage", help="Run a single stage")
    stage_parser.add_argument("stage", choices=STAGES, help="Stage to run")
    add_run_flags(stage_parser)

    # Synth command
    synth_parser = subparsers.add_parser("synth", help="Write the synthetic corpus")
    synth_parser.add_argument("--output-dir", required=True, help="Directory to write into")
    synth_parser.add_argument("--classes", type=int, default=3, help="Number of classes")
    synth_parser.add_argument("--docs-per-class", type=int, default=500, help="Documents per class")
    synth_parser.add_argument(
        "--supervision",
        choices=["labels", "keywords", "docs"],
        default="keywords",
        help="Supervision the generated config uses",
    )
    synth_parser.add_argument("--seed", type=int, default=7, help="Corpus seed")

    # Inspect command
    inspect_parser = subparsers.add_parser("inspect", help="Pretty-print an artifact")
    inspect_parser.add_argument("path", help="Artifact file")
    inspect_parser.add_argument("--rows", type=int, default=INSPECT_ROWS, help="Rows to show")

    # Sweep command
    sweep_parser = subparsers.add_parser("sweep", help="Generator parameter study")
    add_run_flags(sweep_parser)
    sweep_parser.add_argument("--param", required=True, choices=["alpha", "beta", "gamma"])
    sweep_parser.add_argument("--values", required=True, nargs="+", help="Values to try")

    return parser


COMMANDS = {
    "pipeline": pipeline_command,
    "stage": stage_command,
    "synth": synth_command,
    "inspect": inspect_command,
    "sweep": sweep_command,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point; returns the process exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    if not args.command:
        parser.print_help()
        return EXIT_VALIDATION

    try:
        return COMMANDS[args.command](args)
    except SeedClassifierError as e:
        logger.error(f"Error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
