"""LangGraph workflow definitions for the classification pipeline."""

import logging
from typing import Callable, Dict

from langgraph.graph import END, StateGraph

from src.agents.embedding_agent import embedding_agent
from src.agents.evaluation_agent import evaluation_agent
from src.agents.generation_agent import generation_agent
from src.agents.ingestion_agent import ingestion_agent
from src.agents.pretrain_agent import pretrain_agent
from src.agents.seed_agent import seed_agent
from src.agents.self_training_agent import self_training_agent
from src.agents.vmf_agent import vmf_agent
from src.core.config import STAGES, PipelineConfig
from src.core.exceptions import ConfigValidationError
from src.core.state import PipelineState, create_pipeline_state, create_stage_state
from src.database.artifact_store import ArtifactStore
from src.utils.validators import validate_stage_name

logger = logging.getLogger(__name__)

STAGE_AGENTS: Dict[str, Callable[[PipelineState], PipelineState]] = {
    "embed": embedding_agent,
    "seeds": seed_agent,
    "vmf": vmf_agent,
    "generate": generation_agent,
    "pretrain": pretrain_agent,
    "selftrain": self_training_agent,
    "eval": evaluation_agent,
}


def should_continue(state: PipelineState) -> str:
    """Stop the workflow at the first stage that recorded an error.

    Args:
        state: Current pipeline state.

    Returns:
        "continue" if no error has been recorded, "stop" otherwise.
    """
    if state.get("errors"):
        return "stop"
    return "continue"


def after_pretrain(state: PipelineState) -> str:
    """Skip self-training for the pre-training-only variant."""
    if state.get("errors"):
        return "stop"
    if not state["config"].self_train.enabled:
        return "eval"
    return "selftrain"


def create_pipeline_graph() -> StateGraph:
    """Create the LangGraph workflow running every stage in order.

    Returns:
        Compiled StateGraph for a full pipeline run.
    """
    workflow = StateGraph(PipelineState)

    workflow.add_node("ingestion", ingestion_agent)
    for stage in STAGES:
        workflow.add_node(stage, STAGE_AGENTS[stage])

    workflow.set_entry_point("ingestion")

    chain = ["ingestion", "embed", "seeds", "vmf", "generate"]
    for current, following in zip(chain, chain[1:] + ["pretrain"]):
        workflow.add_conditional_edges(
            current, should_continue, {"continue": following, "stop": END}
        )
    workflow.add_conditional_edges(
        "pretrain",
        after_pretrain,
        {"selftrain": "selftrain", "eval": "eval", "stop": END},
    )
    workflow.add_conditional_edges("selftrain", should_continue, {"continue": "eval", "stop": END})
    workflow.add_edge("eval", END)

    return workflow.compile()


def create_stage_graph(stage: str) -> StateGraph:
    """Create the LangGraph workflow running a single stage.

    The corpus is always re-ingested first; every other input comes from the
    run directory.

    Args:
        stage: One of ``STAGES``.

    Returns:
        Compiled StateGraph for the stage.
    """
    workflow = StateGraph(PipelineState)

    workflow.add_node("ingestion", ingestion_agent)
    workflow.add_node(stage, STAGE_AGENTS[stage])

    workflow.set_entry_point("ingestion")
    workflow.add_conditional_edges("ingestion", should_continue, {"continue": stage, "stop": END})
    workflow.add_edge(stage, END)

    return workflow.compile()


# Global graph instance
_pipeline_graph = None


def get_pipeline_graph():
    """Get or create the pipeline graph."""
    global _pipeline_graph
    if _pipeline_graph is None:
        _pipeline_graph = create_pipeline_graph()
    return _pipeline_graph


def run_pipeline(config: PipelineConfig) -> PipelineState:
    """Run every stage of the pipeline and return the final state."""
    ArtifactStore(config.output_dir, config.rng_seed).write_config(config)
    return get_pipeline_graph().invoke(create_pipeline_state(config))


def run_stage(config: PipelineConfig, stage: str) -> PipelineState:
    """Run one stage against the configured run directory and return the final state.

    Raises:
        ConfigValidationError: If ``stage`` is not a pipeline stage.
    """
    is_valid, error_msg = validate_stage_name(stage)
    if not is_valid:
        raise ConfigValidationError(error_msg)
    return create_stage_graph(stage).invoke(create_stage_state(config, stage))
