"""Pydantic schemas for the JSON artifacts of a run directory."""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class ClassKeywordsSchema(BaseModel):
    """Keyword list of one class."""

    index: int = Field(..., description="Class index", ge=0)
    words: List[str] = Field(..., description="Keywords ordered by relevance", min_length=1)


class KeywordsArtifact(BaseModel):
    """Schema for keywords.json."""

    seed: int
    kind: str = Field(..., description="Supervision kind the keywords came from")
    t_used: int = Field(..., ge=1)
    classes: List[ClassKeywordsSchema]


class ClassVmfSchema(BaseModel):
    """Fitted distribution of one class."""

    index: int = Field(..., ge=0)
    mu: List[float]
    kappa: float = Field(..., ge=0.0)


class VmfArtifact(BaseModel):
    """Schema for vmf.json."""

    seed: int
    p: int = Field(..., ge=2)
    classes: List[ClassVmfSchema]


class PerClassMetrics(BaseModel):
    """Scores of one class."""

    model_config = {"populate_by_name": True}

    class_index: int = Field(..., alias="class")
    precision: float = Field(..., ge=0.0, le=1.0)
    recall: float = Field(..., ge=0.0, le=1.0)
    f1: float = Field(..., ge=0.0, le=1.0)
    support: int = Field(..., ge=0)


class MetricsArtifact(BaseModel):
    """Schema for metrics.json and metrics_pretrain.json."""

    seed: int
    macro_f1: float = Field(..., ge=0.0, le=1.0)
    micro_f1: float = Field(..., ge=0.0, le=1.0)
    per_class: List[PerClassMetrics]


class RunManifest(BaseModel):
    """Schema for manifest.json: enough to reproduce the run."""

    master_seed: int
    stage_seeds: Dict[str, int] = Field(default_factory=dict)
    stage_versions: Dict[str, int] = Field(default_factory=dict)
    completed_stages: List[str] = Field(default_factory=list)
    inputs: Dict[str, str] = Field(default_factory=dict, description="Input path -> SHA-256")
    artifacts: List[str] = Field(default_factory=list)
    config: Optional[dict] = None
