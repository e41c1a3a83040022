"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class SchemaResponse(BaseModel):
    features: list[dict[str, Any]]
    default_costs: dict[str, Any]
    forest_k: int
    clique_size: int


class PredictRequest(BaseModel):
    record: dict[str, Any]


class PredictResponse(BaseModel):
    predicted_class: int
    votes: list[int]


class RecourseRequest(BaseModel):
    record: dict[str, Any]
    target_class: int = Field(ge=0, le=1)
    cost_overrides: dict[str, Any] | None = None
    max_results: int = Field(default=5, ge=1)
    budget_ms: float | None = Field(default=None, gt=0)


class ChangeModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    attribute: str
    kind: str
    from_value: float | str = Field(alias="from", serialization_alias="from")
    to_value: float | str = Field(alias="to", serialization_alias="to")
    cost: float


class PlanModel(BaseModel):
    record: dict[str, Any]
    changes: list[ChangeModel]
    total_cost: float
    verified: bool
    witness: dict[str, Any]


class RecourseResponse(BaseModel):
    plans: list[PlanModel]
    exhausted: bool
    status: str
    stats: dict[str, Any]


class ErrorResponse(BaseModel):
    detail: str
