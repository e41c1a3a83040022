"""Stateless HTTP facade over the recourse engine.

The model, schema, and default cost model are fixed at startup; every request
is a pure function of them plus the request body.  Per-request cost overrides
merge over the defaults without touching server state.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from ..cliques import EnumerationBudget
from ..costs import CostError, CostModel
from ..forest import Forest
from ..recourse import RecourseEngine, RecourseQuery, result_to_doc
from ..schema import SchemaError
from .models import (
    PredictRequest,
    PredictResponse,
    RecourseRequest,
    RecourseResponse,
    SchemaResponse,
)


@dataclass
class ServiceConfig:
    max_cliques: int = 50000
    workers: int = 1


def create_app(
    forest: Forest, default_costs: CostModel, config: ServiceConfig | None = None
) -> FastAPI:
    config = config or ServiceConfig()
    schema = forest.schema
    engine = RecourseEngine(forest, workers=config.workers)
    prepare_lock = threading.Lock()

    app = FastAPI(title="forest-recourse", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/schema", response_model=SchemaResponse)
    def get_schema() -> SchemaResponse:
        return SchemaResponse(
            features=schema.to_doc()["features"],
            default_costs=default_costs.to_doc(),
            forest_k=forest.k,
            clique_size=engine.clique_size,
        )

    @app.post("/predict", response_model=PredictResponse)
    def post_predict(body: PredictRequest) -> PredictResponse:
        try:
            v = schema.encode(body.record)
        except SchemaError as e:
            raise HTTPException(status_code=400, detail=str(e)) from None
        result = forest.predict(v)
        return PredictResponse(predicted_class=result.predicted_class, votes=list(result.votes))

    @app.post("/recourse", response_model=RecourseResponse)
    def post_recourse(body: RecourseRequest) -> RecourseResponse:
        started = time.monotonic()
        try:
            v = schema.encode(body.record)
        except SchemaError as e:
            raise HTTPException(status_code=400, detail=str(e)) from None
        try:
            costs = (
                CostModel.from_doc(schema, body.cost_overrides, base=default_costs)
                if body.cost_overrides
                else default_costs
            )
        except CostError as e:
            raise HTTPException(status_code=400, detail=str(e)) from None
        budget = EnumerationBudget(max_cliques=config.max_cliques, wall_time_ms=body.budget_ms)
        query = RecourseQuery(
            v, target_class=body.target_class, max_results=body.max_results, budget=budget
        )
        # Region enumeration for an uncapped budget is cached per class; the
        # lock only serializes the first build, never steady-state queries.
        with prepare_lock:
            if body.budget_ms is None:
                engine.regions(body.target_class, budget)
        result = engine.find(query, costs)
        if not result.plans:
            elapsed_ms = (time.monotonic() - started) * 1000.0
            if body.budget_ms is not None and (not result.exhausted or elapsed_ms > body.budget_ms):
                raise HTTPException(
                    status_code=504,
                    detail=f"budget of {body.budget_ms} ms exceeded with zero plans found",
                )
            raise HTTPException(status_code=422, detail=result.status)
        return RecourseResponse.model_validate(result_to_doc(result, schema))

    return app
