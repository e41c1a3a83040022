from __future__ import annotations

import numpy as np
import pytest

from forest_recourse.costs import CostModel
from forest_recourse.forest import ForestParams, train
from forest_recourse.german_credit import default_costs_path, load_german_credit
from forest_recourse.recourse import RecourseEngine


@pytest.fixture(scope="session")
def german():
    X, y, schema = load_german_credit()
    return X, y, schema


@pytest.fixture(scope="session")
def german_forest(german):
    X, y, schema = german
    return train(X, y, schema, ForestParams(k=10, seed=42))


@pytest.fixture(scope="session")
def german_costs(german):
    _, _, schema = german
    return CostModel.load(default_costs_path(), schema)


@pytest.fixture(scope="session")
def german_engine(german_forest):
    return RecourseEngine(german_forest)


@pytest.fixture(scope="session")
def rejected_rows(german, german_forest):
    """Encoded German rows the model predicts as class 0 (bad)."""
    X, _, _ = german
    pred = german_forest.predict_batch(X)
    return X[pred == 0]
