import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from forest_recourse.costs import CostModel
from forest_recourse.forest import ForestParams, train
from forest_recourse.german_credit import default_costs_path, load_german_credit
from forest_recourse.service.app import ServiceConfig, create_app


@pytest.fixture(scope="module")
def setup():
    X, y, schema = load_german_credit()
    forest = train(X, y, schema, ForestParams(k=10, seed=42))
    costs = CostModel.load(default_costs_path(), schema)
    app = create_app(forest, costs, ServiceConfig(max_cliques=2000))
    client = TestClient(app)
    pred = forest.predict_batch(X)
    return client, forest, schema, X, pred


def record_of(schema, row):
    return schema.decode(row)


class TestSchemaEndpoint:
    def test_full_schema_with_defaults(self, setup):
        client, forest, schema, X, _ = setup
        r = client.get("/schema")
        assert r.status_code == 200
        body = r.json()
        assert len(body["features"]) == 20
        assert sum(1 for f in body["features"] if f["kind"] == "categorical") == 13
        assert body["forest_k"] == 10 and body["clique_size"] == 6
        assert body["default_costs"]["features"]

    def test_categories_in_declaration_order(self, setup):
        client, _, schema, _, _ = setup
        body = client.get("/schema").json()
        by_name = {f["name"]: f for f in body["features"]}
        for g in schema.groups:
            assert by_name[g.name]["categories"] == list(g.categories)

    def test_response_reserializes_identically(self, setup):
        client, _, _, _, _ = setup
        a = client.get("/schema").json()
        assert json.loads(json.dumps(a)) == a
        b = client.get("/schema").json()
        assert a == b


class TestPredictEndpoint:
    def test_matches_offline_predict(self, setup):
        client, forest, schema, X, _ = setup
        for row in X[:10]:
            r = client.post("/predict", json={"record": record_of(schema, row)})
            assert r.status_code == 200
            body = r.json()
            offline = forest.predict(row)
            assert body["predicted_class"] == offline.predicted_class
            assert tuple(body["votes"]) == offline.votes

    def test_votes_sum_to_k(self, setup):
        client, forest, schema, X, _ = setup
        body = client.post("/predict", json={"record": record_of(schema, X[3])}).json()
        assert sum(body["votes"]) == forest.k

    def test_malformed_category_names_attribute(self, setup):
        client, _, schema, X, _ = setup
        record = record_of(schema, X[0])
        record["housing"] = "A999"
        r = client.post("/predict", json={"record": record})
        assert r.status_code == 400
        assert "housing" in r.json()["detail"]

    def test_missing_attribute_named(self, setup):
        client, _, schema, X, _ = setup
        record = record_of(schema, X[0])
        del record["age_years"]
        r = client.post("/predict", json={"record": record})
        assert r.status_code == 400
        assert "age_years" in r.json()["detail"]


class TestRecourseEndpoint:
    def rejected_record(self, setup, i=0):
        _, _, schema, X, pred = setup
        rows = X[pred == 0]
        return record_of(schema, rows[i])

    def test_basic_plans(self, setup):
        client = setup[0]
        record = self.rejected_record(setup)
        r = client.post(
            "/recourse", json={"record": record, "target_class": 1, "max_results": 3}
        )
        assert r.status_code == 200
        body = r.json()
        assert body["plans"]
        for plan in body["plans"]:
            assert plan["verified"] is True
            assert plan["total_cost"] == sum(c["cost"] for c in plan["changes"])
            for change in plan["changes"]:
                assert set(change) == {"attribute", "kind", "from", "to", "cost"}

    def test_identical_requests_identical_bodies(self, setup):
        client = setup[0]
        record = self.rejected_record(setup, 1)
        payload = {"record": record, "target_class": 1, "max_results": 2}
        a = client.post("/recourse", json=payload)
        b = client.post("/recourse", json=payload)
        assert a.content == b.content

    def test_override_to_immutable_respected(self, setup):
        client = setup[0]
        record = self.rejected_record(setup, 2)
        overrides = {"features": [{"feature": "duration_months", "type": "immutable"}]}
        r = client.post(
            "/recourse",
            json={"record": record, "target_class": 1, "max_results": 5,
                  "cost_overrides": overrides},
        )
        if r.status_code == 200:
            for plan in r.json()["plans"]:
                assert all(c["attribute"] != "duration_months" for c in plan["changes"])
                assert plan["record"]["duration_months"] == record["duration_months"]
        else:
            assert r.status_code == 422  # everything blocked is also acceptable

    def test_group_override_immutable(self, setup):
        client = setup[0]
        record = self.rejected_record(setup, 3)
        overrides = {"groups": [{"group": "checking_status", "immutable": True}]}
        r = client.post(
            "/recourse",
            json={"record": record, "target_class": 1, "max_results": 5,
                  "cost_overrides": overrides},
        )
        if r.status_code == 200:
            for plan in r.json()["plans"]:
                assert plan["record"]["checking_status"] == record["checking_status"]

    def test_negative_weight_rejected_400(self, setup):
        client = setup[0]
        record = self.rejected_record(setup)
        overrides = {"features": [{"feature": "duration_months", "type": "linear",
                                   "weight_up": -1}]}
        r = client.post(
            "/recourse",
            json={"record": record, "target_class": 1, "cost_overrides": overrides},
        )
        assert r.status_code == 400
        assert ">= 0" in r.json()["detail"]

    def test_unknown_feature_rejected_400(self, setup):
        client = setup[0]
        record = self.rejected_record(setup)
        overrides = {"features": [{"feature": "salary", "type": "immutable"}]}
        r = client.post(
            "/recourse",
            json={"record": record, "target_class": 1, "cost_overrides": overrides},
        )
        assert r.status_code == 400
        assert "salary" in r.json()["detail"]

    def test_infeasible_422_with_status(self, setup):
        client, forest, schema, X, pred = setup
        record = record_of(schema, X[pred == 0][0])
        # every group immutable and every numeric immutable: nothing can move
        overrides = {
            "features": [{"feature": n, "type": "immutable"} for n in schema.numeric_names],
            "groups": [{"group": g.name, "immutable": True} for g in schema.groups],
        }
        r = client.post(
            "/recourse",
            json={"record": record, "target_class": 1, "cost_overrides": overrides},
        )
        assert r.status_code == 422
        assert "immutable" in r.json()["detail"]

    def test_budget_exceeded_504(self, setup):
        _, forest, schema, X, pred = setup
        # fresh app: no cached regions, so a micro budget trips immediately
        costs = CostModel.load(default_costs_path(), schema)
        fresh = TestClient(create_app(forest, costs, ServiceConfig(max_cliques=2000)))
        record = record_of(schema, X[pred == 0][0])
        r = fresh.post(
            "/recourse",
            json={"record": record, "target_class": 1, "budget_ms": 1e-6},
        )
        assert r.status_code == 504
        assert "budget" in r.json()["detail"]

    def test_weight_dominance_never_lowers_minimum(self, setup):
        client, _, schema, X, pred = setup
        rows = X[pred == 0]
        for i in range(5):
            record = record_of(schema, rows[i])
            base = client.post(
                "/recourse", json={"record": record, "target_class": 1, "max_results": 1}
            )
            assert base.status_code == 200
            doubled = {
                "features": [
                    {"feature": "duration_months", "type": "linear",
                     "weight_up": 1.0, "weight_down": 1.0},
                    {"feature": "credit_amount", "type": "linear",
                     "weight_up": 0.01, "weight_down": 0.004},
                ]
            }
            dom = client.post(
                "/recourse",
                json={"record": record, "target_class": 1, "max_results": 1,
                      "cost_overrides": doubled},
            )
            assert dom.status_code == 200
            assert (
                dom.json()["plans"][0]["total_cost"]
                >= base.json()["plans"][0]["total_cost"] - 1e-9
            )
