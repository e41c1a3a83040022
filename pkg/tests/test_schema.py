import numpy as np
import pytest

from forest_recourse.geometry import NEG_INF, POS_INF, Hyperrectangle
from forest_recourse.schema import (
    AttributeDecl,
    EncodingError,
    FeatureSchema,
    InconsistentVectorError,
    SchemaError,
    check_consistency,
)


@pytest.fixture
def schema():
    return FeatureSchema(
        [
            AttributeDecl("age", "numeric", bounds=(18.0, 100.0), granularity=1.0),
            AttributeDecl("gender", "categorical", categories=("male", "female")),
            AttributeDecl("score", "numeric", granularity=0.5),
            AttributeDecl("city", "categorical", categories=("nyc", "sf", "berlin")),
        ]
    )


def test_layout(schema):
    assert schema.dimension == 2 + 2 + 3
    assert [s.kind for s in schema.specs] == [
        "numeric", "indicator", "indicator", "numeric", "indicator", "indicator", "indicator",
    ]
    g = schema.group("city")
    assert g.start == 4 and g.size == 3


def test_encode_one_hot(schema):
    v = schema.encode({"age": 30, "gender": "female", "score": 1.5, "city": "sf"})
    assert v.tolist() == [30.0, 0.0, 1.0, 1.5, 0.0, 1.0, 0.0]


def test_encode_decode_round_trip(schema):
    record = {"age": 44.0, "gender": "male", "score": -2.0, "city": "berlin"}
    assert schema.decode(schema.encode(record)) == record


def test_decode_encode_round_trip_on_vectors(schema):
    rng = np.random.default_rng(7)
    for _ in range(25):
        v = np.zeros(schema.dimension)
        v[0] = rng.normal()
        v[3] = rng.normal()
        v[1 + rng.integers(0, 2)] = 1.0
        v[4 + rng.integers(0, 3)] = 1.0
        assert np.array_equal(schema.encode(schema.decode(v)), v)


def test_encode_errors_name_the_field(schema):
    with pytest.raises(EncodingError, match="missing feature 'score'"):
        schema.encode({"age": 30, "gender": "male", "city": "sf"})
    with pytest.raises(EncodingError, match="unknown feature name 'salary'"):
        schema.encode({"age": 1, "gender": "male", "score": 0, "city": "sf", "salary": 9})
    with pytest.raises(EncodingError, match="'paris' not in group 'city'"):
        schema.encode({"age": 1, "gender": "male", "score": 0, "city": "paris"})


def test_decode_rejects_bad_blocks(schema):
    v = schema.encode({"age": 1, "gender": "male", "score": 0, "city": "sf"})
    v[1] = 0.0  # all-zero gender block
    with pytest.raises(InconsistentVectorError):
        schema.decode(v)
    v[1] = 1.0
    v[2] = 1.0  # two ones
    with pytest.raises(InconsistentVectorError):
        schema.decode(v)
    v[1] = 0.5
    v[2] = 0.5  # fractional values are invalid even though they sum to 1
    with pytest.raises(InconsistentVectorError):
        schema.validate_vector(v)


def test_schema_invariants_enforced():
    with pytest.raises(SchemaError):
        FeatureSchema([AttributeDecl("g", "categorical", categories=("only",))])
    with pytest.raises(SchemaError):
        FeatureSchema([AttributeDecl("x", "numeric", granularity=0.0)])
    with pytest.raises(SchemaError):
        FeatureSchema([AttributeDecl("x", "numeric", bounds=(5.0, 5.0))])
    with pytest.raises(SchemaError):
        FeatureSchema(
            [AttributeDecl("x", "numeric"), AttributeDecl("x", "numeric")]
        )


def test_granularity_defaults():
    s = FeatureSchema(
        [
            AttributeDecl("a", "numeric"),
            AttributeDecl("b", "numeric", bounds=(0.0, 1000.0)),
        ]
    )
    assert s.specs[0].granularity == 1.0
    assert s.specs[1].granularity == pytest.approx(1e-3)


def box_for(schema, constraints):
    lo = np.full(schema.dimension, NEG_INF)
    hi = np.full(schema.dimension, POS_INF)
    for i, (a, b) in constraints.items():
        lo[i], hi[i] = a, b
    return Hyperrectangle(lo, hi)


class TestConsistency:
    def test_unconstrained_is_consistent(self, schema):
        assert check_consistency(Hyperrectangle.unbounded(schema.dimension), schema)

    def test_both_members_forced_to_zero(self, schema):
        # gender block at indices 1, 2: both capped below 1
        h = box_for(schema, {1: (NEG_INF, 0.5), 2: (NEG_INF, 0.5)})
        assert not check_consistency(h, schema)

    def test_two_members_forced_to_one(self, schema):
        h = box_for(schema, {1: (0.5, POS_INF), 2: (0.5, POS_INF)})
        assert not check_consistency(h, schema)

    def test_one_forced_one_others_admitting_zero(self, schema):
        # city block at 4..6: one member must be > 0.5, the others are free
        h = box_for(schema, {4: (0.5, POS_INF)})
        assert check_consistency(h, schema)

    def test_vector_membership_implies_consistency(self, schema):
        rng = np.random.default_rng(3)
        for _ in range(30):
            record = {
                "age": float(rng.integers(18, 80)),
                "gender": ("male", "female")[rng.integers(0, 2)],
                "score": float(rng.normal()),
                "city": ("nyc", "sf", "berlin")[rng.integers(0, 3)],
            }
            v = schema.encode(record)
            lo = v - rng.uniform(0.01, 2.0, size=v.shape)
            hi = v + rng.uniform(0.0, 2.0, size=v.shape)
            h = Hyperrectangle(lo, hi)
            assert h.contains(v)
            assert check_consistency(h, schema)

    def test_monotone_under_widening(self, schema):
        rng = np.random.default_rng(11)
        for _ in range(50):
            lo = rng.uniform(-2, 0.9, schema.dimension)
            hi = lo + rng.uniform(0.05, 2.0, schema.dimension)
            h = Hyperrectangle(lo, hi)
            wider = Hyperrectangle(lo - rng.uniform(0, 1, schema.dimension),
                                   hi + rng.uniform(0, 1, schema.dimension))
            if check_consistency(h, schema):
                assert check_consistency(wider, schema)


def test_doc_round_trip(schema, tmp_path):
    path = tmp_path / "schema.yaml"
    schema.save(path)
    loaded = FeatureSchema.load(path)
    assert loaded.to_doc() == schema.to_doc()
    assert loaded.hash() == schema.hash()
    jpath = tmp_path / "schema.json"
    schema.save(jpath)
    assert FeatureSchema.load(jpath).hash() == schema.hash()
