"""Loader for the UCI Statlog German Credit data format.

The raw file has one applicant per line: 20 whitespace-separated attribute
tokens (qualitative attributes carry codes like A11 or A124, numeric ones are
integers) followed by the label column, 1 = good credit, 2 = bad credit.
13 attributes are qualitative and become one-hot blocks; 7 are numeric and
stay raw.  Labels map to class 1 (good) and class 0 (bad).

The packaged ``data/german.data`` is a deterministic synthetic stand-in in
this exact format (see ``tools/generate_german_standin.py``); point the
loader at a genuine UCI file to work with the real records.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .schema import AttributeDecl, FeatureSchema


class GermanCreditParseError(ValueError):
    pass


# Attribute dictionary: (name, kind, categories or (bounds, granularity)).
# Category codes A47 (vacation) and A95 (female single) are documented for
# the dataset but occur in no record, so they are not part of the schema.
GERMAN_ATTRIBUTES: list[tuple] = [
    ("checking_status", "categorical", ["A11", "A12", "A13", "A14"]),
    ("duration_months", "numeric", ((1.0, 120.0), 1.0)),
    ("credit_history", "categorical", ["A30", "A31", "A32", "A33", "A34"]),
    (
        "purpose",
        "categorical",
        ["A40", "A41", "A42", "A43", "A44", "A45", "A46", "A48", "A49", "A410"],
    ),
    ("credit_amount", "numeric", ((0.0, 100000.0), 1.0)),
    ("savings_status", "categorical", ["A61", "A62", "A63", "A64", "A65"]),
    ("employment_since", "categorical", ["A71", "A72", "A73", "A74", "A75"]),
    ("installment_rate", "numeric", ((1.0, 4.0), 1.0)),
    ("personal_status_sex", "categorical", ["A91", "A92", "A93", "A94"]),
    ("other_debtors", "categorical", ["A101", "A102", "A103"]),
    ("residence_since", "numeric", ((1.0, 4.0), 1.0)),
    ("property", "categorical", ["A121", "A122", "A123", "A124"]),
    ("age_years", "numeric", ((18.0, 100.0), 1.0)),
    ("other_installment_plans", "categorical", ["A141", "A142", "A143"]),
    ("housing", "categorical", ["A151", "A152", "A153"]),
    ("existing_credits", "numeric", ((1.0, 10.0), 1.0)),
    ("job", "categorical", ["A171", "A172", "A173", "A174"]),
    ("num_dependents", "numeric", ((1.0, 10.0), 1.0)),
    ("telephone", "categorical", ["A191", "A192"]),
    ("foreign_worker", "categorical", ["A201", "A202"]),
]

N_COLUMNS = len(GERMAN_ATTRIBUTES) + 1  # 20 attributes + label


def build_schema() -> FeatureSchema:
    attrs = []
    for name, kind, extra in GERMAN_ATTRIBUTES:
        if kind == "categorical":
            attrs.append(AttributeDecl(name=name, kind=kind, categories=tuple(extra)))
        else:
            bounds, granularity = extra
            attrs.append(
                AttributeDecl(name=name, kind=kind, bounds=bounds, granularity=granularity)
            )
    return FeatureSchema(attrs)


def packaged_path(filename: str) -> Path:
    return Path(resources.files("forest_recourse").joinpath("data", filename))


def default_data_path() -> Path:
    return packaged_path("german.data")


def default_schema_path() -> Path:
    return packaged_path("german_schema.yaml")


def default_costs_path() -> Path:
    return packaged_path("german_costs.yaml")


def load_german_credit(
    path: str | Path | None = None, schema: FeatureSchema | None = None
) -> tuple[np.ndarray, np.ndarray, FeatureSchema]:
    """Parse a German-Credit-format file into (X, y, schema).

    X is (n, schema.dimension) with one-hot categorical blocks; y holds
    class 1 for good credit and class 0 for bad.
    """
    path = Path(path) if path is not None else default_data_path()
    if schema is None:
        schema = build_schema()
    rows: list[np.ndarray] = []
    labels: list[int] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if len(tokens) != N_COLUMNS:
                raise GermanCreditParseError(
                    f"{path}:{lineno}: expected {N_COLUMNS} columns, got {len(tokens)}"
                )
            record = {}
            for (name, kind, _), token in zip(GERMAN_ATTRIBUTES, tokens):
                if kind == "numeric":
                    try:
                        record[name] = float(token)
                    except ValueError:
                        raise GermanCreditParseError(
                            f"{path}:{lineno}: non-numeric value {token!r} for {name}"
                        ) from None
                else:
                    record[name] = token
            if tokens[-1] == "1":
                labels.append(1)
            elif tokens[-1] == "2":
                labels.append(0)
            else:
                raise GermanCreditParseError(
                    f"{path}:{lineno}: label must be 1 or 2, got {tokens[-1]!r}"
                )
            try:
                rows.append(schema.encode(record))
            except ValueError as e:
                raise GermanCreditParseError(f"{path}:{lineno}: {e}") from None
    if not rows:
        return np.zeros((0, schema.dimension)), np.zeros(0, dtype=np.int64), schema
    return np.vstack(rows), np.asarray(labels, dtype=np.int64), schema
