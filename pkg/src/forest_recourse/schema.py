"""Feature-space declaration: numeric features and one-hot categorical groups.

A schema is declared attribute by attribute (numeric, or categorical with an
ordered category list).  Categorical attributes occupy a contiguous block of
indicator slots in the encoded vector; a valid vector has exactly one 1 per
block.  The schema also owns interval-consistency checking: a box is
consistent when every group can still realize a one-hot assignment inside it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .geometry import Hyperrectangle


class SchemaError(ValueError):
    pass


class EncodingError(SchemaError):
    """Raised when a raw record cannot be encoded; names the offending field."""


class InconsistentVectorError(SchemaError):
    """Raised when an encoded vector violates the one-hot invariant."""


@dataclass(frozen=True)
class AttributeDecl:
    """One declared attribute, before encoding."""

    name: str
    kind: str  # "numeric" | "categorical"
    categories: tuple[str, ...] | None = None
    bounds: tuple[float, float] | None = None
    granularity: float | None = None


@dataclass(frozen=True)
class FeatureSpec:
    """One encoded slot: a numeric feature or a single indicator member."""

    name: str
    kind: str  # "numeric" | "indicator"
    bounds: tuple[float, float] | None = None
    granularity: float = 1.0
    group: str | None = None
    category: str | None = None


@dataclass(frozen=True)
class CategoricalGroup:
    name: str
    categories: tuple[str, ...]
    start: int

    @property
    def size(self) -> int:
        return len(self.categories)

    @property
    def indices(self) -> range:
        return range(self.start, self.start + self.size)

    def index_of(self, category: str) -> int:
        try:
            return self.start + self.categories.index(category)
        except ValueError:
            raise EncodingError(f"category {category!r} not in group {self.name!r}") from None


class FeatureSchema:
    """Immutable encoded-space layout derived from attribute declarations."""

    def __init__(self, attributes: list[AttributeDecl]):
        if not attributes:
            raise SchemaError("schema needs at least one attribute")
        seen: set[str] = set()
        specs: list[FeatureSpec] = []
        groups: list[CategoricalGroup] = []
        for a in attributes:
            if a.name in seen:
                raise SchemaError(f"duplicate attribute name {a.name!r}")
            seen.add(a.name)
            if a.bounds is not None and not a.bounds[0] < a.bounds[1]:
                raise SchemaError(f"{a.name}: bounds min must be < max, got {a.bounds}")
            if a.kind == "numeric":
                g = a.granularity
                if g is None:
                    g = 1e-6 * (a.bounds[1] - a.bounds[0]) if a.bounds else 1.0
                if g <= 0:
                    raise SchemaError(f"{a.name}: granularity must be > 0, got {g}")
                specs.append(FeatureSpec(a.name, "numeric", a.bounds, g))
            elif a.kind == "categorical":
                if not a.categories or len(a.categories) < 2:
                    raise SchemaError(f"{a.name}: categorical groups need >= 2 categories")
                if len(set(a.categories)) != len(a.categories):
                    raise SchemaError(f"{a.name}: duplicate categories")
                group = CategoricalGroup(a.name, tuple(a.categories), start=len(specs))
                groups.append(group)
                for cat in a.categories:
                    specs.append(FeatureSpec(a.name, "indicator", group=a.name, category=cat))
            else:
                raise SchemaError(f"{a.name}: unknown kind {a.kind!r}")
        self.attributes: tuple[AttributeDecl, ...] = tuple(attributes)
        self.specs: tuple[FeatureSpec, ...] = tuple(specs)
        self.groups: tuple[CategoricalGroup, ...] = tuple(groups)
        self.dimension: int = len(specs)
        self._group_by_name = {g.name: g for g in self.groups}
        self._numeric_index = {
            s.name: i for i, s in enumerate(self.specs) if s.kind == "numeric"
        }

    # -- lookups ---------------------------------------------------------

    @property
    def numeric_names(self) -> list[str]:
        return [a.name for a in self.attributes if a.kind == "numeric"]

    @property
    def group_names(self) -> list[str]:
        return [g.name for g in self.groups]

    def numeric_index(self, name: str) -> int:
        try:
            return self._numeric_index[name]
        except KeyError:
            raise SchemaError(f"unknown numeric feature {name!r}") from None

    def group(self, name: str) -> CategoricalGroup:
        try:
            return self._group_by_name[name]
        except KeyError:
            raise SchemaError(f"unknown categorical group {name!r}") from None

    def has_attribute(self, name: str) -> bool:
        return name in self._numeric_index or name in self._group_by_name

    # -- encoding --------------------------------------------------------

    def encode(self, record: dict) -> np.ndarray:
        """Encode a raw record {attribute -> value} into a dense vector."""
        unknown = set(record) - {a.name for a in self.attributes}
        if unknown:
            raise EncodingError(f"unknown feature name {sorted(unknown)[0]!r}")
        v = np.zeros(self.dimension)
        pos = 0
        for a in self.attributes:
            if a.name not in record:
                raise EncodingError(f"missing feature {a.name!r}")
            value = record[a.name]
            if a.kind == "numeric":
                try:
                    v[pos] = float(value)
                except (TypeError, ValueError):
                    raise EncodingError(f"feature {a.name!r}: non-numeric value {value!r}") from None
                pos += 1
            else:
                g = self._group_by_name[a.name]
                v[g.index_of(str(value))] = 1.0
                pos += g.size
        return v

    def decode(self, v: np.ndarray) -> dict:
        """Inverse of encode; raises InconsistentVectorError on bad one-hot blocks."""
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.dimension,):
            raise SchemaError(f"vector length {v.shape} != schema dimension {self.dimension}")
        record: dict = {}
        for a in self.attributes:
            if a.kind == "numeric":
                record[a.name] = float(v[self._numeric_index[a.name]])
            else:
                record[a.name] = self.category_of(v, a.name)
        return record

    def validate_vector(self, v: np.ndarray) -> None:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.dimension,):
            raise SchemaError(f"vector length {v.shape} != schema dimension {self.dimension}")
        for g in self.groups:
            block = v[g.start : g.start + g.size]
            if not np.all((block == 0.0) | (block == 1.0)) or block.sum() != 1.0:
                raise InconsistentVectorError(
                    f"group {g.name!r}: indicator block {block.tolist()} is not one-hot"
                )

    def category_of(self, v: np.ndarray, group_name: str) -> str:
        g = self.group(group_name)
        block = np.asarray(v)[g.start : g.start + g.size]
        ones = np.nonzero(block == 1.0)[0]
        if len(ones) != 1 or block.sum() != 1.0:
            raise InconsistentVectorError(
                f"group {group_name!r}: indicator block {block.tolist()} is not one-hot"
            )
        return g.categories[int(ones[0])]

    def onehot(self, group_name: str, category: str) -> np.ndarray:
        g = self.group(group_name)
        block = np.zeros(g.size)
        block[g.index_of(category) - g.start] = 1.0
        return block

    # -- document form ---------------------------------------------------

    def to_doc(self) -> dict:
        feats = []
        for a in self.attributes:
            entry: dict = {"name": a.name, "kind": a.kind}
            if a.kind == "categorical":
                entry["categories"] = list(a.categories)
            else:
                if a.bounds is not None:
                    entry["bounds"] = [a.bounds[0], a.bounds[1]]
                idx = self._numeric_index[a.name]
                entry["granularity"] = self.specs[idx].granularity
            feats.append(entry)
        return {"features": feats}

    @classmethod
    def from_doc(cls, doc: dict) -> "FeatureSchema":
        if not isinstance(doc, dict) or "features" not in doc:
            raise SchemaError("schema document must have a top-level 'features' list")
        attrs = []
        for entry in doc["features"]:
            try:
                name = entry["name"]
                kind = entry["kind"]
            except (TypeError, KeyError) as e:
                raise SchemaError(f"schema entry missing field: {e}") from None
            cats = entry.get("categories")
            bounds = entry.get("bounds")
            attrs.append(
                AttributeDecl(
                    name=name,
                    kind=kind,
                    categories=tuple(cats) if cats else None,
                    bounds=(float(bounds[0]), float(bounds[1])) if bounds else None,
                    granularity=entry.get("granularity"),
                )
            )
        return cls(attrs)

    @classmethod
    def load(cls, path: str | Path) -> "FeatureSchema":
        return cls.from_doc(read_structured(path))

    def save(self, path: str | Path) -> None:
        write_structured(path, self.to_doc())

    def hash(self) -> str:
        payload = json.dumps(self.to_doc(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


# -- consistency of interval constraints against one-hot encoding ---------


def group_feasibility(lo: np.ndarray, hi: np.ndarray, group: CategoricalGroup) -> np.ndarray:
    """Per-category feasibility for a batch of boxes.

    Given interval arrays of shape (n, dimension), returns a bool array
    (n, group.size): entry [r, c] is true when box r admits the assignment
    "category c is the 1, every other member is 0".
    """
    s = slice(group.start, group.start + group.size)
    admits_one = (lo[:, s] < 1.0) & (hi[:, s] >= 1.0)
    admits_zero = (lo[:, s] < 0.0) & (hi[:, s] >= 0.0)
    zeros_available = admits_zero.sum(axis=1, keepdims=True) - admits_zero.astype(int)
    return admits_one & (zeros_available == group.size - 1)


def bulk_consistency(lo: np.ndarray, hi: np.ndarray, schema: FeatureSchema) -> np.ndarray:
    """Vectorized check_consistency over boxes stacked as (n, dimension) arrays."""
    ok = np.ones(lo.shape[0], dtype=bool)
    for g in schema.groups:
        ok &= group_feasibility(lo, hi, g).any(axis=1)
    return ok


def check_consistency(h: Hyperrectangle, schema: FeatureSchema) -> bool:
    """True iff every group can place exactly one 1 inside its intervals in h."""
    if h.dimension != schema.dimension:
        raise SchemaError(f"box dimension {h.dimension} != schema dimension {schema.dimension}")
    return bool(bulk_consistency(h.lo[None, :], h.hi[None, :], schema)[0])


# -- structured-text io ----------------------------------------------------


def read_structured(path: str | Path) -> dict:
    """Read a YAML or JSON document by file suffix (YAML parses JSON too)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return json.loads(text)
    return yaml.safe_load(text)


def write_structured(path: str | Path, doc: dict) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(doc, indent=2) + "\n")
    else:
        path.write_text(yaml.safe_dump(doc, sort_keys=False))
