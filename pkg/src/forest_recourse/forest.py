"""Binary decision forests with axis-aligned threshold splits and majority vote.

Trees are stored as flat node arrays (internal nodes carry feature/threshold
and child indices, leaves carry a class), which doubles as the serialized
layout.  Routing sends value <= threshold left, value > threshold right, so
the leaf boxes of one tree partition the feature space exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import Hyperrectangle
from .schema import FeatureSchema

GINI_EPS = 1e-12


class ForestError(ValueError):
    pass


class ModelLoadError(ForestError):
    """Malformed or truncated forest document; message carries the node path."""


@dataclass
class ForestParams:
    k: int = 10
    max_depth: int = 12
    min_leaf_size: int = 5
    features_per_split: int | None = None  # default ceil(sqrt(dimension))
    seed: int = 42

    def resolved_features_per_split(self, dimension: int) -> int:
        if self.features_per_split is not None:
            return self.features_per_split
        return int(np.ceil(np.sqrt(dimension)))

    def validate(self) -> None:
        if self.k < 1 or self.max_depth < 0 or self.min_leaf_size < 1:
            raise ForestError(f"forest params must be positive: {self}")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ForestError("features_per_split must be >= 1")


class Tree:
    """Flat-array binary tree; node id is the array position, root is 0."""

    def __init__(self, index: int, feature, threshold, left, right, klass):
        self.index = index
        self.feature = np.asarray(feature, dtype=np.int32)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int32)
        self.right = np.asarray(right, dtype=np.int32)
        self.klass = np.asarray(klass, dtype=np.int8)  # -1 for internal nodes

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def is_leaf(self, node_id: int) -> bool:
        return self.feature[node_id] < 0

    def route(self, x: np.ndarray) -> int:
        """Return the leaf node id that x is routed to."""
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return int(node)

    def route_batch(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.nonzero(active)[0]
            cur = node[idx]
            vals = X[idx, self.feature[cur]]
            go_left = vals <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active = self.feature[node] >= 0
        return node

    def predict(self, x: np.ndarray) -> int:
        return int(self.klass[self.route(x)])

    def leaf_regions(self, dimension: int) -> list[tuple[int, Hyperrectangle, int]]:
        """One (node_id, box, class) per leaf; boxes conjoin the path constraints."""
        out: list[tuple[int, Hyperrectangle, int]] = []
        stack: list[tuple[int, Hyperrectangle]] = [(0, Hyperrectangle.unbounded(dimension))]
        while stack:
            node, box = stack.pop()
            if self.feature[node] < 0:
                out.append((node, box, int(self.klass[node])))
                continue
            dim = int(self.feature[node])
            tau = float(self.threshold[node])
            stack.append((int(self.right[node]), box.with_lower(dim, tau)))
            stack.append((int(self.left[node]), box.with_upper(dim, tau)))
        out.sort(key=lambda t: t[0])
        return out

    def to_doc(self) -> dict:
        nodes = []
        for i in range(self.n_nodes):
            if self.feature[i] < 0:
                nodes.append({"class": int(self.klass[i])})
            else:
                nodes.append(
                    {
                        "feature": int(self.feature[i]),
                        "threshold": float(self.threshold[i]),
                        "left": int(self.left[i]),
                        "right": int(self.right[i]),
                    }
                )
        return {"index": self.index, "nodes": nodes}

    @classmethod
    def from_doc(cls, doc: dict, dimension: int, path: str) -> "Tree":
        try:
            index = int(doc["index"])
            nodes = doc["nodes"]
        except (TypeError, KeyError) as e:
            raise ModelLoadError(f"{path}: missing field {e}") from None
        if not isinstance(nodes, list) or not nodes:
            raise ModelLoadError(f"{path}.nodes: must be a non-empty list")
        n = len(nodes)
        feature = np.full(n, -1, dtype=np.int32)
        threshold = np.zeros(n, dtype=np.float64)
        left = np.zeros(n, dtype=np.int32)
        right = np.zeros(n, dtype=np.int32)
        klass = np.full(n, -1, dtype=np.int8)
        for i, nd in enumerate(nodes):
            npath = f"{path}.nodes[{i}]"
            if not isinstance(nd, dict):
                raise ModelLoadError(f"{npath}: node must be an object")
            if "class" in nd:
                if nd["class"] not in (0, 1):
                    raise ModelLoadError(f"{npath}: leaf class must be 0 or 1")
                klass[i] = nd["class"]
            else:
                try:
                    feature[i] = nd["feature"]
                    threshold[i] = nd["threshold"]
                    left[i] = nd["left"]
                    right[i] = nd["right"]
                except KeyError as e:
                    raise ModelLoadError(f"{npath}: missing field {e}") from None
                if not 0 <= feature[i] < dimension:
                    raise ModelLoadError(f"{npath}: feature index {feature[i]} out of range")
                for child in (left[i], right[i]):
                    if not 0 <= child < n:
                        raise ModelLoadError(f"{npath}: child index {child} out of range")
                if left[i] == i or right[i] == i:
                    raise ModelLoadError(f"{npath}: node is its own child")
        return cls(index, feature, threshold, left, right, klass)


@dataclass
class PredictResult:
    predicted_class: int
    votes: tuple[int, int]  # (count for class 0, count for class 1)


class Forest:
    """Majority-vote ensemble; ties (even k) break to class 0."""

    def __init__(self, trees: list[Tree], schema: FeatureSchema, metadata: dict | None = None):
        if not trees:
            raise ForestError("forest needs at least one tree")
        self.trees = trees
        self.schema = schema
        self.metadata = metadata or {}

    @property
    def k(self) -> int:
        return len(self.trees)

    @property
    def majority_size(self) -> int:
        """Smallest number of trees that forces the vote: floor(k/2) + 1."""
        return self.k // 2 + 1

    def predict(self, v: np.ndarray) -> PredictResult:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.schema.dimension,):
            raise ForestError(
                f"vector length {v.shape} != schema dimension {self.schema.dimension}"
            )
        ones = sum(t.predict(v) for t in self.trees)
        zeros = self.k - ones
        return PredictResult(1 if ones > zeros else 0, (zeros, ones))

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        votes = np.zeros(X.shape[0], dtype=np.int64)
        for t in self.trees:
            votes += t.klass[t.route_batch(X)]
        return (votes > self.k - votes).astype(np.int8)

    # -- document form ---------------------------------------------------

    def to_doc(self) -> dict:
        return {
            "format": "forest/v1",
            "schema_hash": self.schema.hash(),
            "schema": self.schema.to_doc(),
            "k": self.k,
            "metadata": self.metadata,
            "trees": [t.to_doc() for t in self.trees],
        }

    @classmethod
    def from_doc(cls, doc: dict, schema: FeatureSchema | None = None) -> "Forest":
        if not isinstance(doc, dict):
            raise ModelLoadError("forest document must be an object")
        if schema is None:
            if "schema" not in doc:
                raise ModelLoadError("forest document carries no schema and none was supplied")
            schema = FeatureSchema.from_doc(doc["schema"])
        if "schema_hash" in doc and doc["schema_hash"] != schema.hash():
            raise ModelLoadError(
                f"schema mismatch: document hash {doc['schema_hash']} != schema hash {schema.hash()}"
            )
        try:
            k = int(doc["k"])
            tree_docs = doc["trees"]
        except (TypeError, KeyError) as e:
            raise ModelLoadError(f"forest document missing field {e}") from None
        if not isinstance(tree_docs, list) or len(tree_docs) != k:
            raise ModelLoadError(f"trees: expected list of {k} trees, got {len(tree_docs) if isinstance(tree_docs, list) else type(tree_docs)}")
        trees = [
            Tree.from_doc(td, schema.dimension, path=f"trees[{i}]") for i, td in enumerate(tree_docs)
        ]
        return cls(trees, schema, metadata=dict(doc.get("metadata", {})))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_doc(), indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path, schema: FeatureSchema | None = None) -> "Forest":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ModelLoadError(f"malformed forest document {path}: {e}") from None
        return cls.from_doc(doc, schema)


# -- training ---------------------------------------------------------------


def _grow(X, y, indices, depth, params, m_features, rng, nodes):
    """Append a subtree over X[indices] to the flat node list; return its id."""
    counts = np.bincount(y[indices], minlength=2)
    node_id = len(nodes)
    majority = 0 if counts[0] >= counts[1] else 1
    if (
        depth >= params.max_depth
        or counts[0] == 0
        or counts[1] == 0
        or len(indices) < 2 * params.min_leaf_size
    ):
        nodes.append((-1, 0.0, 0, 0, majority))
        return node_id

    best = None  # (weighted_gini, feature, threshold)
    feats = rng.permutation(X.shape[1])[:m_features]
    n = len(indices)
    total1 = counts[1]
    for f in feats:
        vals = X[indices, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        sy = y[indices][order]
        cut = np.nonzero(sv[1:] > sv[:-1])[0]  # split between cut and cut+1
        if len(cut) == 0:
            continue
        nl = cut + 1
        nr = n - nl
        ok = (nl >= params.min_leaf_size) & (nr >= params.min_leaf_size)
        if not ok.any():
            continue
        c1 = np.cumsum(sy)
        l1 = c1[cut]
        l0 = nl - l1
        r1 = total1 - l1
        r0 = nr - r1
        # n * weighted gini, up to the constant n; smaller is better
        score = (nl - (l0 * l0 + l1 * l1) / nl) + (nr - (r0 * r0 + r1 * r1) / nr)
        score = np.where(ok, score, np.inf)
        i = int(np.argmin(score))
        if best is None or score[i] < best[0] - GINI_EPS:
            tau = (sv[i] + sv[i + 1]) / 2.0
            best = (float(score[i]), int(f), float(tau))

    if best is None:
        nodes.append((-1, 0.0, 0, 0, majority))
        return node_id

    _, f, tau = best
    go_left = X[indices, f] <= tau
    nodes.append(None)  # placeholder; children ids known after recursion
    left_id = _grow(X, y, indices[go_left], depth + 1, params, m_features, rng, nodes)
    right_id = _grow(X, y, indices[~go_left], depth + 1, params, m_features, rng, nodes)
    nodes[node_id] = (f, tau, left_id, right_id, -1)
    return node_id


def _train_tree(X, y, index: int, params: ForestParams, seed: int) -> Tree:
    rng = np.random.default_rng(seed)
    n = X.shape[0]
    bootstrap = rng.integers(0, n, size=n)
    m_features = params.resolved_features_per_split(X.shape[1])
    nodes: list = []
    _grow(X, y, bootstrap, 0, params, m_features, rng, nodes)
    feature, threshold, left, right, klass = zip(*nodes)
    return Tree(index, feature, threshold, left, right, klass)


def train(X: np.ndarray, y: np.ndarray, schema: FeatureSchema, params: ForestParams) -> Forest:
    """Grow k trees on bootstrap samples; deterministic given params.seed."""
    params.validate()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ForestError("dataset must be a non-empty 2-D array")
    if X.shape[1] != schema.dimension:
        raise ForestError(f"dataset width {X.shape[1]} != schema dimension {schema.dimension}")
    if not np.isin(y, (0, 1)).all():
        raise ForestError("labels must be binary 0/1")
    single_class = len(np.unique(y)) < 2
    master = np.random.default_rng(params.seed)
    tree_seeds = master.integers(0, 2**63 - 1, size=params.k)
    trees = [_train_tree(X, y, j, params, int(tree_seeds[j])) for j in range(params.k)]
    metadata = {
        "seed": params.seed,
        "params": {
            "k": params.k,
            "max_depth": params.max_depth,
            "min_leaf_size": params.min_leaf_size,
            "features_per_split": params.resolved_features_per_split(schema.dimension),
        },
        "n_training_rows": int(X.shape[0]),
        "single_class_warning": bool(single_class),
    }
    return Forest(trees, schema, metadata)


def cross_validate(
    X: np.ndarray, y: np.ndarray, schema: FeatureSchema, params: ForestParams, folds: int = 3
) -> list[float]:
    """Per-fold accuracies; fold split and per-fold training are seed-derived."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    if n < folds:
        raise ForestError(f"need at least {folds} rows for {folds}-fold CV")
    order = np.random.default_rng(params.seed).permutation(n)
    chunks = np.array_split(order, folds)
    accs = []
    for i, test_idx in enumerate(chunks):
        train_idx = np.setdiff1d(order, test_idx, assume_unique=True)
        fold_params = ForestParams(
            k=params.k,
            max_depth=params.max_depth,
            min_leaf_size=params.min_leaf_size,
            features_per_split=params.features_per_split,
            seed=params.seed + 1000 * (i + 1),
        )
        model = train(X[train_idx], y[train_idx], schema, fold_params)
        pred = model.predict_batch(X[test_idx])
        accs.append(float((pred == y[test_idx]).mean()))
    return accs
