"""Exhaustive grid ground truth for small instances.

Evaluates the forest and the cost model directly on every grid point,
bypassing graphs and cliques entirely, so engine results can be checked
against an independent computation.  With threshold-adjacent values in the
grid, the optimum of every clique region is a grid point and the engine must
match the oracle exactly (for clamp-optimal cost families).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .costs import CostModel
from .forest import Forest
from .schema import FeatureSchema

DEFAULT_GRID_CAP = 10**7


class GridCapError(ValueError):
    pass


@dataclass
class GridSpec:
    """Explicit finite value lists per numeric feature; groups get every category."""

    numeric_values: dict[str, list[float]]
    cap: int = DEFAULT_GRID_CAP

    def size(self, schema: FeatureSchema) -> int:
        total = 1
        for name in schema.numeric_names:
            total *= len(self.numeric_values[name])
        for g in schema.groups:
            total *= g.size
        return total


@dataclass
class OracleResult:
    min_cost: float | None
    v_prime: np.ndarray | None

    @property
    def feasible(self) -> bool:
        return self.min_cost is not None


def default_grid(forest: Forest, v: np.ndarray, cap: int = DEFAULT_GRID_CAP) -> GridSpec:
    """Threshold-adjacent grid: every split threshold, one granularity step to
    each side, and the query's own value, clipped to declared bounds."""
    schema = forest.schema
    values: dict[str, list[float]] = {}
    for name in schema.numeric_names:
        i = schema.numeric_index(name)
        spec = schema.specs[i]
        pts = {float(v[i])}
        for tree in forest.trees:
            for node in range(tree.n_nodes):
                if tree.feature[node] == i:
                    tau = float(tree.threshold[node])
                    pts.update((tau, tau - spec.granularity, tau + spec.granularity))
        if spec.bounds:
            bmin, bmax = spec.bounds
            pts.update((bmin, bmax))
            pts = {p for p in pts if bmin <= p <= bmax}
        values[name] = sorted(pts)
    return GridSpec(values, cap=cap)


def random_small_instance(rng: np.random.Generator):
    """Random forest/query/cost triple small enough for exhaustive checking:
    k in {3, 5}, at most 3 numeric features, integer thresholds in [0, 10],
    granularity 1, asymmetric linear costs."""
    from .costs import CostModel, LinearAsymmetric
    from .forest import Tree
    from .schema import AttributeDecl

    d = int(rng.integers(1, 4))
    k = int(rng.choice([3, 5]))
    schema = FeatureSchema(
        [AttributeDecl(f"f{i}", "numeric", granularity=1.0) for i in range(d)]
    )

    def grow(nodes, depth):
        node_id = len(nodes)
        if depth >= 3 or rng.random() < 0.35:
            nodes.append({"class": int(rng.integers(0, 2))})
            return node_id
        nodes.append(None)
        feature = int(rng.integers(0, d))
        tau = float(rng.integers(0, 11))
        left = grow(nodes, depth + 1)
        right = grow(nodes, depth + 1)
        nodes[node_id] = {"feature": feature, "threshold": tau, "left": left, "right": right}
        return node_id

    trees = []
    for j in range(k):
        nodes: list = []
        grow(nodes, 0)
        trees.append(Tree.from_doc({"index": j, "nodes": nodes}, d, f"trees[{j}]"))
    forest = Forest(trees, schema)
    v = rng.integers(0, 11, size=d).astype(np.float64)
    weights = [0.5, 1.0, 2.0, 3.0]
    costs = CostModel(
        schema,
        {
            f"f{i}": LinearAsymmetric(float(rng.choice(weights)), float(rng.choice(weights)))
            for i in range(d)
        },
        {},
    )
    return forest, v, costs


def run_oracle_equivalence(n_instances: int = 50, seed: int = 42) -> list[dict]:
    """Compare the engine's minimum against the grid oracle on random small
    instances; returns one report dict per instance."""
    from .recourse import RecourseEngine, RecourseQuery

    rng = np.random.default_rng(seed)
    reports = []
    for i in range(n_instances):
        forest, v, costs = random_small_instance(rng)
        engine = RecourseEngine(forest)
        result = engine.find(RecourseQuery(v, target_class=1), costs)
        engine_cost = result.plans[0].total_cost if result.plans else None
        oracle = oracle_min_cost(forest, v, costs, 1, default_grid(forest, v))
        match = (
            engine_cost == oracle.min_cost
            if (engine_cost is None) == (oracle.min_cost is None)
            else False
        )
        reports.append(
            {
                "instance": i,
                "k": forest.k,
                "engine_cost": engine_cost,
                "oracle_cost": oracle.min_cost,
                "match": bool(match),
            }
        )
    return reports


def oracle_min_cost(
    forest: Forest, v: np.ndarray, costs: CostModel, target_class: int, grid: GridSpec
) -> OracleResult:
    """Exact minimum of the total cost over grid points the forest classifies
    as the target; ties resolve to the lexicographically smallest vector."""
    schema = forest.schema
    size = grid.size(schema)
    if size > grid.cap:
        raise GridCapError(f"grid has {size} points, cap is {grid.cap}")

    axes: list[list[np.ndarray]] = []
    for a in schema.attributes:
        if a.kind == "numeric":
            vals = grid.numeric_values[a.name]
            if not vals:
                return OracleResult(None, None)
            axes.append([np.array([x]) for x in vals])
        else:
            g = schema.group(a.name)
            blocks = []
            for c in range(g.size):
                block = np.zeros(g.size)
                block[c] = 1.0
                blocks.append(block)
            axes.append(blocks)

    points = np.array([np.concatenate(combo) for combo in itertools.product(*axes)])
    hits = forest.predict_batch(points) == target_class
    best: tuple[float, tuple] | None = None
    for row in points[hits]:
        c = costs.total_cost(v, row)
        if not np.isfinite(c):
            continue
        key = (c, tuple(row))
        if best is None or key < best:
            best = key
    if best is None:
        return OracleResult(None, None)
    return OracleResult(best[0], np.array(best[1]))
