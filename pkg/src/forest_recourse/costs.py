"""User-specific, component-wise modification costs and their 1-D minimizers.

The total cost of moving a feature vector is the sum of independent
per-feature terms: numeric features carry a cost function of the displacement
(asymmetric linear, quadratic, immutable, or validated piecewise linear), and
each categorical group carries a transition table priced per category change.
Infinite entries mark changes that must never be recommended.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .schema import FeatureSchema, read_structured, write_structured

INF = float("inf")


class CostError(ValueError):
    pass


class InfeasibleIntervalError(CostError):
    """No representable point exists in the interval."""


def _parse_weight(value, field: str) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "+inf", "infinity"):
            return INF
        raise CostError(f"{field}: expected a number or 'inf', got {value!r}")
    w = float(value)
    if w < 0:
        raise CostError(f"{field}: weight must be >= 0, got {w}")
    return w


@dataclass(frozen=True)
class LinearAsymmetric:
    """cost = weight_up * increase, or weight_down * decrease."""

    weight_up: float = 1.0
    weight_down: float = 1.0

    def __post_init__(self):
        if self.weight_up < 0 or self.weight_down < 0:
            raise CostError(f"linear weights must be >= 0: {self}")

    def cost(self, v: float, x: float) -> float:
        if x == v:
            return 0.0
        if x > v:
            return self.weight_up * (x - v)
        return self.weight_down * (v - x)

    def to_doc(self) -> dict:
        return {"type": "linear", "weight_up": _dump(self.weight_up), "weight_down": _dump(self.weight_down)}


@dataclass(frozen=True)
class Quadratic:
    weight: float = 1.0

    def __post_init__(self):
        if self.weight < 0:
            raise CostError(f"quadratic weight must be >= 0: {self}")

    def cost(self, v: float, x: float) -> float:
        return self.weight * (x - v) ** 2

    def to_doc(self) -> dict:
        return {"type": "quadratic", "weight": _dump(self.weight)}


@dataclass(frozen=True)
class Immutable:
    def cost(self, v: float, x: float) -> float:
        return 0.0 if x == v else INF

    def to_doc(self) -> dict:
        return {"type": "immutable"}


@dataclass(frozen=True)
class PiecewiseLinear:
    """Cost over the displacement x - v, anchored at (0, 0).

    Points are (displacement, cost) pairs; interpolation is linear and the
    outermost segments extrapolate.  Construction rejects specs that dip
    below zero or move back toward zero away from the anchor, so the cost is
    non-decreasing in |displacement| on each side.
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = sorted(set(self.points))
        by_delta = {}
        for d, c in pts:
            if d in by_delta:
                raise CostError(f"piecewise: duplicate breakpoint at displacement {d}")
            by_delta[d] = c
        if 0.0 not in by_delta:
            pts.append((0.0, 0.0))
            pts.sort()
        elif by_delta[0.0] != 0.0:
            raise CostError("piecewise: cost at displacement 0 must be 0")
        for d, c in pts:
            if c < 0:
                raise CostError(f"piecewise: cost dips below 0 at displacement {d}")
        deltas = [p[0] for p in pts]
        costs = [p[1] for p in pts]
        zero_at = deltas.index(0.0)
        for i in range(zero_at, len(pts) - 1):
            if costs[i + 1] < costs[i]:
                raise CostError(
                    f"piecewise: cost decreases toward 0 between displacements "
                    f"{deltas[i]} and {deltas[i + 1]}"
                )
        for i in range(zero_at, 0, -1):
            if costs[i - 1] < costs[i]:
                raise CostError(
                    f"piecewise: cost decreases toward 0 between displacements "
                    f"{deltas[i - 1]} and {deltas[i]}"
                )
        object.__setattr__(self, "points", tuple(pts))

    def cost(self, v: float, x: float) -> float:
        delta = x - v
        deltas = [p[0] for p in self.points]
        costs = [p[1] for p in self.points]
        if len(deltas) == 1:
            return 0.0
        i = bisect.bisect_left(deltas, delta)
        if i == 0:
            i = 1
        elif i == len(deltas):
            i = len(deltas) - 1
        d0, d1 = deltas[i - 1], deltas[i]
        c0, c1 = costs[i - 1], costs[i]
        slope = (c1 - c0) / (d1 - d0)
        value = c0 + slope * (delta - d0)
        return max(value, 0.0)

    @property
    def breakpoints(self) -> list[float]:
        return [p[0] for p in self.points]

    def to_doc(self) -> dict:
        return {"type": "piecewise", "points": [[d, c] for d, c in self.points]}


FeatureCost = LinearAsymmetric | Quadratic | Immutable | PiecewiseLinear


@dataclass(frozen=True)
class GroupCost:
    """Transition table cost[from][to]; zero diagonal, entries >= 0 or inf."""

    transitions: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        m = len(self.transitions)
        for i, row in enumerate(self.transitions):
            if len(row) != m:
                raise CostError(f"transition matrix must be square, row {i} has {len(row)} entries")
            for j, c in enumerate(row):
                if i == j and c != 0.0:
                    raise CostError(f"transition diagonal must be 0, got {c} at [{i}][{i}]")
                if c < 0:
                    raise CostError(f"transition costs must be >= 0, got {c} at [{i}][{j}]")

    @classmethod
    def uniform(cls, size: int, cost: float = 1.0) -> "GroupCost":
        rows = tuple(
            tuple(0.0 if i == j else cost for j in range(size)) for i in range(size)
        )
        return cls(rows)

    @classmethod
    def immutable(cls, size: int) -> "GroupCost":
        rows = tuple(tuple(0.0 if i == j else INF for j in range(size)) for i in range(size))
        return cls(rows)

    def cost(self, from_index: int, to_index: int) -> float:
        return self.transitions[from_index][to_index]

    def matrix(self) -> np.ndarray:
        return np.asarray(self.transitions, dtype=np.float64)

    def to_doc(self) -> list:
        return [[_dump(c) for c in row] for row in self.transitions]


def _dump(value: float):
    return "inf" if value == INF else value


def _feature_cost_from_doc(entry: dict, field: str) -> FeatureCost:
    kind = entry.get("type")
    if kind == "linear":
        return LinearAsymmetric(
            _parse_weight(entry.get("weight_up", 1.0), f"{field}.weight_up"),
            _parse_weight(entry.get("weight_down", 1.0), f"{field}.weight_down"),
        )
    if kind == "quadratic":
        return Quadratic(_parse_weight(entry.get("weight", 1.0), f"{field}.weight"))
    if kind == "immutable":
        return Immutable()
    if kind == "piecewise":
        pts = entry.get("points")
        if not pts:
            raise CostError(f"{field}: piecewise needs a 'points' list")
        return PiecewiseLinear(tuple((float(d), _parse_weight(c, field)) for d, c in pts))
    raise CostError(f"{field}: unknown cost type {kind!r}")


class CostModel:
    """Per-feature costs covering every schema numeric and group exactly once."""

    def __init__(
        self,
        schema: FeatureSchema,
        feature_costs: dict[str, FeatureCost],
        group_costs: dict[str, GroupCost],
    ):
        for name in schema.numeric_names:
            if name not in feature_costs:
                raise CostError(f"cost model missing numeric feature {name!r}")
        for g in schema.groups:
            if g.name not in group_costs:
                raise CostError(f"cost model missing group {g.name!r}")
            if len(group_costs[g.name].transitions) != g.size:
                raise CostError(
                    f"group {g.name!r}: transition matrix size "
                    f"{len(group_costs[g.name].transitions)} != group size {g.size}"
                )
        extra = set(feature_costs) - set(schema.numeric_names)
        if extra:
            raise CostError(f"unknown feature {sorted(extra)[0]!r} in cost model")
        extra = set(group_costs) - set(schema.group_names)
        if extra:
            raise CostError(f"unknown group {sorted(extra)[0]!r} in cost model")
        self.schema = schema
        self.feature_costs = dict(feature_costs)
        self.group_costs = dict(group_costs)

    @classmethod
    def default(cls, schema: FeatureSchema) -> "CostModel":
        feats = {name: LinearAsymmetric(1.0, 1.0) for name in schema.numeric_names}
        groups = {g.name: GroupCost.uniform(g.size) for g in schema.groups}
        return cls(schema, feats, groups)

    @classmethod
    def from_doc(
        cls, schema: FeatureSchema, doc: dict, base: "CostModel | None" = None
    ) -> "CostModel":
        """Build from a cost document, merging over `base` (or the defaults)."""
        base = base or cls.default(schema)
        feats = dict(base.feature_costs)
        groups = dict(base.group_costs)
        doc = doc or {}
        for entry in doc.get("features", []) or []:
            name = entry.get("feature")
            if name not in feats:
                raise CostError(f"unknown feature {name!r} in cost document")
            if entry.get("immutable") is True:
                feats[name] = Immutable()
            else:
                feats[name] = _feature_cost_from_doc(entry, f"features[{name}]")
        for entry in doc.get("groups", []) or []:
            name = entry.get("group")
            if name not in groups:
                raise CostError(f"unknown group {name!r} in cost document")
            size = schema.group(name).size
            if entry.get("immutable") is True:
                groups[name] = GroupCost.immutable(size)
            elif "uniform" in entry:
                groups[name] = GroupCost.uniform(size, _parse_weight(entry["uniform"], f"groups[{name}].uniform"))
            else:
                rows = entry.get("transitions")
                if rows is None:
                    raise CostError(f"groups[{name}]: needs 'transitions', 'uniform', or 'immutable'")
                parsed = tuple(
                    tuple(_parse_weight(c, f"groups[{name}].transitions") for c in row)
                    for row in rows
                )
                groups[name] = GroupCost(parsed)
        return cls(schema, feats, groups)

    @classmethod
    def load(cls, path: str | Path, schema: FeatureSchema, base: "CostModel | None" = None):
        return cls.from_doc(schema, read_structured(path), base=base)

    def to_doc(self) -> dict:
        features = []
        for name in self.schema.numeric_names:
            entry = {"feature": name}
            entry.update(self.feature_costs[name].to_doc())
            features.append(entry)
        groups = []
        for g in self.schema.groups:
            groups.append({"group": g.name, "transitions": self.group_costs[g.name].to_doc()})
        return {"features": features, "groups": groups}

    def save(self, path: str | Path) -> None:
        write_structured(path, self.to_doc())

    # -- evaluation --------------------------------------------------------

    def total_cost(self, v: np.ndarray, v_prime: np.ndarray) -> float:
        """Sum of per-feature and per-group transition costs from v to v_prime."""
        schema = self.schema
        schema.validate_vector(v)
        schema.validate_vector(v_prime)
        total = 0.0
        for a in schema.attributes:
            if a.kind == "numeric":
                i = schema.numeric_index(a.name)
                total += self.feature_costs[a.name].cost(float(v[i]), float(v_prime[i]))
            else:
                g = schema.group(a.name)
                c_from = g.index_of(schema.category_of(v, a.name)) - g.start
                c_to = g.index_of(schema.category_of(v_prime, a.name)) - g.start
                total += self.group_costs[a.name].cost(c_from, c_to)
        return total


# -- one-dimensional minimizers ---------------------------------------------

MAX_GRANULARITY_HALVINGS = 50


def step_into_interval(lo: float, hi: float, granularity: float) -> float:
    """Smallest representable point in (lo, hi]: lo + granularity, halving
    the step up to 50 times while it overshoots hi."""
    g = granularity
    for _ in range(MAX_GRANULARITY_HALVINGS + 1):
        if lo + g <= hi:
            return lo + g
        g /= 2.0
    raise InfeasibleIntervalError(
        f"no representable point in ({lo}, {hi}] at granularity {granularity}"
    )


def min_cost_in_interval(
    v_i: float, lo: float, hi: float, fc: FeatureCost, granularity: float
) -> tuple[float, float]:
    """Value in (lo, hi] minimizing fc(v_i, .) and its cost.

    Directional monotonicity makes the feasible point nearest v_i optimal;
    for piecewise costs every breakpoint inside the interval is also tried.
    """
    if not lo < hi:
        raise InfeasibleIntervalError(f"empty interval ({lo}, {hi}]")
    if granularity <= 0:
        raise CostError(f"granularity must be > 0, got {granularity}")
    if lo < v_i <= hi:
        return v_i, 0.0
    if v_i > hi:
        candidate = hi
    else:
        candidate = step_into_interval(lo, hi, granularity)
    best_x = candidate
    best_c = fc.cost(v_i, candidate)
    if isinstance(fc, PiecewiseLinear):
        for delta in fc.breakpoints:
            x = v_i + delta
            if lo < x <= hi:
                c = fc.cost(v_i, x)
                if c < best_c:
                    best_x, best_c = x, c
    return best_x, best_c


def min_cost_in_group(
    current_category: str, admissible: list[str], gc: GroupCost, categories: tuple[str, ...]
) -> tuple[str, float]:
    """Cheapest admissible category to move to; prefers staying put.

    Ties break by declaration order in `categories`.
    """
    if not admissible:
        raise CostError("admissible category set is empty")
    if current_category in admissible:
        return current_category, 0.0
    cur = categories.index(current_category)
    best: tuple[str, float] | None = None
    admissible_set = set(admissible)
    for j, cat in enumerate(categories):
        if cat not in admissible_set:
            continue
        c = gc.cost(cur, j)
        if best is None or c < best[1]:
            best = (cat, c)
    return best
