"""End-to-end recourse search for decision forests.

Pipeline: collect every target-class leaf across the forest's trees, connect
leaves from different trees whose boxes intersect consistently, enumerate
cliques of size floor(k/2)+1 (one leaf from a strict majority of trees),
intersect each clique's boxes into a candidate region, and minimize the
user's modification cost inside each region.  Any point of such a region is
guaranteed the target prediction, so every emitted plan re-verifies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cliques import EnumerationBudget, EnumerationResult, GraphNode, LeafGraph, enumerate_cliques
from .costs import INF, CostModel, Immutable, LinearAsymmetric, PiecewiseLinear, Quadratic
from .forest import Forest
from .geometry import Hyperrectangle
from .schema import FeatureSchema, bulk_consistency, group_feasibility

_REGION_CHUNK = 4096
_STEP_HALVINGS = 50

STATUS_OK = "ok"
STATUS_ALREADY = "already classified as target class"
STATUS_INFEASIBLE_GRAPH = "infeasible: leaves of the target class span fewer trees than a majority"
STATUS_BLOCKED = "blocked by immutable constraints"
STATUS_NO_REGION = "no consistent region found"
STATUS_BUDGET_NO_PLAN = "budget exhausted before any feasible plan was found"


class RecourseError(ValueError):
    pass


class InternalInvariantError(RuntimeError):
    """A plan failed its prediction recheck; indicates a bug, never user error."""


@dataclass
class RecourseQuery:
    v: np.ndarray
    target_class: int
    max_results: int = 5
    budget: EnumerationBudget | None = None

    def __post_init__(self):
        if self.target_class not in (0, 1):
            raise RecourseError(f"target_class must be 0 or 1, got {self.target_class}")
        if self.max_results < 1:
            raise RecourseError(f"max_results must be >= 1, got {self.max_results}")


@dataclass
class RecourseRegion:
    clique: tuple[tuple[int, int], ...]  # (tree_index, leaf_id) per member
    region: Hyperrectangle
    consistent: bool


@dataclass
class Change:
    attribute: str
    kind: str  # "numeric" | "categorical"
    from_value: float | str
    to_value: float | str
    cost: float


@dataclass
class RecoursePlan:
    v_prime: np.ndarray
    changes: list[Change]
    total_cost: float
    witness: RecourseRegion
    verified: bool


@dataclass
class RecourseResult:
    plans: list[RecoursePlan]
    exhausted: bool
    status: str
    stats: dict = field(default_factory=dict)


def build_graph(forest: Forest, target_class: int, schema: FeatureSchema) -> LeafGraph:
    """Graph over target-class leaves; edges join consistently-overlapping
    leaves of different trees."""
    nodes: list[GraphNode] = []
    for tree in forest.trees:
        for leaf_id, box, klass in tree.leaf_regions(schema.dimension):
            if klass == target_class:
                nodes.append(GraphNode(len(nodes), tree.index, leaf_id, box))
    adjacency = [0] * len(nodes)
    if nodes:
        lo_all = np.vstack([n.region.lo for n in nodes])
        hi_all = np.vstack([n.region.hi for n in nodes])
        tree_of = np.array([n.tree_index for n in nodes])
        for i in range(len(nodes) - 1):
            lo = np.maximum(lo_all[i + 1 :], lo_all[i])
            hi = np.minimum(hi_all[i + 1 :], hi_all[i])
            candidate = (tree_of[i + 1 :] != tree_of[i]) & (lo < hi).all(axis=1)
            idx = np.nonzero(candidate)[0]
            if len(idx) == 0:
                continue
            consistent = bulk_consistency(lo[idx], hi[idx], forest.schema)
            for off in idx[consistent]:
                j = i + 1 + int(off)
                adjacency[i] |= 1 << j
                adjacency[j] |= 1 << i
    return LeafGraph(nodes, adjacency)


@dataclass
class RegionSet:
    """Consistent clique regions in vectorized form, ready for minimization."""

    cliques: list[tuple[tuple[int, int], ...]]
    lo: np.ndarray  # (n_regions, dimension)
    hi: np.ndarray
    admissible: dict[str, np.ndarray]  # group name -> bool (n_regions, group size)
    exhausted: bool
    stats: dict

    @property
    def n_regions(self) -> int:
        return len(self.cliques)

    def region(self, r: int) -> RecourseRegion:
        return RecourseRegion(
            clique=self.cliques[r],
            region=Hyperrectangle(self.lo[r], self.hi[r]),
            consistent=True,
        )


def collect_regions(
    graph: LeafGraph,
    t: int,
    schema: FeatureSchema,
    budget: EnumerationBudget | None = None,
    workers: int = 1,
) -> RegionSet:
    """Enumerate size-t cliques, intersect member boxes, drop empty or
    inconsistent intersections."""
    raw: list[tuple[int, ...]] = []
    result: EnumerationResult = enumerate_cliques(graph, t, budget, raw.append, workers=workers)
    stats = {
        "cliques_enumerated": result.emitted,
        "regions_empty": 0,
        "regions_inconsistent": 0,
        "regions_kept": 0,
    }
    d = schema.dimension
    if not raw:
        return RegionSet([], np.zeros((0, d)), np.zeros((0, d)), {}, result.exhausted, stats)
    lo_nodes = np.vstack([n.region.lo for n in graph.nodes])
    hi_nodes = np.vstack([n.region.hi for n in graph.nodes])
    kept_lo, kept_hi, kept_cliques = [], [], []
    for start in range(0, len(raw), _REGION_CHUNK):
        chunk = np.asarray(raw[start : start + _REGION_CHUNK])
        lo = lo_nodes[chunk].max(axis=1)
        hi = hi_nodes[chunk].min(axis=1)
        nonempty = (lo < hi).all(axis=1)
        consistent = np.zeros(len(chunk), dtype=bool)
        if nonempty.any():
            consistent[nonempty] = bulk_consistency(lo[nonempty], hi[nonempty], schema)
        keep = nonempty & consistent
        stats["regions_empty"] += int((~nonempty).sum())
        stats["regions_inconsistent"] += int((nonempty & ~consistent).sum())
        if keep.any():
            kept_lo.append(lo[keep])
            kept_hi.append(hi[keep])
            for row in chunk[keep]:
                members = tuple(
                    sorted((graph.nodes[i].tree_index, graph.nodes[i].leaf_id) for i in row)
                )
                kept_cliques.append(members)
    if not kept_cliques:
        return RegionSet([], np.zeros((0, d)), np.zeros((0, d)), {}, result.exhausted, stats)
    lo = np.vstack(kept_lo)
    hi = np.vstack(kept_hi)
    admissible = {g.name: group_feasibility(lo, hi, g) for g in schema.groups}
    stats["regions_kept"] = len(kept_cliques)
    return RegionSet(kept_cliques, lo, hi, admissible, result.exhausted, stats)


# -- vectorized per-region cost minimization ---------------------------------


def _step_points(lo: np.ndarray, hi: np.ndarray, granularity: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized smallest representable point lo + g with geometric fallback."""
    g = np.full(lo.shape, granularity)
    for _ in range(_STEP_HALVINGS + 1):
        over = lo + g > hi
        if not over.any():
            break
        g = np.where(over, g / 2.0, g)
    points = lo + g
    feasible = points <= hi
    return points, feasible


def _piecewise_eval(fc: PiecewiseLinear, deltas: np.ndarray) -> np.ndarray:
    xs = np.array([p[0] for p in fc.points])
    ys = np.array([p[1] for p in fc.points])
    if len(xs) == 1:
        return np.zeros_like(deltas)
    seg = np.clip(np.searchsorted(xs, deltas), 1, len(xs) - 1)
    x0, x1 = xs[seg - 1], xs[seg]
    y0, y1 = ys[seg - 1], ys[seg]
    slope = (y1 - y0) / (x1 - x0)
    return np.maximum(y0 + slope * (deltas - x0), 0.0)


def _minimize_numeric(
    v_i: float,
    lo: np.ndarray,
    hi: np.ndarray,
    fc,
    granularity: float,
    bounds: tuple[float, float] | None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-region optimal value, its cost, and a feasibility mask for one
    numeric feature.  Bounds are closed [bmin, bmax] and clip the half-open
    region interval."""
    bmin, bmax = bounds if bounds else (-INF, INF)
    hi_eff = np.minimum(hi, bmax)
    feasible = (hi_eff > lo) & (hi_eff >= bmin)
    inside = (lo < v_i) & (v_i <= hi_eff) & (v_i >= bmin)
    step, step_ok = _step_points(lo, hi_eff, granularity)
    lower = np.where(bmin > lo, bmin, step)
    lower_ok = np.where(bmin > lo, bmin <= hi_eff, step_ok)
    x = np.select([inside, v_i > hi_eff], [v_i, hi_eff], default=lower)
    feasible = feasible & (inside | (v_i > hi_eff) | lower_ok)

    with np.errstate(invalid="ignore"):
        if isinstance(fc, LinearAsymmetric):
            delta = x - v_i
            cost = np.where(
                delta > 0,
                fc.weight_up * delta,
                np.where(delta < 0, fc.weight_down * (-delta), 0.0),
            )
        elif isinstance(fc, Quadratic):
            cost = np.where(x == v_i, 0.0, fc.weight * (x - v_i) ** 2)
        elif isinstance(fc, Immutable):
            cost = np.where(x == v_i, 0.0, INF)
        elif isinstance(fc, PiecewiseLinear):
            candidates = [x] + [np.full(lo.shape, v_i + d) for d in fc.breakpoints]
            cand = np.stack(candidates, axis=1)  # (n, 1 + n_breakpoints)
            valid = (cand > lo[:, None]) & (cand <= hi_eff[:, None]) & (cand >= bmin)
            valid[:, 0] = True  # the clamp candidate is feasible by construction
            costs = _piecewise_eval(fc, cand - v_i)
            costs = np.where(valid, costs, INF)
            pick = np.argmin(costs, axis=1)
            rows = np.arange(len(lo))
            x = cand[rows, pick]
            cost = costs[rows, pick]
        else:
            raise RecourseError(f"unsupported cost function {type(fc).__name__}")
    cost = np.where(feasible, cost, INF)
    return x, cost, feasible


@dataclass
class _Minimized:
    numeric_values: dict[str, np.ndarray]  # attr name -> (n_regions,)
    numeric_costs: dict[str, np.ndarray]
    group_choice: dict[str, np.ndarray]  # attr name -> category index (n_regions,)
    group_costs: dict[str, np.ndarray]
    total: np.ndarray
    n_changes: np.ndarray
    feasible: np.ndarray


def minimize_over_regions(
    regions: RegionSet, v: np.ndarray, costs: CostModel, schema: FeatureSchema
) -> _Minimized:
    n = regions.n_regions
    total = np.zeros(n)
    n_changes = np.zeros(n, dtype=np.int64)
    feasible = np.ones(n, dtype=bool)
    numeric_values: dict[str, np.ndarray] = {}
    numeric_costs: dict[str, np.ndarray] = {}
    group_choice: dict[str, np.ndarray] = {}
    group_costs: dict[str, np.ndarray] = {}
    for a in schema.attributes:
        if a.kind == "numeric":
            i = schema.numeric_index(a.name)
            spec = schema.specs[i]
            x, cost, ok = _minimize_numeric(
                float(v[i]),
                regions.lo[:, i],
                regions.hi[:, i],
                costs.feature_costs[a.name],
                spec.granularity,
                spec.bounds,
            )
            numeric_values[a.name] = x
            numeric_costs[a.name] = cost
            feasible &= ok
            total = total + np.where(ok, cost, 0.0)
            n_changes += (x != float(v[i])) & ok
        else:
            g = schema.group(a.name)
            cur = g.index_of(schema.category_of(v, a.name)) - g.start
            table = costs.group_costs[a.name].matrix()[cur]  # (m,)
            masked = np.where(regions.admissible[a.name], table[None, :], INF)
            choice = np.argmin(masked, axis=1)  # first minimum = declaration order
            rows = np.arange(n)
            cost = masked[rows, choice] if n else np.zeros(0)
            group_choice[a.name] = choice
            group_costs[a.name] = cost
            total = total + cost
            n_changes += choice != cur
    total = np.where(feasible, total, INF)
    return _Minimized(
        numeric_values, numeric_costs, group_choice, group_costs, total, n_changes, feasible
    )


# -- the engine ---------------------------------------------------------------


class RecourseEngine:
    """Caches the leaf graph and clique regions per target class; queries then
    reduce to a vectorized cost minimization over the cached regions."""

    def __init__(self, forest: Forest, workers: int = 1):
        self.forest = forest
        self.schema = forest.schema
        self.workers = workers
        self._graphs: dict[int, LeafGraph] = {}
        self._regions: dict[tuple, RegionSet] = {}

    @property
    def clique_size(self) -> int:
        return self.forest.majority_size

    def graph(self, target_class: int) -> LeafGraph:
        if target_class not in self._graphs:
            self._graphs[target_class] = build_graph(self.forest, target_class, self.schema)
        return self._graphs[target_class]

    def regions(self, target_class: int, budget: EnumerationBudget | None = None) -> RegionSet:
        budget = budget or EnumerationBudget()
        key = (target_class, budget.max_cliques, budget.wall_time_ms)
        cacheable = budget.wall_time_ms is None
        if cacheable and key in self._regions:
            return self._regions[key]
        regions = collect_regions(
            self.graph(target_class), self.clique_size, self.schema, budget, self.workers
        )
        if cacheable:
            self._regions[key] = regions
        return regions

    def trivially_infeasible(self, target_class: int) -> bool:
        return self.graph(target_class).n_partitions < self.clique_size

    def find(self, query: RecourseQuery, costs: CostModel) -> RecourseResult:
        schema = self.schema
        v = np.asarray(query.v, dtype=np.float64)
        schema.validate_vector(v)
        target = query.target_class

        if self.forest.predict(v).predicted_class == target:
            witness = self._witness_containing(v, target)
            plan = RecoursePlan(v.copy(), [], 0.0, witness, verified=True)
            return RecourseResult([plan], True, STATUS_ALREADY, {"regions_kept": 1})

        if self.trivially_infeasible(target):
            return RecourseResult(
                [], True, STATUS_INFEASIBLE_GRAPH, {"target_class_trees": self.graph(target).n_partitions}
            )

        regions = self.regions(target, query.budget)
        stats = dict(regions.stats)
        if regions.n_regions == 0:
            status = STATUS_NO_REGION if regions.exhausted else STATUS_BUDGET_NO_PLAN
            return RecourseResult([], regions.exhausted, status, stats)

        minimized = minimize_over_regions(regions, v, costs, schema)
        finite = np.isfinite(minimized.total)
        stats["regions_infinite_cost"] = int(minimized.feasible.sum() - finite.sum())
        stats["regions_unreachable"] = int((~minimized.feasible).sum())
        if not finite.any():
            if stats["regions_infinite_cost"] > 0:
                return RecourseResult([], regions.exhausted, STATUS_BLOCKED, stats)
            status = STATUS_NO_REGION if regions.exhausted else STATUS_BUDGET_NO_PLAN
            return RecourseResult([], regions.exhausted, status, stats)

        plans = self._build_plans(query, costs, regions, minimized, v, target)
        status = STATUS_OK if plans else STATUS_BLOCKED
        return RecourseResult(plans, regions.exhausted, status, stats)

    # -- helpers ---------------------------------------------------------

    def _witness_containing(self, v: np.ndarray, target: int) -> RecourseRegion:
        members = []
        boxes = []
        for tree in self.forest.trees:
            leaf = tree.route(v)
            if int(tree.klass[leaf]) == target:
                members.append((tree.index, leaf))
                region = next(
                    box
                    for leaf_id, box, _ in tree.leaf_regions(self.schema.dimension)
                    if leaf_id == leaf
                )
                boxes.append(region)
            if len(members) == self.clique_size:
                break
        box = boxes[0]
        for b in boxes[1:]:
            box = box.intersect(b)
        return RecourseRegion(tuple(members), box, consistent=True)

    def _vector_for(
        self, regions: RegionSet, minimized: _Minimized, r: int, v: np.ndarray
    ) -> np.ndarray:
        schema = self.schema
        out = v.copy()
        for name, values in minimized.numeric_values.items():
            out[schema.numeric_index(name)] = values[r]
        for name, choice in minimized.group_choice.items():
            g = schema.group(name)
            out[g.start : g.start + g.size] = 0.0
            out[g.start + int(choice[r])] = 1.0
        return out

    def _build_plans(
        self,
        query: RecourseQuery,
        costs: CostModel,
        regions: RegionSet,
        minimized: _Minimized,
        v: np.ndarray,
        target: int,
    ) -> list[RecoursePlan]:
        schema = self.schema
        order = np.lexsort((minimized.n_changes, minimized.total))
        order = order[np.isfinite(minimized.total[order])]
        picked: list[tuple] = []  # (total, n_changes, v' tuple, region index)
        seen: set[bytes] = set()
        pos = 0
        # Walk equal-(cost, changes) runs so the lexicographic-v' tie-break
        # is applied before plans are cut off at max_results.
        while pos < len(order) and len(picked) < query.max_results:
            run_key = (minimized.total[order[pos]], minimized.n_changes[order[pos]])
            run = []
            while pos < len(order):
                r = int(order[pos])
                if (minimized.total[r], minimized.n_changes[r]) != run_key:
                    break
                run.append(r)
                pos += 1
            candidates = []
            for r in run:
                vp = self._vector_for(regions, minimized, r, v)
                candidates.append((tuple(vp), r, vp))
            candidates.sort(key=lambda c: c[0])
            for key, r, vp in candidates:
                b = vp.tobytes()
                if b in seen:
                    continue
                seen.add(b)
                picked.append((run_key[0], run_key[1], key, r, vp))
                if len(picked) >= query.max_results:
                    break
        plans = []
        for _total, _nch, _key, r, vp in picked:
            prediction = self.forest.predict(vp)
            if prediction.predicted_class != target:
                raise InternalInvariantError(
                    f"plan vector predicts class {prediction.predicted_class}, expected {target}"
                )
            changes = self._changes_for(v, vp, minimized, r)
            total = costs.total_cost(v, vp)
            plans.append(
                RecoursePlan(vp, changes, total, regions.region(r), verified=True)
            )
        plans.sort(key=lambda p: (p.total_cost, len(p.changes), tuple(p.v_prime)))
        return plans

    def _changes_for(
        self, v: np.ndarray, vp: np.ndarray, minimized: _Minimized, r: int
    ) -> list[Change]:
        schema = self.schema
        changes = []
        for a in schema.attributes:
            if a.kind == "numeric":
                i = schema.numeric_index(a.name)
                if vp[i] != v[i]:
                    changes.append(
                        Change(
                            a.name,
                            "numeric",
                            float(v[i]),
                            float(vp[i]),
                            float(minimized.numeric_costs[a.name][r]),
                        )
                    )
            else:
                before = schema.category_of(v, a.name)
                after = schema.category_of(vp, a.name)
                if before != after:
                    changes.append(
                        Change(
                            a.name,
                            "categorical",
                            before,
                            after,
                            float(minimized.group_costs[a.name][r]),
                        )
                    )
        return changes


def find_recourse(
    query: RecourseQuery, forest: Forest, costs: CostModel, workers: int = 1
) -> RecourseResult:
    """One-shot wrapper around RecourseEngine for single queries."""
    return RecourseEngine(forest, workers=workers).find(query, costs)


def plan_to_doc(plan: RecoursePlan, schema: FeatureSchema) -> dict:
    """Wire/document form of a plan, with the vector decoded to a raw record."""
    return {
        "record": schema.decode(plan.v_prime),
        "changes": [
            {
                "attribute": ch.attribute,
                "kind": ch.kind,
                "from": ch.from_value,
                "to": ch.to_value,
                "cost": ch.cost,
            }
            for ch in plan.changes
        ],
        "total_cost": plan.total_cost,
        "verified": plan.verified,
        "witness": {"clique": [[t, l] for t, l in plan.witness.clique]},
    }


def result_to_doc(result: RecourseResult, schema: FeatureSchema) -> dict:
    return {
        "status": result.status,
        "exhausted": result.exhausted,
        "stats": result.stats,
        "plans": [plan_to_doc(p, schema) for p in result.plans],
    }


def explain_plan(plan: RecoursePlan, schema: FeatureSchema) -> str:
    """Human-readable change list, most expensive change first."""
    if not plan.changes:
        return "no changes needed"
    lines = []
    for ch in sorted(plan.changes, key=lambda c: -c.cost):
        if ch.kind == "numeric":
            lines.append(
                f"change {ch.attribute} from {ch.from_value:g} to {ch.to_value:g} (cost {ch.cost:g})"
            )
        else:
            lines.append(
                f"change {ch.attribute} from {ch.from_value} to {ch.to_value} (cost {ch.cost:g})"
            )
    return "\n".join(lines)


def sample_points_in_region(
    lo: np.ndarray, hi: np.ndarray, schema: FeatureSchema, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Sample n valid vectors inside a consistent region: numeric dimensions
    uniformly inside their intervals, one admissible category per group."""
    d = schema.dimension
    out = np.zeros((n, d))
    for i, spec in enumerate(schema.specs):
        if spec.kind != "numeric":
            continue
        l, h = lo[i], hi[i]
        if np.isfinite(l) and np.isfinite(h):
            out[:, i] = l + (h - l) * rng.uniform(1e-6, 1.0, size=n)
        elif np.isfinite(h):
            out[:, i] = h - rng.uniform(0.0, 10.0 * (1.0 + abs(h)), size=n)
        elif np.isfinite(l):
            out[:, i] = l + rng.uniform(1e-6, 1.0, size=n) * 10.0 * (1.0 + abs(l))
        else:
            out[:, i] = rng.normal(0.0, 10.0, size=n)
    for g in schema.groups:
        feas = group_feasibility(lo[None, :], hi[None, :], g)[0]
        options = np.nonzero(feas)[0]
        if len(options) == 0:
            raise RecourseError(f"region admits no category for group {g.name!r}")
        picks = options[rng.integers(0, len(options), size=n)]
        out[np.arange(n), g.start + picks] = 1.0
    return out
