"""Budgeted enumeration of fixed-size cliques in k-partite graphs.

Nodes are grouped into partitions (one per tree) and no edge joins two nodes
of the same partition.  The search walks partitions in ascending-size order,
choosing at most one node per partition and intersecting candidate sets
incrementally; adjacency lives in per-node bitmasks so the intersection is a
single integer AND.  Every clique of exactly the requested size is emitted at
most once.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable

from .geometry import Hyperrectangle


class CliqueError(ValueError):
    pass


@dataclass(frozen=True)
class GraphNode:
    graph_id: int
    tree_index: int
    leaf_id: int
    region: Hyperrectangle | None = None


class LeafGraph:
    """Undirected k-partite graph with bitmask adjacency."""

    def __init__(self, nodes: list[GraphNode], adjacency: list[int]):
        if len(nodes) != len(adjacency):
            raise CliqueError("adjacency size must match node count")
        for i, n in enumerate(nodes):
            if n.graph_id != i:
                raise CliqueError(f"node {i} carries graph_id {n.graph_id}")
            if adjacency[i] >> i & 1:
                raise CliqueError(f"node {i} is self-adjacent")
        self.nodes = nodes
        self.adjacency = adjacency
        parts: dict[int, list[int]] = {}
        for n in nodes:
            parts.setdefault(n.tree_index, []).append(n.graph_id)
        self.partitions: list[list[int]] = [parts[t] for t in sorted(parts)]
        for i, mask in enumerate(adjacency):
            m = mask
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                if not adjacency[j] >> i & 1:
                    raise CliqueError(f"edge ({i}, {j}) is not symmetric")
                if nodes[j].tree_index == nodes[i].tree_index:
                    raise CliqueError(
                        f"edge ({i}, {j}) joins two nodes of partition {nodes[i].tree_index}"
                    )

    @classmethod
    def from_edges(
        cls,
        partition_of: list[int],
        edges: Iterable[tuple[int, int]],
        regions: list[Hyperrectangle | None] | None = None,
    ) -> "LeafGraph":
        n = len(partition_of)
        nodes = [
            GraphNode(i, partition_of[i], i, regions[i] if regions else None) for i in range(n)
        ]
        adjacency = [0] * n
        for a, b in edges:
            if a == b:
                raise CliqueError(f"self-edge at node {a}")
            adjacency[a] |= 1 << b
            adjacency[b] |= 1 << a
        return cls(nodes, adjacency)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def n_partitions(self) -> int:
        return len(self.partitions)

    @property
    def edge_count(self) -> int:
        return sum(mask.bit_count() for mask in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i, mask in enumerate(self.adjacency):
            m = mask >> (i + 1) << (i + 1)  # only j > i
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                out.append((i, j))
        return out

    def to_doc(self) -> dict:
        return {
            "nodes": [
                {"id": n.graph_id, "tree_index": n.tree_index, "leaf_id": n.leaf_id}
                for n in self.nodes
            ],
            "edges": [[a, b] for a, b in self.edges()],
        }


@dataclass
class EnumerationBudget:
    """Caps on the search; exceeded budgets flag results possibly suboptimal."""

    max_cliques: int | None = None
    wall_time_ms: float | None = None

    def __post_init__(self):
        if self.max_cliques is not None and self.max_cliques < 1:
            raise CliqueError("max_cliques must be >= 1")
        if self.wall_time_ms is not None and self.wall_time_ms <= 0:
            raise CliqueError("wall_time_ms must be > 0")


@dataclass
class EnumerationResult:
    emitted: int
    exhausted: bool


_TIME_CHECK_MASK = 1023  # wall clock consulted every 1024 recursion steps


class _Search:
    def __init__(self, partitions, adjacency, t, cap, deadline, sink):
        self.partitions = partitions
        self.adjacency = adjacency
        self.t = t
        self.cap = cap
        self.deadline = deadline
        self.sink = sink
        self.steps = 0
        self.emitted = 0
        self.truncated = False
        self.timed_out = False

    def run(self, p: int, chosen: list[int], candidates: int) -> None:
        if self.truncated or self.timed_out:
            return
        if (
            self.deadline is not None
            and self.steps & _TIME_CHECK_MASK == 0
            and time.monotonic() > self.deadline
        ):
            self.timed_out = True
            return
        self.steps += 1
        if len(chosen) == self.t:
            self.sink(tuple(chosen))
            self.emitted += 1
            if self.cap is not None and self.emitted >= self.cap:
                self.truncated = True
            return
        remaining = len(self.partitions) - p
        if len(chosen) + remaining < self.t:
            return
        for node in self.partitions[p]:
            if candidates >> node & 1:
                chosen.append(node)
                self.run(p + 1, chosen, candidates & self.adjacency[node])
                chosen.pop()
                if self.truncated or self.timed_out:
                    return
        self.run(p + 1, chosen, candidates)


def _ordered_partitions(graph: LeafGraph) -> list[list[int]]:
    return sorted(graph.partitions, key=len)


def enumerate_cliques(
    graph: LeafGraph,
    t: int,
    budget: EnumerationBudget | None = None,
    sink: Callable[[tuple[int, ...]], None] | None = None,
    workers: int = 1,
) -> EnumerationResult:
    """Emit every clique of exactly size t (at most one node per partition).

    The sink receives node-id tuples in a deterministic order; with
    workers > 1 top-level branches are explored concurrently and their
    emissions concatenated in branch order, so the emitted sequence is
    identical for any worker count (given no wall-time limit).
    """
    if t < 1:
        raise CliqueError(f"clique size must be >= 1, got {t}")
    budget = budget or EnumerationBudget()
    sink = sink or (lambda clique: None)
    if t > graph.n_partitions:
        return EnumerationResult(0, True)
    partitions = _ordered_partitions(graph)
    deadline = (
        time.monotonic() + budget.wall_time_ms / 1000.0
        if budget.wall_time_ms is not None
        else None
    )
    all_nodes = (1 << graph.node_count) - 1

    if workers <= 1 or not partitions:
        search = _Search(partitions, graph.adjacency, t, budget.max_cliques, deadline, sink)
        search.run(0, [], all_nodes)
        return EnumerationResult(search.emitted, not (search.truncated or search.timed_out))

    # Branch on the first partition's choices (plus the skip branch); each
    # branch buffers its emissions, then buffers merge in branch order.
    def run_branch(first: int | None) -> tuple[list[tuple[int, ...]], bool]:
        buffer: list[tuple[int, ...]] = []
        search = _Search(
            partitions, graph.adjacency, t, budget.max_cliques, deadline, buffer.append
        )
        if first is None:
            search.run(1, [], all_nodes)
        else:
            search.run(1, [first], all_nodes & graph.adjacency[first])
        return buffer, not (search.truncated or search.timed_out)

    branches: list[int | None] = [*partitions[0], None]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run_branch, branches))
    emitted = 0
    complete = all(done for _, done in results)
    for buffer, _ in results:
        for clique in buffer:
            if budget.max_cliques is not None and emitted >= budget.max_cliques:
                complete = False
                break
            sink(clique)
            emitted += 1
        else:
            continue
        break
    if budget.max_cliques is not None and emitted >= budget.max_cliques and complete:
        # A full-cap emission is indistinguishable from truncation for the
        # single-threaded search; report it the same way.
        complete = False
    return EnumerationResult(emitted, complete)


def count_cliques(
    graph: LeafGraph, t: int, budget: EnumerationBudget | None = None, workers: int = 1
) -> int:
    count = 0

    def sink(_clique):
        nonlocal count
        count += 1

    enumerate_cliques(graph, t, budget, sink, workers=workers)
    return count
