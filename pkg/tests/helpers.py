"""Shared builders for tests: tiny hand-made trees and random graphs."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from forest_recourse.cliques import LeafGraph
from forest_recourse.forest import Forest, Tree
from forest_recourse.schema import AttributeDecl, FeatureSchema


def split_tree(index: int, feature: int, tau: float, left_class: int, right_class: int) -> Tree:
    return Tree(
        index,
        feature=[feature, -1, -1],
        threshold=[tau, 0.0, 0.0],
        left=[1, 0, 0],
        right=[2, 0, 0],
        klass=[-1, left_class, right_class],
    )


def leaf_tree(index: int, klass: int) -> Tree:
    return Tree(index, feature=[-1], threshold=[0.0], left=[0], right=[0], klass=[klass])


def numeric_schema(n: int, granularity: float = 1.0) -> FeatureSchema:
    return FeatureSchema(
        [AttributeDecl(f"f{i}", "numeric", granularity=granularity) for i in range(n)]
    )


def random_kpartite(rng: np.random.Generator, max_nodes: int = 20, edge_prob: float = 0.5):
    """Random k-partite graph: (partition_of, edge list)."""
    n_parts = int(rng.integers(2, 6))
    partition_of = []
    for p in range(n_parts):
        size = int(rng.integers(1, 5))
        partition_of.extend([p] * size)
    partition_of = partition_of[:max_nodes]
    n = len(partition_of)
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if partition_of[i] != partition_of[j] and rng.random() < edge_prob
    ]
    return partition_of, edges


def brute_force_cliques(partition_of, edges, t) -> set[frozenset]:
    """All size-t node subsets that are pairwise adjacent with distinct partitions."""
    n = len(partition_of)
    adj = set()
    for a, b in edges:
        adj.add((a, b))
        adj.add((b, a))
    out = set()
    for combo in combinations(range(n), t):
        parts = {partition_of[i] for i in combo}
        if len(parts) != t:
            continue
        if all((a, b) in adj for a, b in combinations(combo, 2)):
            out.add(frozenset(combo))
    return out


def graph_from(partition_of, edges) -> LeafGraph:
    return LeafGraph.from_edges(partition_of, edges)
