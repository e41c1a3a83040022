"""Axis-aligned box geometry: per-dimension half-open intervals.

Every interval is (lo, hi] -- lo exclusive, hi inclusive -- which mirrors
the tree routing rule where "value <= threshold" descends left.  Sibling
leaf boxes are then exactly disjoint.
"""

from __future__ import annotations

import numpy as np

NEG_INF = float("-inf")
POS_INF = float("inf")


class Hyperrectangle:
    """Conjunction of per-dimension intervals (lo, hi]; immutable."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: np.ndarray, hi: np.ndarray):
        lo = np.asarray(lo, dtype=np.float64).copy()
        hi = np.asarray(hi, dtype=np.float64).copy()
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError(f"lo/hi must be equal-length 1-D arrays, got {lo.shape} and {hi.shape}")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Hyperrectangle is immutable")

    @classmethod
    def unbounded(cls, dimension: int) -> "Hyperrectangle":
        return cls(np.full(dimension, NEG_INF), np.full(dimension, POS_INF))

    @property
    def dimension(self) -> int:
        return self.lo.shape[0]

    def is_empty(self) -> bool:
        return not bool(np.all(self.lo < self.hi))

    def intersect(self, other: "Hyperrectangle") -> "Hyperrectangle":
        return Hyperrectangle(np.maximum(self.lo, other.lo), np.minimum(self.hi, other.hi))

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all((x > self.lo) & (x <= self.hi)))

    def contains_in_dim(self, dim: int, value: float) -> bool:
        return self.lo[dim] < value <= self.hi[dim]

    def with_upper(self, dim: int, threshold: float) -> "Hyperrectangle":
        """Constrain dimension to (lo, min(hi, threshold)] -- a left descent."""
        hi = self.hi.copy()
        hi[dim] = min(hi[dim], threshold)
        return Hyperrectangle(self.lo, hi)

    def with_lower(self, dim: int, threshold: float) -> "Hyperrectangle":
        """Constrain dimension to (max(lo, threshold), hi] -- a right descent."""
        lo = self.lo.copy()
        lo[dim] = max(lo[dim], threshold)
        return Hyperrectangle(lo, self.hi)

    def contains_box(self, other: "Hyperrectangle") -> bool:
        """True when every interval of `other` lies inside this box."""
        return bool(np.all(self.lo <= other.lo) and np.all(other.hi <= self.hi))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hyperrectangle):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __hash__(self):
        return hash((self.lo.tobytes(), self.hi.tobytes()))

    def __repr__(self) -> str:
        parts = ", ".join(f"({lo:g}, {hi:g}]" for lo, hi in zip(self.lo, self.hi))
        return f"Hyperrectangle[{parts}]"


def intersect_many(boxes: list[Hyperrectangle]) -> Hyperrectangle:
    if not boxes:
        raise ValueError("need at least one box")
    lo = boxes[0].lo
    hi = boxes[0].hi
    for b in boxes[1:]:
        lo = np.maximum(lo, b.lo)
        hi = np.minimum(hi, b.hi)
    return Hyperrectangle(lo, hi)
