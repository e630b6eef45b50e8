"""Micro-cluster summaries: cluster features, the CF-tree, and synopsis extraction.

A partition's data is summarised by a height-bounded tree of cluster
features (point count, per-dimension linear sum, per-dimension square sum).
The triplet is closed under addition, so absorbing a point or merging two
clusters is a component-wise sum and never touches raw data. A synopsis is
the set of dominant leaf-level clusters (count >= alpha) with their
centroids; it is the only thing other nodes ever see.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyClusterError, VectorError
from .validation import as_vector

# Relative tolerance for float sums when auditing parent/child CF consistency.
CF_SUM_RTOL = 1e-9


@dataclass
class ClusterFeature:
    """Additive summary of a micro-cluster: {count, linear sum, square sum}."""

    count: int
    linear_sum: np.ndarray
    square_sum: np.ndarray

    @classmethod
    def from_point(cls, x) -> "ClusterFeature":
        """Singleton CF: count 1, sums equal to the point and its squares."""
        v = as_vector(x)
        return cls(1, v.copy(), v * v)

    @classmethod
    def empty(cls, dim: int) -> "ClusterFeature":
        return cls(0, np.zeros(dim), np.zeros(dim))

    @property
    def dim(self) -> int:
        return self.linear_sum.shape[0]

    def merge(self, other: "ClusterFeature") -> "ClusterFeature":
        """Component-wise sum; commutative and associative."""
        if self.dim != other.dim:
            raise VectorError(
                f"dimension mismatch: {self.dim} vs {other.dim}"
            )
        return ClusterFeature(
            self.count + other.count,
            self.linear_sum + other.linear_sum,
            self.square_sum + other.square_sum,
        )

    def centroid(self) -> np.ndarray:
        if self.count < 1:
            raise EmptyClusterError("centroid of an empty cluster")
        return self.linear_sum / self.count

    def radius(self) -> float:
        """RMS distance of absorbed points to the centroid (0 for singletons)."""
        if self.count < 1:
            raise EmptyClusterError("radius of an empty cluster")
        c = self.linear_sum / self.count
        r2 = self.square_sum.sum() / self.count - float(c @ c)
        return float(np.sqrt(max(0.0, r2)))

    def variance(self) -> np.ndarray:
        """Per-dimension population variance, clamped at 0 against round-off."""
        if self.count < 1:
            raise EmptyClusterError("variance of an empty cluster")
        c = self.linear_sum / self.count
        return np.maximum(0.0, self.square_sum / self.count - c * c)

    def copy(self) -> "ClusterFeature":
        return ClusterFeature(self.count, self.linear_sum.copy(), self.square_sum.copy())

    def _absorb(self, x: np.ndarray) -> None:
        # In-place equivalent of merge(from_point(x)); hot path of tree inserts.
        self.count += 1
        self.linear_sum += x
        self.square_sum += x * x


@dataclass
class CFEntry:
    """One slot in a tree node: a CF plus the child it summarises (leaves: None)."""

    cf: ClusterFeature
    child: "CFNode | None" = None
    seq: int = -1  # creation ordinal for leaf entries; ties in dominance sort


@dataclass
class CFNode:
    is_leaf: bool
    entries: list[CFEntry] = field(default_factory=list)


@dataclass
class Synopsis:
    """What a partition publishes: its dominant CFs and their centroids."""

    partition_id: int
    dominant: list[ClusterFeature]
    centroids: np.ndarray  # shape (len(dominant), M)
    version: int


class CFTree:
    """Incremental CF-tree with bounded branching and a leaf radius threshold.

    Descent picks the child with the nearest centroid (Euclidean, ties to
    the lowest entry index). A leaf entry absorbs a point only if its radius
    stays within ``threshold``; otherwise the point opens a new entry.
    Overfull nodes split by farthest-pair seeding. Single writer only.
    """

    def __init__(self, dimension: int, threshold: float, branching_factor: int = 8):
        if dimension < 1:
            raise ConfigError("dimension must be >= 1")
        if not threshold > 0:
            raise ConfigError("leaf threshold must be positive")
        if branching_factor < 2:
            raise ConfigError("branching factor must be >= 2")
        self.dimension = dimension
        self.threshold = float(threshold)
        self.branching_factor = branching_factor
        self.root = CFNode(is_leaf=True)
        self.total_points = 0
        self._leaf_entries: list[CFEntry] = []  # creation order, never removed

    # -- insertion ---------------------------------------------------------

    def insert(self, x) -> tuple[CFEntry, bool]:
        """Route ``x`` to its leaf entry; returns (entry, newly_created)."""
        v = as_vector(x, self.dimension, nonneg=True)
        split, entry, created = self._insert(self.root, v)
        if split is not None:
            self.root = CFNode(is_leaf=False, entries=list(split))
        self.total_points += 1
        return entry, created

    def _insert(self, node: CFNode, x: np.ndarray):
        if node.is_leaf:
            return self._insert_leaf(node, x)

        i = self._nearest(node.entries, x)
        slot = node.entries[i]
        split, entry, created = self._insert(slot.child, x)
        if split is None:
            slot.cf._absorb(x)
        else:
            node.entries[i : i + 1] = list(split)
            if len(node.entries) > self.branching_factor:
                return self._split(node), entry, created
        return None, entry, created

    def _insert_leaf(self, node: CFNode, x: np.ndarray):
        if node.entries:
            i = self._nearest(node.entries, x)
            e = node.entries[i]
            if self._fits(e.cf, x):
                e.cf._absorb(x)
                return None, e, False
        e = self._new_entry(x)
        node.entries.append(e)
        if len(node.entries) > self.branching_factor:
            return self._split(node), e, True
        return None, e, True

    def _new_entry(self, x: np.ndarray) -> CFEntry:
        e = CFEntry(ClusterFeature.from_point(x), seq=len(self._leaf_entries))
        self._leaf_entries.append(e)
        return e

    def _fits(self, cf: ClusterFeature, x: np.ndarray) -> bool:
        # Radius of the would-be merged cluster, without building it.
        n = cf.count + 1
        ls = cf.linear_sum + x
        r2 = (cf.square_sum.sum() + float(x @ x)) / n - float(ls @ ls) / (n * n)
        return r2 <= self.threshold * self.threshold

    @staticmethod
    def _nearest(entries: list[CFEntry], x: np.ndarray) -> int:
        ls = np.array([e.cf.linear_sum for e in entries])
        cnt = np.array([e.cf.count for e in entries], dtype=np.float64)
        d2 = np.square(ls / cnt[:, None] - x).sum(axis=1)
        return int(np.argmin(d2))  # argmin takes the first minimum: lowest index

    def _split(self, node: CFNode) -> tuple[CFEntry, CFEntry]:
        """Farthest-pair seeding: the two most distant centroids seed the halves."""
        ents = node.entries
        cents = np.array([e.cf.linear_sum / e.cf.count for e in ents])
        diff = cents[:, None, :] - cents[None, :, :]
        d2 = np.square(diff).sum(axis=2)
        if d2.max() == 0.0:
            a, b = 0, 1  # all centroids coincide; degenerate but deterministic
        else:
            a, b = np.unravel_index(int(np.argmax(d2)), d2.shape)  # first max: a < b
        ga: list[CFEntry] = []
        gb: list[CFEntry] = []
        for k, e in enumerate(ents):
            if k == a:
                ga.append(e)
            elif k == b:
                gb.append(e)
            elif d2[k, a] <= d2[k, b]:  # tie goes to the lower-index seed
                ga.append(e)
            else:
                gb.append(e)
        return self._group_entry(ga, node.is_leaf), self._group_entry(gb, node.is_leaf)

    @staticmethod
    def _group_entry(group: list[CFEntry], is_leaf: bool) -> CFEntry:
        cf = group[0].cf.copy()
        for e in group[1:]:
            cf = cf.merge(e.cf)
        return CFEntry(cf, child=CFNode(is_leaf=is_leaf, entries=group))

    # -- read side ---------------------------------------------------------

    def leaf_entries(self) -> list[CFEntry]:
        """Live leaf entries in creation order."""
        return list(self._leaf_entries)

    def root_cf(self) -> ClusterFeature:
        """Aggregate CF of the whole tree."""
        if not self.root.entries:
            raise EmptyClusterError("empty tree has no aggregate CF")
        cf = self.root.entries[0].cf.copy()
        for e in self.root.entries[1:]:
            cf = cf.merge(e.cf)
        return cf

    def height(self) -> int:
        h, node = 1, self.root
        while not node.is_leaf:
            h += 1
            node = node.entries[0].child
        return h

    def consistency_issues(self) -> list[str]:
        """Full-tree audit; returns human-readable violations (empty = healthy)."""
        issues: list[str] = []
        seen: list[CFEntry] = []

        def walk(node: CFNode, path: str) -> None:
            if len(node.entries) > self.branching_factor:
                issues.append(f"{path}: {len(node.entries)} entries > B")
            for i, e in enumerate(node.entries):
                if node.is_leaf:
                    seen.append(e)
                    if e.cf.count >= 2 and e.cf.radius() > self.threshold + 1e-9:
                        issues.append(f"{path}[{i}]: radius {e.cf.radius():.6g} > T")
                    continue
                agg = e.child.entries[0].cf.copy()
                for ce in e.child.entries[1:]:
                    agg = agg.merge(ce.cf)
                if agg.count != e.cf.count:
                    issues.append(f"{path}[{i}]: count {e.cf.count} != child sum {agg.count}")
                for name, a, b in (
                    ("linear_sum", e.cf.linear_sum, agg.linear_sum),
                    ("square_sum", e.cf.square_sum, agg.square_sum),
                ):
                    if not np.allclose(a, b, rtol=CF_SUM_RTOL, atol=1e-12):
                        issues.append(f"{path}[{i}]: {name} differs from child sum")
                walk(e.child, f"{path}[{i}]")

        walk(self.root, "root")
        mass = sum(e.cf.count for e in seen)
        if mass != self.total_points:
            issues.append(f"mass {mass} != inserted {self.total_points}")
        if set(map(id, seen)) != set(map(id, self._leaf_entries)):
            issues.append("leaf registry out of sync with tree")
        return issues


def extract_synopsis(
    tree: CFTree, alpha: int, partition_id: int, version: int
) -> Synopsis:
    """Dominant leaf clusters (count >= alpha) of a tree, as a Synopsis.

    Entries below alpha are treated as outliers and dropped. Order is
    descending count, ties by creation order. When nothing reaches alpha
    the root aggregate CF stands in, so a synopsis is never empty.
    """
    if alpha < 1:
        raise ConfigError("alpha must be >= 1")
    if tree.total_points == 0:
        raise EmptyClusterError("cannot extract a synopsis from an empty tree")
    dom = [e for e in tree.leaf_entries() if e.cf.count >= alpha]
    dom.sort(key=lambda e: (-e.cf.count, e.seq))
    cfs = [e.cf.copy() for e in dom] if dom else [tree.root_cf()]
    centroids = np.array([cf.centroid() for cf in cfs])
    return Synopsis(partition_id, cfs, centroids, version)
