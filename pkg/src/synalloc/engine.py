"""Routing engine: scores a vector against every partition and places it.

Each partition keeps a CF-tree plus the synopsis last extracted from it.
Allocation reads only the synopses (never raw data or live trees), then the
chosen partition absorbs the vector and, every ``refresh_interval`` inserts,
re-extracts and "disseminates" its synopsis (counted, not transmitted; all
peers live in-process).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, VectorError
from .similarity import (
    DEFAULT_OUTLIER_K,
    DEFAULT_THETA,
    EnsembleScore,
    ensemble_similarity,
)
from .synopsis import CFTree, Synopsis, extract_synopsis
from .validation import as_vector

# Data-scaled leaf threshold: this fraction of the RMS per-dimension std of
# a partition's initial data, when no explicit threshold is configured.
THRESHOLD_STD_FACTOR = 0.5


@dataclass
class EngineConfig:
    n_partitions: int = 5
    dimension: int = 5
    alpha: int = 50
    branching_factor: int = 8
    threshold: float | None = None  # None: per-partition data-scaled default
    theta: float = DEFAULT_THETA
    outlier_k: float = DEFAULT_OUTLIER_K
    refresh_interval: int = 1

    def __post_init__(self):
        if self.n_partitions < 1:
            raise ConfigError("need at least one partition")
        if self.dimension < 1:
            raise ConfigError("dimension must be >= 1")
        if self.alpha < 1:
            raise ConfigError("alpha must be >= 1")
        if self.branching_factor < 2:
            raise ConfigError("branching factor must be >= 2")
        if self.threshold is not None and not self.threshold > 0:
            raise ConfigError("threshold must be positive")
        if not 0.0 < self.theta < 1.0 / 3.0:
            raise ConfigError("theta must lie in (0, 1/3)")
        if self.outlier_k <= 0:
            raise ConfigError("outlier factor k must be positive")
        if self.refresh_interval < 1:
            raise ConfigError("refresh interval must be >= 1")


@dataclass
class PartitionState:
    partition_id: int  # 1-based
    tree: CFTree
    current_synopsis: Synopsis
    inserts_since_refresh: int = 0
    initial_count: int = 0


@dataclass
class AllocationRecord:
    """Outcome of routing one vector."""

    t: int
    vector: np.ndarray
    chosen: int  # 1-based partition id
    scores: list[EnsembleScore]  # one per partition, in partition order

    def similarities(self) -> list[float]:
        return [s.similarity for s in self.scores]

    def to_json_line(self) -> str:
        payload = {
            "t": self.t,
            "chosen": self.chosen,
            "similarities": [float(f"{s:.12g}") for s in self.similarities()],
        }
        return json.dumps(payload, separators=(",", ":"))


@dataclass
class AuditReport:
    checks: dict[str, bool]
    issues: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def default_threshold(points: np.ndarray) -> float:
    """Leaf threshold scaled to the data: half the RMS per-dimension std."""
    t = THRESHOLD_STD_FACTOR * float(np.sqrt(points.var(axis=0).mean()))
    return max(t, 1e-12)  # all-identical initial data would otherwise give 0


class AllocationEngine:
    """Single-writer allocator over N in-process partitions."""

    def __init__(self, config: EngineConfig, initial_points: Sequence[np.ndarray]):
        if len(initial_points) != config.n_partitions:
            raise ConfigError(
                f"expected initial data for {config.n_partitions} partitions, "
                f"got {len(initial_points)}"
            )
        self.config = config
        self.partitions: list[PartitionState] = []
        self.messages_disseminated = 0
        self.rejected = 0
        self._t = 0
        for i, pts in enumerate(initial_points, start=1):
            pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
            if pts.size == 0:
                raise ConfigError(f"partition {i} has no initial data")
            if pts.shape[1] != config.dimension:
                raise ConfigError(
                    f"partition {i}: initial data has dimension {pts.shape[1]}, "
                    f"expected {config.dimension}"
                )
            thr = config.threshold or default_threshold(pts)
            tree = CFTree(config.dimension, thr, config.branching_factor)
            for row in pts:
                tree.insert(row)
            syn = extract_synopsis(tree, config.alpha, i, version=1)
            self.partitions.append(
                PartitionState(i, tree, syn, initial_count=pts.shape[0])
            )

    # -- queries -------------------------------------------------------

    @property
    def synopses(self) -> list[Synopsis]:
        return [p.current_synopsis for p in self.partitions]

    def total_points(self) -> int:
        return sum(p.tree.total_points for p in self.partitions)

    def accepted(self) -> int:
        """Vectors ingested so far (initial data excluded)."""
        return self._t

    def allocate(self, x) -> tuple[int, list[EnsembleScore]]:
        """Pure argmax-similarity routing decision; does not mutate state."""
        v = as_vector(x, self.config.dimension, nonneg=True)
        return self._allocate(v)

    def _allocate(self, v: np.ndarray) -> tuple[int, list[EnsembleScore]]:
        cfg = self.config
        scores = [
            ensemble_similarity(v, p.current_synopsis, cfg.theta, cfg.outlier_k)
            for p in self.partitions
        ]
        sims = np.array([s.similarity for s in scores])
        return int(np.argmax(sims)) + 1, scores  # first max: lowest partition id

    # -- mutation --------------------------------------------------------

    def ingest(self, x) -> AllocationRecord:
        """Route, store, and (on schedule) refresh the target's synopsis.

        The decision always uses synopses as refreshed before this call.
        Invalid vectors are counted and rejected without touching any tree.
        """
        try:
            v = as_vector(x, self.config.dimension, nonneg=True)
        except VectorError:
            self.rejected += 1
            raise
        chosen, scores = self._allocate(v)
        p = self.partitions[chosen - 1]
        p.tree.insert(v)
        p.inserts_since_refresh += 1
        if p.inserts_since_refresh >= self.config.refresh_interval:
            p.current_synopsis = extract_synopsis(
                p.tree, self.config.alpha, p.partition_id,
                p.current_synopsis.version + 1,
            )
            p.inserts_since_refresh = 0
            self.messages_disseminated += 1
        rec = AllocationRecord(self._t, v, chosen, scores)
        self._t += 1
        return rec

    def ingest_stream(self, vectors: Iterable) -> Iterator[AllocationRecord]:
        for x in vectors:
            yield self.ingest(x)

    # -- consistency -------------------------------------------------------

    def audit(self) -> AuditReport:
        """Report-only pass over the module invariants."""
        issues: list[str] = []

        mass_ok = True
        expected = {p.partition_id: p.initial_count for p in self.partitions}
        for p in self.partitions:
            registry_mass = sum(e.cf.count for e in p.tree.leaf_entries())
            if registry_mass != p.tree.total_points:
                mass_ok = False
                issues.append(
                    f"partition {p.partition_id}: leaf mass {registry_mass} "
                    f"!= inserted {p.tree.total_points}"
                )
        if self.total_points() != sum(expected.values()) + self._t:
            mass_ok = False
            issues.append("total tree mass != initial + accepted ingests")

        cf_ok = True
        for p in self.partitions:
            for issue in p.tree.consistency_issues():
                cf_ok = False
                issues.append(f"partition {p.partition_id}: {issue}")

        alpha_ok = True
        for p in self.partitions:
            syn = p.current_synopsis
            below = [cf for cf in syn.dominant if cf.count < self.config.alpha]
            if below and len(syn.dominant) != 1:
                alpha_ok = False
                issues.append(f"partition {p.partition_id}: sub-alpha CF in synopsis")
            for cf, cent in zip(syn.dominant, syn.centroids):
                if not np.allclose(cent, cf.centroid(), rtol=1e-12, atol=1e-12):
                    alpha_ok = False
                    issues.append(
                        f"partition {p.partition_id}: stored centroid drifted"
                    )

        weights_ok = True
        probe = self.partitions[0].current_synopsis.centroids[0]
        for p in self.partitions:
            score = ensemble_similarity(
                probe, p.current_synopsis, self.config.theta, self.config.outlier_k
            )
            w = score.weights.weights
            if (w < 0).any() or (w > 1).any() or abs(w.sum() - 1.0) > 1e-12:
                weights_ok = False
                issues.append(f"partition {p.partition_id}: non-convex weights")
            if not 0.0 <= score.similarity <= 1.0:
                weights_ok = False
                issues.append(f"partition {p.partition_id}: similarity out of range")

        return AuditReport(
            checks={
                "mass_conservation": mass_ok,
                "cf_consistency": cf_ok,
                "synopsis_alpha_compliance": alpha_ok,
                "weight_convexity": weights_ok,
            },
            issues=issues,
        )
