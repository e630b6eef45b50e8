"""Abundance dissimilarity metrics and their fusion into one similarity score.

Three metrics (quantitative Jaccard, Sorensen/Bray-Curtis, Kulczynski) are
evaluated per centroid, weighted by a simple outlier rule, and combined by
a linear opinion pool. All metrics are defined for non-negative vectors and
land in [0, 1]; similarity is one minus the pooled dissimilarity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, VectorError
from .synopsis import Synopsis
from .validation import as_vector


class Metric(str, enum.Enum):
    JACCARD = "jaccard"
    SORENSEN = "sorensen"
    KULCZYNSKI = "kulczynski"


METRICS = (Metric.JACCARD, Metric.SORENSEN, Metric.KULCZYNSKI)

DEFAULT_THETA = 0.1  # weight handed to an outlier metric
DEFAULT_OUTLIER_K = 3.0  # outlier iff it deviates more than k sigma from the mean


@dataclass
class MetricOutcome:
    metric: Metric
    dissimilarity: float


@dataclass
class WeightVector:
    weights: np.ndarray
    theta: float


@dataclass
class EnsembleScore:
    """Fused verdict for one (vector, synopsis) pair."""

    pooled_dissimilarity: float
    similarity: float
    per_metric: list[MetricOutcome]
    weights: WeightVector


def _pair(x, s) -> tuple[np.ndarray, np.ndarray]:
    xv = as_vector(x, nonneg=True)
    sv = as_vector(s, dim=xv.shape[0], nonneg=True)
    return xv, sv


def _clip01(v: float) -> float:
    # Round-off can push results a hair outside [0, 1]; clamp it back.
    return min(1.0, max(0.0, v))


def jaccard_dissim(x, s) -> float:
    """Share of the combined abundance that the two vectors do not share."""
    xv, sv = _pair(x, s)
    a = float(np.abs(xv - sv).sum())
    t = float(xv.sum() + sv.sum())
    if t + a == 0.0:
        return 0.0
    return _clip01(2.0 * a / (t + a))


def sorensen_dissim(x, s) -> float:
    """Manhattan distance normalised by total abundance (Bray-Curtis)."""
    xv, sv = _pair(x, s)
    t = float(xv.sum() + sv.sum())
    if t == 0.0:
        return 0.0
    return _clip01(float(np.abs(xv - sv).sum()) / t)


def kulczynski_dissim(x, s) -> float:
    """One minus the mean fraction of each vector's abundance that is shared."""
    xv, sv = _pair(x, s)
    sx, ss = float(xv.sum()), float(sv.sum())
    if sx == 0.0 and ss == 0.0:
        return 0.0
    if sx == 0.0 or ss == 0.0:
        return 1.0  # nothing can be shared with an all-zero vector
    m = float(np.minimum(xv, sv).sum())
    return _clip01(1.0 - 0.5 * (m / sx + m / ss))


def all_dissims(x, s) -> list[MetricOutcome]:
    """The three metric outcomes in canonical order."""
    return [
        MetricOutcome(Metric.JACCARD, jaccard_dissim(x, s)),
        MetricOutcome(Metric.SORENSEN, sorensen_dissim(x, s)),
        MetricOutcome(Metric.KULCZYNSKI, kulczynski_dissim(x, s)),
    ]


def compute_weights(outcomes, theta: float, k: float = DEFAULT_OUTLIER_K) -> WeightVector:
    """Outlier-aware convex weights over metric outcomes.

    A metric is an outlier when its outcome deviates from the outcome mean
    by more than ``k`` population standard deviations. Outliers get the
    small weight ``theta``; the rest share the remainder equally. With all
    outcomes equal (or, degenerately, all flagged) weights are uniform.
    """
    o = np.asarray(outcomes, dtype=np.float64)
    n = o.size
    if n < 2:
        raise ConfigError("need at least two metric outcomes")
    if not 0.0 < theta < 1.0 / n:
        raise ConfigError(f"theta must lie in (0, 1/{n})")
    if k <= 0.0:
        raise ConfigError("outlier factor k must be positive")
    d = float(o.std())
    if d == 0.0:
        return WeightVector(np.full(n, 1.0 / n), theta)
    outlier = np.abs(o - o.mean()) > k * d
    n_out = int(outlier.sum())
    if n_out == 0 or n_out == n:
        return WeightVector(np.full(n, 1.0 / n), theta)
    w = np.where(outlier, theta, (1.0 - n_out * theta) / (n - n_out))
    return WeightVector(w, theta)


def opinion_pool(outcomes, weights: WeightVector) -> float:
    """Convex combination of outcomes under the given weights."""
    o = np.asarray(outcomes, dtype=np.float64)
    if o.size != weights.weights.size:
        raise VectorError("outcome/weight length mismatch")
    return float(o @ weights.weights)


def _dissim_rows(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Metric outcomes for ``x`` against every centroid row; shape (rows, 3)."""
    sx = float(x.sum())
    sc = centroids.sum(axis=1)
    absdiff = np.abs(centroids - x).sum(axis=1)
    smin = np.minimum(centroids, x).sum(axis=1)

    tot = sx + sc
    denom1 = tot + absdiff
    o1 = np.divide(2.0 * absdiff, denom1, out=np.zeros_like(sc), where=denom1 > 0)
    o2 = np.divide(absdiff, tot, out=np.zeros_like(sc), where=tot > 0)

    if sx == 0.0:
        o3 = np.where(sc > 0, 1.0, 0.0)
    else:
        half = smin / sx + np.divide(smin, sc, out=np.zeros_like(sc), where=sc > 0)
        o3 = np.where(sc > 0, 1.0 - 0.5 * half, 1.0)
    return np.clip(np.stack([o1, o2, o3], axis=1), 0.0, 1.0)


def _pool_rows(dissims: np.ndarray, theta: float, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise weights and pooled dissimilarity; mirrors compute_weights."""
    n = dissims.shape[1]
    m = dissims.mean(axis=1, keepdims=True)
    d = dissims.std(axis=1, keepdims=True)
    outlier = np.abs(dissims - m) > k * d
    n_out = outlier.sum(axis=1, keepdims=True)
    share = (1.0 - n_out * theta) / np.maximum(n - n_out, 1)
    w = np.where(outlier, theta, share)
    degenerate = (d == 0.0) | (n_out == n)
    w = np.where(degenerate, 1.0 / n, w)
    return w, (dissims * w).sum(axis=1)


def ensemble_similarity(
    x,
    syn: Synopsis,
    theta: float = DEFAULT_THETA,
    k: float = DEFAULT_OUTLIER_K,
) -> EnsembleScore:
    """Best fused similarity of ``x`` over a synopsis's dominant centroids.

    Every centroid is scored by the three metrics, weighted, and pooled; the
    centroid with the highest similarity wins (ties go to the first in the
    dominant list). Inputs must be non-negative.
    """
    if not 0.0 < theta < 1.0 / len(METRICS):
        raise ConfigError(f"theta must lie in (0, 1/{len(METRICS)})")
    if k <= 0.0:
        raise ConfigError("outlier factor k must be positive")
    if len(syn.dominant) == 0:
        raise ConfigError("synopsis has no dominant clusters")
    xv = as_vector(x, dim=syn.centroids.shape[1], nonneg=True)
    if (syn.centroids < 0).any():
        raise VectorError("domain error: negative synopsis centroid")

    dissims = _dissim_rows(xv, syn.centroids)
    w, pooled = _pool_rows(dissims, theta, k)
    best = int(np.argmax(1.0 - pooled))
    per_metric = [
        MetricOutcome(metric, float(dissims[best, j]))
        for j, metric in enumerate(METRICS)
    ]
    o_prime = float(pooled[best])
    return EnsembleScore(
        pooled_dissimilarity=o_prime,
        similarity=1.0 - o_prime,
        per_metric=per_metric,
        weights=WeightVector(w[best].copy(), theta),
    )
