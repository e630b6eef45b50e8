from pathlib import Path

import numpy as np
import pytest

from synalloc import ClusterFeature, Synopsis

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def make_synopsis(centroids, partition_id=1, count=100, version=1) -> Synopsis:
    """Synopsis whose dominant clusters are point masses at the given centroids."""
    centroids = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    dominant = [
        ClusterFeature(count, count * c, count * c * c) for c in centroids
    ]
    return Synopsis(
        partition_id=partition_id,
        dominant=dominant,
        centroids=centroids.copy(),
        version=version,
    )
