"""Input coercion shared by the numeric modules."""

from __future__ import annotations

import numpy as np

from .errors import VectorError


def as_vector(x, dim: int | None = None, nonneg: bool = False) -> np.ndarray:
    """Coerce ``x`` to a 1-D float64 array, validating shape and domain.

    Raises VectorError for non-finite components, a dimension mismatch
    against ``dim``, or (when ``nonneg``) any negative component.
    """
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise VectorError(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise VectorError(f"dimension mismatch: expected {dim}, got {v.shape[0]}")
    if not np.isfinite(v).all():
        raise VectorError("malformed input: non-finite component")
    if nonneg and (v < 0).any():
        raise VectorError("domain error: negative component")
    return v
