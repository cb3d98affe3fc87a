"""Finite metric space primitives.

Every algorithm downstream of this module consumes a dense ``(n, n)`` distance
matrix, so a non-Euclidean metric can be supplied by loading the matrix from a
file instead of building it from coordinates.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import InputFormatError, ParameterError

__all__ = [
    "as_point_cloud",
    "as_distance_matrix",
    "distance_matrix",
    "diameter",
    "cross_distances",
    "nu_distances",
    "hausdorff",
    "landmark_indices",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def as_point_cloud(points) -> np.ndarray:
    """Validate coordinates and return them as a read-only ``(n, D)`` array.

    A 1-D input is read as ``n`` points on the real line.
    """
    arr = np.array(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InputFormatError(f"point cloud must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputFormatError("point cloud must contain at least one point of dimension >= 1")
    if not np.all(np.isfinite(arr)):
        bad = int(np.argwhere(~np.isfinite(arr))[0, 0])
        raise InputFormatError(f"non-finite coordinate in point {bad}")
    return _frozen(arr)


def as_distance_matrix(matrix, check_triangle: bool = False, atol: float = 1e-9) -> np.ndarray:
    """Validate an externally supplied distance matrix."""
    dm = np.array(matrix, dtype=np.float64)
    if dm.ndim != 2 or dm.shape[0] != dm.shape[1] or dm.shape[0] < 1:
        raise InputFormatError(f"distance matrix must be square and nonempty, got shape {dm.shape}")
    if not np.all(np.isfinite(dm)):
        raise InputFormatError("distance matrix contains non-finite entries")
    if np.any(dm < 0):
        raise InputFormatError("distance matrix contains negative entries")
    if np.any(np.abs(np.diag(dm)) > atol):
        raise InputFormatError("distance matrix diagonal must be zero")
    if np.any(np.abs(dm - dm.T) > atol):
        raise InputFormatError("distance matrix is not symmetric")
    dm = 0.5 * (dm + dm.T)
    np.fill_diagonal(dm, 0.0)
    if check_triangle:
        # O(n^3); intended for small inputs only
        viol = dm[:, None, :] > dm[:, :, None] + dm[None, :, :] + atol
        if np.any(viol):
            i, j, k = np.argwhere(viol)[0]
            raise InputFormatError(f"triangle inequality fails for ({i}, {k}) via {j}")
    return _frozen(dm)


def distance_matrix(cloud) -> np.ndarray:
    """Euclidean pairwise distances of a point cloud (symmetric, zero diagonal)."""
    pts = as_point_cloud(cloud)
    if pts.shape[0] == 1:
        return _frozen(np.zeros((1, 1)))
    return _frozen(squareform(pdist(pts, metric="euclidean")))


def diameter(dm: np.ndarray) -> float:
    """Largest pairwise distance; 0 for a single point."""
    return float(np.max(dm)) if dm.size else 0.0


def landmark_indices(landmarks) -> np.ndarray:
    """Index array of a LandmarkSet or any integer sequence."""
    idx = getattr(landmarks, "indices", landmarks)
    return np.asarray(idx, dtype=np.intp).reshape(-1)


def cross_distances(dm: np.ndarray, landmarks) -> np.ndarray:
    """The ``(n, |L|)`` block of distances from every point to every landmark."""
    return dm[:, landmark_indices(landmarks)]


def nu_distances(dm: np.ndarray, landmarks, nu: int = 1) -> np.ndarray:
    """Distance from each point to its ``nu``-th nearest landmark."""
    idx = landmark_indices(landmarks)
    if not isinstance(nu, (int, np.integer)) or nu < 1:
        raise ParameterError(f"nu must be a positive integer, got {nu!r}")
    if nu > idx.size:
        raise ParameterError(f"nu={nu} exceeds the number of landmarks ({idx.size})")
    block = dm[:, idx]
    out = np.partition(block, nu - 1, axis=1)[:, nu - 1]
    return _frozen(np.ascontiguousarray(out))


def _nonempty(subset: Sequence[int], name: str) -> np.ndarray:
    arr = np.asarray(subset, dtype=np.intp).reshape(-1)
    if arr.size == 0:
        raise ParameterError(f"{name} must be nonempty")
    return arr


def hausdorff(dm: np.ndarray, subset_a, subset_b) -> float:
    """Hausdorff distance between two index subsets of the same metric space."""
    a = _nonempty(landmark_indices(subset_a), "subset_a")
    b = _nonempty(landmark_indices(subset_b), "subset_b")
    block = dm[np.ix_(a, b)]
    return float(max(block.min(axis=1).max(), block.min(axis=0).max()))
