"""Diagram comparison, truncation, landscapes and bootstrap bands.

Distances use the sup-norm on the plane and allow points to be matched to
their diagonal projection, at cost ``(death - birth) / 2``. Infinite
intervals are matched among themselves in birth order; if the two diagrams
disagree on how many there are the distance is ``inf``.
"""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import ParameterError
from .persistence import PersistenceDiagram

__all__ = [
    "bottleneck",
    "wasserstein1",
    "diagram_distance",
    "truncate_diagram",
    "log_scale_diagram",
    "Landscape",
    "landscape",
    "landscape_grid",
    "ConfidenceBand",
    "bootstrap_band",
    "LANDSCAPE_NODES",
]

LANDSCAPE_NODES = 500


def _points(d, dim=None) -> np.ndarray:
    if isinstance(d, PersistenceDiagram):
        if dim is None:
            dims = d.dims
            if len(dims) > 1:
                raise ParameterError("diagram has several dimensions; pass dim")
            dim = dims[0] if dims else 0
        return d[dim]
    arr = np.asarray(d, dtype=np.float64).reshape(-1, 2)
    if np.any(np.isnan(arr)):
        raise ParameterError("diagram contains NaN")
    return arr


def _split(a):
    fin = np.isfinite(a[:, 1])
    return a[fin], np.sort(a[~fin, 0])


def _infinite_costs(inf1, inf2):
    """Per-pair costs of infinite intervals, or None on a count mismatch."""
    if inf1.size != inf2.size:
        warnings.warn(f"diagrams have {inf1.size} vs {inf2.size} infinite intervals; "
                      "distance is infinite", RuntimeWarning, stacklevel=3)
        return None
    return np.abs(inf1 - inf2)


def _cross(a, b):
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[0]))
    return np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)


def _half_pers(a):
    return (a[:, 1] - a[:, 0]) / 2.0


def _perfect_at(cross, p1, p2, r):
    """Is there a perfect matching using only pairs of cost <= r?"""
    n1, n2 = p1.size, p2.size
    size = n1 + n2
    rows, cols = [], []
    i, j = np.nonzero(cross <= r)
    rows.append(i)
    cols.append(j)
    k = np.flatnonzero(p1 <= r)  # d1 point -> its own diagonal slot
    rows.append(k)
    cols.append(n2 + k)
    k = np.flatnonzero(p2 <= r)  # diagonal slot of a d2 point -> that point
    rows.append(n1 + k)
    cols.append(k)
    dr, dc = np.meshgrid(np.arange(n2), np.arange(n1), indexing="ij")
    rows.append(n1 + dr.ravel())
    cols.append(n2 + dc.ravel())
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def _bottleneck_finite(a, b):
    if a.shape[0] + b.shape[0] == 0:
        return 0.0
    cross = _cross(a, b)
    p1, p2 = _half_pers(a), _half_pers(b)
    cand = np.unique(np.concatenate([cross.ravel(), p1, p2, [0.0]]))
    lo, hi = 0, cand.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_at(cross, p1, p2, cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def bottleneck(d1, d2, dim: Optional[int] = None) -> float:
    """Bottleneck distance: smallest achievable maximum pair cost over matchings."""
    a, inf1 = _split(_points(d1, dim))
    b, inf2 = _split(_points(d2, dim))
    extra = _infinite_costs(inf1, inf2)
    if extra is None:
        return math.inf
    value = _bottleneck_finite(a, b)
    return max(value, float(extra.max())) if extra.size else value


def _wasserstein_finite(a, b):
    n1, n2 = a.shape[0], b.shape[0]
    if n1 + n2 == 0:
        return 0.0
    cost = np.full((n1 + n2, n2 + n1), np.inf)
    cost[:n1, :n2] = _cross(a, b)
    cost[n1:, n2:] = 0.0
    if n1:
        cost[np.arange(n1), n2 + np.arange(n1)] = _half_pers(a)
    if n2:
        cost[n1 + np.arange(n2), np.arange(n2)] = _half_pers(b)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def wasserstein1(d1, d2, dim: Optional[int] = None) -> float:
    """1-Wasserstein distance: smallest achievable total pair cost over matchings."""
    a, inf1 = _split(_points(d1, dim))
    b, inf2 = _split(_points(d2, dim))
    extra = _infinite_costs(inf1, inf2)
    if extra is None:
        return math.inf
    return _wasserstein_finite(a, b) + float(extra.sum())


_METRICS = {"bottleneck": bottleneck, "wasserstein1": wasserstein1}


def diagram_distance(d1: PersistenceDiagram, d2: PersistenceDiagram, metric: str = "bottleneck",
                     dims: Optional[Sequence[int]] = None) -> list:
    """``[{dim, metric, value}, ...]`` records for each requested dimension."""
    if metric not in _METRICS:
        raise ParameterError(f"unknown metric {metric!r}; use one of {sorted(_METRICS)}")
    if dims is None:
        dims = sorted(set(d1.dims) | set(d2.dims))
    fn = _METRICS[metric]
    return [{"dim": int(k), "metric": metric, "value": fn(d1[k], d2[k])} for k in dims]


def truncate_diagram(d: PersistenceDiagram, threshold: float) -> PersistenceDiagram:
    """Keep only intervals born at or after ``threshold``."""
    if not threshold >= 0:
        raise ParameterError("truncation threshold must be >= 0")
    return PersistenceDiagram({k: a[a[:, 0] >= threshold] for k, a in d.intervals.items()})


def log_scale_diagram(d: PersistenceDiagram) -> PersistenceDiagram:
    """Natural-log coordinates ``(ln b, ln d)``; needs every birth > 0."""
    out = {}
    for k, a in d.intervals.items():
        if a.size and np.any(a[:, 0] <= 0):
            raise ParameterError(f"dimension {k} has a birth <= 0; truncate before log-scaling")
        with np.errstate(divide="ignore"):
            out[k] = np.log(a)
    return PersistenceDiagram(out)


# ---------------------------------------------------------------------------
# landscapes


@dataclass(frozen=True)
class Landscape:
    rank: int
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.rank < 1:
            raise ParameterError("landscape rank must be >= 1")
        g = np.array(self.grid, dtype=np.float64)
        v = np.array(self.values, dtype=np.float64)
        if g.ndim != 1 or g.size < 2 or v.shape != g.shape:
            raise ParameterError("landscape needs a 1-D grid of >= 2 nodes and matching values")
        g.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def sup_norm(self) -> float:
        return float(self.values.max())

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,value\n")
        for t, v in zip(self.grid.tolist(), self.values.tolist()):
            buf.write(f"{t!r},{v!r}\n")
        return buf.getvalue()


def landscape_grid(diagrams, dim: Optional[int] = None, nodes: int = LANDSCAPE_NODES) -> np.ndarray:
    """Uniform grid on ``[0, 1.05 * largest finite death]`` shared by all diagrams."""
    top = 0.0
    for d in diagrams:
        a = _points(d, dim)
        fin = a[np.isfinite(a[:, 1]), 1]
        if fin.size:
            top = max(top, float(fin.max()))
    if top <= 0:
        top = 1.0
    return np.linspace(0.0, 1.05 * top, nodes)


def landscape(d, rank: int = 1, grid=None, dim: Optional[int] = None,
              cap: Optional[float] = None) -> Landscape:
    """The rank-th largest tent value ``min(t - b, d - t)_+`` at every grid node.

    Infinite deaths must be capped (normally at the filtration's ``alpha_max``).
    """
    if not isinstance(rank, (int, np.integer)) or rank < 1:
        raise ParameterError(f"rank must be a positive integer, got {rank!r}")
    a = _points(d, dim)
    if np.any(np.isinf(a[:, 1])):
        if cap is None:
            raise ParameterError("diagram has infinite deaths; pass cap")
        a = np.column_stack([a[:, 0], np.minimum(a[:, 1], cap)])
    if grid is None:
        grid = landscape_grid([a])
    t = np.asarray(grid, dtype=np.float64)
    if a.shape[0] < rank:
        return Landscape(int(rank), t, np.zeros_like(t))
    tents = np.minimum(t[None, :] - a[:, 0:1], a[:, 1:2] - t[None, :])
    np.maximum(tents, 0.0, out=tents)
    kth = -np.partition(-tents, rank - 1, axis=0)[rank - 1]
    return Landscape(int(rank), t, kth)


@dataclass(frozen=True)
class ConfidenceBand:
    grid: np.ndarray
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float
    replicates: int
    rank: int = 1

    @property
    def sup_width(self) -> float:
        return float(np.max(self.upper - self.lower))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,lower,mean,upper\n")
        for row in zip(self.grid.tolist(), self.lower.tolist(), self.mean.tolist(),
                       self.upper.tolist()):
            buf.write(",".join(repr(x) for x in row) + "\n")
        return buf.getvalue()


def bootstrap_band(landscapes: Sequence[Landscape], replicates: int = 1000, level: float = 0.95,
                   seed=None) -> ConfidenceBand:
    """Uniform band around the mean landscape from a resample-over-runs bootstrap.

    Each replicate draws the runs with replacement and records the sup-norm
    gap between its mean and the overall mean; the band half-width is the
    ``level`` quantile of those gaps.
    """
    if len(landscapes) < 2:
        raise ParameterError("a bootstrap band needs at least two landscapes")
    if replicates < 1:
        raise ParameterError("replicates must be >= 1")
    if not 0 < level < 1:
        raise ParameterError("level must lie in (0, 1)")
    grid = landscapes[0].grid
    rank = landscapes[0].rank
    for ls in landscapes[1:]:
        if ls.grid.shape != grid.shape or not np.array_equal(ls.grid, grid):
            raise ParameterError("landscapes must share one grid")
        if ls.rank != rank:
            raise ParameterError("landscapes must share one rank")
    vals = np.stack([ls.values for ls in landscapes])
    mean = vals.mean(axis=0)
    rng = np.random.default_rng(seed)
    n = vals.shape[0]
    draws = rng.integers(0, n, size=(replicates, n))
    # counts per run turn each resample mean into one matrix product
    counts = np.zeros((replicates, n))
    np.add.at(counts, (np.repeat(np.arange(replicates), n), draws.ravel()), 1.0)
    boot = counts @ vals / n
    gaps = np.max(np.abs(boot - mean), axis=1)
    q = float(np.quantile(gaps, level))
    lower = np.maximum(mean - q, 0.0)
    upper = mean + q
    return ConfidenceBand(grid, mean, lower, upper, float(level), int(replicates), int(rank))
