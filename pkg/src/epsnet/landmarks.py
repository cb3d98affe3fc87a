"""Landmark selection: random, maxmin, and the three epsilon-net builders.

All selectors take a dense distance matrix and a seed, and return a
:class:`LandmarkSet` whose ``indices`` keep selection order (``indices[0]`` is
the seed landmark).

Coverage is closed: a chosen landmark marks every point at distance ``<= eps``.
Unmarked points are therefore at distance ``> eps`` from every landmark, which
is what makes each new landmark keep the set eps-sparse, and termination
(everything marked) is exactly the eps-sample condition.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ParameterError
from .metric import diameter, landmark_indices

__all__ = [
    "LandmarkSet",
    "NetReport",
    "random_landmarks",
    "maxmin_landmarks",
    "eps_net_rand",
    "eps_net_maxmin",
    "eps_2eps_net",
    "verify_net",
    "select_landmarks",
    "EPS_NET_ALGORITHMS",
    "BUDGET_ALGORITHMS",
    "ALGORITHMS",
]


@dataclass(frozen=True)
class LandmarkSet:
    indices: tuple
    algorithm: str
    eps: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise ParameterError("a landmark set must be nonempty")
        if len(set(idx)) != len(idx):
            raise ParameterError("landmark indices must be distinct")
        if min(idx) < 0:
            raise ParameterError("landmark indices must be nonnegative")
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "eps": self.eps, "seed": self.seed,
                "indices": list(self.indices)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "LandmarkSet":
        return cls(tuple(d["indices"]), d["algorithm"], d.get("eps"), d.get("seed"))

    @classmethod
    def from_json(cls, text: str) -> "LandmarkSet":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class NetReport:
    eps: float
    is_sparse: bool
    is_sample: bool
    max_cover_gap: float
    min_pairwise: float = field(default=math.inf)

    @property
    def is_net(self) -> bool:
        return self.is_sparse and self.is_sample


def _check_eps(eps):
    if not (isinstance(eps, (int, float, np.floating)) and np.isfinite(eps) and eps > 0):
        raise ParameterError(f"eps must be a positive finite real, got {eps!r}")
    return float(eps)


def _check_budget(dm, k):
    n = dm.shape[0]
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ParameterError(f"landmark budget must be a positive integer, got {k!r}")
    if k > n:
        raise ParameterError(f"landmark budget {k} exceeds the number of points {n}")
    return int(k)


def _seed_value(seed):
    return None if seed is None else int(seed)


def random_landmarks(dm, k, seed=None) -> LandmarkSet:
    """``k`` distinct points drawn uniformly without replacement."""
    k = _check_budget(dm, k)
    rng = np.random.default_rng(seed)
    idx = rng.choice(dm.shape[0], size=k, replace=False)
    return LandmarkSet(tuple(idx), "random", None, _seed_value(seed))


def maxmin_landmarks(dm, k, seed=None, first=None) -> LandmarkSet:
    """Farthest-point sampling with a uniformly random first landmark.

    ``first`` pins the initial landmark (used by tests comparing against an
    oracle with the same start). Ties go to the smallest index.
    """
    k = _check_budget(dm, k)
    n = dm.shape[0]
    rng = np.random.default_rng(seed)
    cur = int(rng.integers(n)) if first is None else int(first)
    chosen = [cur]
    mind = np.array(dm[cur], dtype=np.float64)
    mind[cur] = -np.inf
    for _ in range(k - 1):
        cur = int(np.argmax(mind))
        chosen.append(cur)
        np.minimum(mind, dm[cur], out=mind)
        mind[chosen] = -np.inf
    return LandmarkSet(tuple(chosen), "maxmin", None, _seed_value(seed))


def eps_net_rand(dm, eps, seed=None) -> LandmarkSet:
    """Next landmark drawn uniformly from all still-uncovered points."""
    eps = _check_eps(eps)
    n = dm.shape[0]
    rng = np.random.default_rng(seed)
    cur = int(rng.integers(n))
    chosen = [cur]
    unmarked = np.ones(n, dtype=bool)
    while True:
        unmarked &= dm[cur] > eps
        remaining = np.flatnonzero(unmarked)
        if remaining.size == 0:
            break
        cur = int(remaining[rng.integers(remaining.size)])
        chosen.append(cur)
    return LandmarkSet(tuple(chosen), "eps_net_rand", eps, _seed_value(seed))


def eps_net_maxmin(dm, eps, seed=None) -> LandmarkSet:
    """Next landmark is the uncovered point farthest from the current landmarks.

    Stops once the farthest point is within ``eps`` of some landmark.
    """
    eps = _check_eps(eps)
    n = dm.shape[0]
    rng = np.random.default_rng(seed)
    cur = int(rng.integers(n))
    chosen = [cur]
    mind = np.array(dm[cur], dtype=np.float64)
    while True:
        cur = int(np.argmax(mind))
        if mind[cur] <= eps:
            break
        chosen.append(cur)
        np.minimum(mind, dm[cur], out=mind)
    return LandmarkSet(tuple(chosen), "eps_net_maxmin", eps, _seed_value(seed))


def _ring_rounds(dm, eps):
    ratio = max(math.ceil(diameter(dm) / (2.0 * eps)), 1)
    return math.ceil(math.log2(ratio)) + 1


def eps_2eps_net(dm, eps, seed=None) -> LandmarkSet:
    """The (eps, 2eps)-net builder.

    Candidates are points in the annulus ``(eps, 2eps]`` around any earlier
    landmark; covered candidates are dropped only when a landmark is drawn.
    When no uncovered candidate is left, the annulus around the latest
    landmark doubles, ``(2^d eps, 2^(d+1) eps]`` for ``d = 1, 2, ...``, and if
    that still finds nothing the draw falls back to all uncovered points.
    """
    eps = _check_eps(eps)
    n = dm.shape[0]
    rng = np.random.default_rng(seed)
    rounds = _ring_rounds(dm, eps)

    cur = int(rng.integers(n))
    chosen = [cur]
    unmarked = np.ones(n, dtype=bool)
    row = dm[cur]
    candidates = (row > eps) & (row <= 2 * eps)
    while True:
        row = dm[cur]
        unmarked &= row > eps
        if not unmarked.any():
            break
        pool = candidates & unmarked
        if not pool.any():
            for delta in range(1, rounds + 1):
                ring = (row > 2.0 ** delta * eps) & (row <= 2.0 ** (delta + 1) * eps)
                if (ring & unmarked).any():
                    candidates |= ring
                    break
            pool = candidates & unmarked
            if not pool.any():
                pool = unmarked
        options = np.flatnonzero(pool)
        cur = int(options[rng.integers(options.size)])
        chosen.append(cur)
        row = dm[cur]
        candidates |= (row > eps) & (row <= 2 * eps)
    return LandmarkSet(tuple(chosen), "eps_2eps_net", eps, _seed_value(seed))


def verify_net(dm, landmarks, eps) -> NetReport:
    """Measure how far a landmark set is from being an eps-net of the cloud."""
    idx = landmark_indices(landmarks)
    if idx.size == 0:
        raise ParameterError("landmark set must be nonempty")
    block = dm[:, idx]
    gap = float(block.min(axis=1).max())
    if idx.size > 1:
        sub = dm[np.ix_(idx, idx)]
        min_pair = float(sub[np.triu_indices(idx.size, k=1)].min())
    else:
        min_pair = math.inf
    eps = float(eps)
    return NetReport(eps=eps, is_sparse=min_pair > eps, is_sample=gap <= eps,
                     max_cover_gap=gap, min_pairwise=min_pair)


EPS_NET_ALGORITHMS = {
    "eps_net_rand": eps_net_rand,
    "eps_net_maxmin": eps_net_maxmin,
    "eps_2eps_net": eps_2eps_net,
}
BUDGET_ALGORITHMS = {
    "random": random_landmarks,
    "maxmin": maxmin_landmarks,
}
ALGORITHMS = tuple(EPS_NET_ALGORITHMS) + tuple(BUDGET_ALGORITHMS)


def select_landmarks(algorithm: str, dm, eps=None, k=None, seed=None) -> LandmarkSet:
    """Dispatch by algorithm name; eps-net builders need ``eps``, the others ``k``."""
    if algorithm in EPS_NET_ALGORITHMS:
        if eps is None:
            raise ParameterError(f"{algorithm} requires eps")
        lm = EPS_NET_ALGORITHMS[algorithm](dm, eps, seed)
    elif algorithm in BUDGET_ALGORITHMS:
        if k is None:
            raise ParameterError(f"{algorithm} requires a landmark budget k")
        lm = BUDGET_ALGORITHMS[algorithm](dm, k, seed)
    else:
        raise ParameterError(f"unknown landmark algorithm {algorithm!r}; choose from {ALGORITHMS}")
    return lm
