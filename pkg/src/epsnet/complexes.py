"""Filtered simplicial complexes: Vietoris-Rips and lazy witness.

Both complexes are flag complexes: a simplex is present at scale ``alpha`` iff
all of its edges are, so a symmetric matrix of edge appearance values
determines the whole filtration. Rips uses the distances themselves; the lazy
witness complex uses the smallest ``alpha`` at which some witness sees both
endpoints (:func:`witness_edge_value`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import FiltrationError, InputFormatError, ParameterError, ResourceLimitError
from .metric import landmark_indices

__all__ = [
    "Filtration",
    "flag_filtration",
    "rips_filtration",
    "witness_edge_value",
    "lazy_witness_edge_matrix",
    "lazy_witness_filtration",
    "sublevel_complex",
    "DEFAULT_SIMPLEX_CAP",
]

DEFAULT_SIMPLEX_CAP = 5_000_000


def _order_key(item):
    s, v = item
    return (v, len(s), s)


@dataclass(frozen=True)
class Filtration:
    """Simplices with appearance values, in (value, dimension, lexicographic) order.

    ``max_dim`` is the largest simplex dimension that was built and
    ``alpha_max`` the largest scale the build covers; sublevel queries beyond
    it are refused.
    """

    simplices: tuple
    values: np.ndarray
    max_dim: int
    alpha_max: float
    _index: dict = field(default=None, repr=False, compare=False)

    @classmethod
    def from_pairs(cls, pairs: Iterable, max_dim: Optional[int] = None,
                   alpha_max: Optional[float] = None, validate: bool = True) -> "Filtration":
        items = []
        for s, v in pairs:
            s = tuple(sorted(int(x) for x in s))
            items.append((s, float(v)))
        items.sort(key=_order_key)
        simplices = tuple(s for s, _ in items)
        values = np.array([v for _, v in items], dtype=np.float64)
        if max_dim is None:
            max_dim = max((len(s) - 1 for s in simplices), default=0)
        if alpha_max is None:
            alpha_max = float(values.max()) if values.size else 0.0
        values.setflags(write=False)
        f = cls(simplices, values, int(max_dim), float(alpha_max))
        if validate:
            f.validate()
        return f

    def __len__(self):
        return len(self.simplices)

    def __iter__(self):
        return zip(self.simplices, self.values.tolist())

    @property
    def index(self) -> dict:
        if self._index is None:
            object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.simplices)})
        return self._index

    def dims(self) -> np.ndarray:
        return np.fromiter((len(s) - 1 for s in self.simplices), dtype=np.intp,
                           count=len(self.simplices))

    def validate(self):
        """Check strict vertex order, uniqueness, bounds and face monotonicity."""
        index = self.index
        if len(index) != len(self.simplices):
            raise FiltrationError("duplicate simplex in filtration")
        vals = self.values
        for pos, s in enumerate(self.simplices):
            if len(s) == 0:
                raise FiltrationError("empty simplex in filtration")
            if any(s[i] >= s[i + 1] for i in range(len(s) - 1)):
                raise FiltrationError(f"simplex {s} has repeated vertices")
            if len(s) - 1 > self.max_dim:
                raise FiltrationError(f"simplex {s} exceeds max_dim={self.max_dim}")
            if vals[pos] < 0 or not math.isfinite(vals[pos]):
                raise FiltrationError(f"simplex {s} has invalid value {vals[pos]}")
            if len(s) > 1:
                for i in range(len(s)):
                    face = s[:i] + s[i + 1:]
                    fpos = index.get(face)
                    if fpos is None:
                        raise FiltrationError(f"face {face} of {s} is missing")
                    if fpos > pos:
                        raise FiltrationError(f"face {face} appears after {s}")

    def sublevel(self, alpha: float) -> set:
        return sublevel_complex(self, alpha)

    def to_text(self) -> str:
        lines = []
        for s, v in zip(self.simplices, self.values.tolist()):
            lines.append(f"{len(s) - 1} {' '.join(map(str, s))} {v!r}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, alpha_max: Optional[float] = None) -> "Filtration":
        pairs = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                dim = int(parts[0])
                verts = [int(x) for x in parts[1:-1]]
                value = float(parts[-1])
            except (ValueError, IndexError):
                raise InputFormatError(f"cannot parse filtration entry {raw!r}", lineno) from None
            if len(verts) != dim + 1:
                raise InputFormatError(f"dimension {dim} needs {dim + 1} vertices", lineno)
            pairs.append((verts, value))
        try:
            return cls.from_pairs(pairs, alpha_max=alpha_max)
        except FiltrationError:
            raise
        except ValueError as exc:
            raise InputFormatError(str(exc)) from None


def flag_filtration(edge_values: np.ndarray, max_dim: int = 2,
                    alpha_max: Optional[float] = None,
                    max_simplices: int = DEFAULT_SIMPLEX_CAP) -> Filtration:
    """Clique expansion of a weighted complete graph.

    Vertices enter at 0; a k-simplex enters at the largest value among its
    edges. Only simplices with value ``<= alpha_max`` are generated.
    """
    w = np.asarray(edge_values, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ParameterError("edge value matrix must be square")
    if max_dim < 0:
        raise ParameterError("max_dim must be >= 0")
    m = w.shape[0]
    if alpha_max is None:
        alpha_max = float(w.max()) if m > 1 else 0.0
    alpha_max = float(alpha_max)

    pairs = [((v,), 0.0) for v in range(m)]
    if max_dim >= 1 and m > 1:
        ok = w <= alpha_max
        upper = [np.flatnonzero(ok[v, v + 1:]) + v + 1 for v in range(m)]
        upper_sets = [set(u.tolist()) for u in upper]
        rows = w.tolist()
        # depth-first expansion: (simplex, value, common upper neighbours)
        stack = [((v,), 0.0, upper[v].tolist()) for v in range(m - 1, -1, -1)]
        while stack:
            s, val, cands = stack.pop()
            if len(s) > max_dim:
                continue
            for u in cands:
                nv = val
                for x in s:
                    wx = rows[x][u]
                    if wx > nv:
                        nv = wx
                t = s + (u,)
                pairs.append((t, nv))
                if len(t) <= max_dim:
                    common = [c for c in cands if c > u and c in upper_sets[u]]
                    if common:
                        stack.append((t, nv, common))
            if len(pairs) > max_simplices:
                raise ResourceLimitError(
                    f"flag complex exceeds {max_simplices} simplices; lower alpha_max or max_dim")
    return Filtration.from_pairs(pairs, max_dim=max_dim, alpha_max=alpha_max, validate=False)


def rips_filtration(dm: np.ndarray, max_dim: int = 2, alpha_max: Optional[float] = None,
                    max_simplices: int = DEFAULT_SIMPLEX_CAP) -> Filtration:
    """Vietoris-Rips filtration of a (landmark) distance matrix."""
    if alpha_max is not None and alpha_max <= 0:
        raise ParameterError("alpha_max must be positive")
    return flag_filtration(dm, max_dim, alpha_max, max_simplices)


def witness_edge_value(dm_pl: np.ndarray, nu_d: np.ndarray, a: int, b: int) -> float:
    """Smallest alpha at which some witness admits the edge between landmarks a and b.

    ``dm_pl`` holds distances from every point (rows) to every landmark
    (columns) and ``nu_d`` the per-point distance to its nu-th nearest
    landmark.
    """
    if a == b:
        raise ParameterError("an edge needs two distinct landmarks")
    slack = np.maximum(dm_pl[:, a], dm_pl[:, b]) - nu_d
    return max(0.0, float(slack.min()))


def lazy_witness_edge_matrix(dm_pl: np.ndarray, nu_d: np.ndarray) -> np.ndarray:
    """All pairwise lazy witness edge values at once (zero diagonal)."""
    x = np.asarray(dm_pl, dtype=np.float64)
    nu_col = np.asarray(nu_d, dtype=np.float64)[:, None]
    m = x.shape[1]
    out = np.zeros((m, m))
    for a in range(m - 1):
        slack = np.maximum(x[:, a:a + 1], x[:, a + 1:]) - nu_col
        out[a, a + 1:] = slack.min(axis=0)
    np.maximum(out, 0.0, out=out)
    out = out + out.T
    out.setflags(write=False)
    return out


def _witness_inputs(dm_pl, landmarks, nu):
    x = np.asarray(dm_pl, dtype=np.float64)
    m = x.shape[1]
    if landmarks is not None and len(landmark_indices(landmarks)) != m:
        raise ParameterError("landmark set does not match the cross-distance block")
    if not isinstance(nu, (int, np.integer)) or nu < 1:
        raise ParameterError(f"nu must be a positive integer, got {nu!r}")
    if nu > m:
        raise ParameterError(f"nu={nu} exceeds the number of landmarks ({m})")
    nu_d = np.partition(x, nu - 1, axis=1)[:, nu - 1]
    return x, nu_d


def _landmark_diameter(x, landmarks):
    if landmarks is None:
        return None
    idx = landmark_indices(landmarks)
    return float(x[idx].max())


def lazy_witness_filtration(dm_pl: np.ndarray, landmarks=None, nu: int = 1, max_dim: int = 2,
                            alpha_max: Optional[float] = None,
                            max_simplices: int = DEFAULT_SIMPLEX_CAP) -> Filtration:
    """Lazy witness filtration on the landmarks; every point of the cloud may witness.

    ``alpha_max`` defaults to the landmark-set diameter (needs ``landmarks``
    to locate the landmark rows of ``dm_pl``), otherwise to the largest edge
    value, which already gives the complete complex.
    """
    x, nu_d = _witness_inputs(dm_pl, landmarks, nu)
    w = lazy_witness_edge_matrix(x, nu_d)
    if alpha_max is None:
        alpha_max = _landmark_diameter(x, landmarks)
    return flag_filtration(w, max_dim, alpha_max, max_simplices)


def sublevel_complex(f: Filtration, alpha: float) -> set:
    """All simplices of ``f`` present at scale ``alpha``."""
    if alpha > f.alpha_max * (1 + 1e-12):
        raise ParameterError(f"alpha={alpha} lies beyond the build range alpha_max={f.alpha_max}")
    cut = int(np.searchsorted(f.values, alpha, side="right"))
    return set(f.simplices[:cut])
