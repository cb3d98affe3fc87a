"""Synthetic point clouds and coordinate-file ingestion."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputFormatError, ParameterError
from .metric import as_distance_matrix, as_point_cloud

__all__ = [
    "TorusSpec",
    "TangledSpec",
    "sample_torus",
    "sample_tangled_tori",
    "torus_residual",
    "thin_maxmin",
    "load_points",
    "parse_points",
    "load_distance_matrix",
]


@dataclass(frozen=True)
class TorusSpec:
    major_radius: float = 2.5
    minor_radius: float = 0.5
    n: int = 500
    seed: int = 0

    def __post_init__(self):
        if not (self.major_radius > self.minor_radius > 0):
            raise ParameterError("torus needs major_radius > minor_radius > 0")
        if self.n < 1:
            raise ParameterError("sample size must be >= 1")


@dataclass(frozen=True)
class TangledSpec:
    """Two equal tori linked like a Hopf link.

    Torus A lies in the xy-plane around the origin. Torus B is a copy rotated
    90 degrees about the x-axis and shifted by ``(R, 0, 0)``, so each core
    circle passes through the other's centre.
    """

    major_radius: float = 2.5
    minor_radius: float = 0.5
    n: int = 1000
    seed: int = 0

    def __post_init__(self):
        TorusSpec(self.major_radius, self.minor_radius, max(self.n, 1), self.seed)
        if self.n < 2:
            raise ParameterError("a tangled pair needs at least two points")


def _torus_points(rng, big_r, small_r, n):
    """Area-uniform torus samples by rejection on the tube angle."""
    thetas = []
    have = 0
    while have < n:
        batch = max(2 * (n - have), 64)
        th = rng.uniform(0.0, 2 * np.pi, batch)
        keep = rng.uniform(0.0, 1.0, batch) < (big_r + small_r * np.cos(th)) / (big_r + small_r)
        thetas.append(th[keep])
        have += int(keep.sum())
    theta = np.concatenate(thetas)[:n]
    phi = rng.uniform(0.0, 2 * np.pi, n)
    ring = big_r + small_r * np.cos(theta)
    return np.column_stack([ring * np.cos(phi), ring * np.sin(phi), small_r * np.sin(theta)])


def sample_torus(spec: TorusSpec) -> np.ndarray:
    """Points drawn uniformly (w.r.t. surface area) from a torus in R^3."""
    rng = np.random.default_rng(spec.seed)
    return as_point_cloud(_torus_points(rng, spec.major_radius, spec.minor_radius, spec.n))


def sample_tangled_tori(spec: TangledSpec) -> np.ndarray:
    """Two linked torus samples; the first ``ceil(n/2)`` rows belong to torus A."""
    seq_a, seq_b = np.random.SeedSequence(spec.seed).spawn(2)
    n_a = (spec.n + 1) // 2
    n_b = spec.n // 2
    big_r, small_r = spec.major_radius, spec.minor_radius
    a = _torus_points(np.random.default_rng(seq_a), big_r, small_r, n_a)
    b = _torus_points(np.random.default_rng(seq_b), big_r, small_r, n_b)
    b = np.column_stack([b[:, 0] + big_r, -b[:, 2], b[:, 1]])
    return as_point_cloud(np.vstack([a, b]))


def torus_residual(points, major_radius, minor_radius, center=(0.0, 0.0, 0.0), axis="z"):
    """``(||(x,y)|| - R)^2 + z^2 - r^2`` in the torus' own frame (0 on the surface)."""
    p = np.asarray(points, dtype=np.float64) - np.asarray(center)
    if axis == "z":
        x, y, z = p[:, 0], p[:, 1], p[:, 2]
    elif axis == "y":
        x, y, z = p[:, 0], p[:, 2], p[:, 1]
    else:
        raise ParameterError("axis must be 'z' or 'y'")
    return (np.hypot(x, y) - major_radius) ** 2 + z ** 2 - minor_radius ** 2


def thin_maxmin(points, n: int, seed=None) -> np.ndarray:
    """Evenly spread ``n``-point subset of a larger sample (farthest-point order)."""
    from .landmarks import maxmin_landmarks
    from .metric import distance_matrix

    pts = as_point_cloud(points)
    idx = maxmin_landmarks(distance_matrix(pts), n, seed).indices
    return as_point_cloud(pts[np.sort(np.array(idx))])


def _parse_rows(rows, split):
    data = []
    width = None
    for lineno, raw in rows:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = split(line)
        try:
            vals = [float(x) for x in fields]
        except ValueError:
            raise InputFormatError(f"non-numeric field in {line!r}", lineno) from None
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise InputFormatError(f"expected {width} columns, found {len(vals)}", lineno)
        data.append(vals)
    if not data:
        raise InputFormatError("no points found (empty file)")
    return np.array(data, dtype=np.float64)


def _is_chem_xyz(lines):
    """Molecular .xyz: atom count, comment line, then ``Symbol x y z`` rows."""
    if len(lines) < 3:
        return False
    head = lines[0].strip().split()
    if len(head) != 1 or not head[0].isdigit():
        return False
    first = lines[2].strip().split()
    return len(first) == 4 and not _is_number(first[0])


def _is_number(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def parse_points(text: str, fmt: str = "csv") -> np.ndarray:
    """Parse point coordinates from CSV or whitespace-separated (XYZ) text."""
    lines = text.splitlines()
    numbered = list(enumerate(lines, start=1))
    if fmt == "csv":
        def split(line):
            return next(csv.reader(io.StringIO(line)))
    elif fmt == "xyz":
        if _is_chem_xyz(lines):
            count = int(lines[0].strip())
            numbered = numbered[2:2 + count]

            def split(line):
                return line.split()[1:]
        else:
            def split(line):
                return line.split()
    else:
        raise ParameterError(f"unknown point format {fmt!r}; use 'csv' or 'xyz'")
    arr = _parse_rows(numbered, split)
    try:
        return as_point_cloud(arr)
    except InputFormatError as exc:
        raise InputFormatError(str(exc)) from None


def load_points(path, fmt: str | None = None) -> np.ndarray:
    path = Path(path)
    if fmt is None:
        fmt = "xyz" if path.suffix.lower() in (".xyz", ".txt", ".dat") else "csv"
    return parse_points(path.read_text(), fmt)


def load_distance_matrix(path) -> np.ndarray:
    """Read a square CSV distance matrix (for metrics other than Euclidean)."""
    arr = _parse_rows(enumerate(Path(path).read_text().splitlines(), start=1),
                      lambda line: line.split(","))
    return as_distance_matrix(arr)
