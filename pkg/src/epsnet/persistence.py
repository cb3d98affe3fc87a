"""Persistent homology over Z/2.

Two engines produce the same diagrams:

* :func:`compute_persistence` reduces the boundary matrix of an explicit
  :class:`~epsnet.complexes.Filtration` (standard column reduction with the
  clearing/twist optimisation).
* :func:`flag_persistence` works directly from the edge-value matrix of a flag
  complex (Rips or lazy witness) without materialising higher simplices as
  Python objects. It reduces the coboundary matrix dimension by dimension,
  pairs apparent pairs in vectorised batches and only runs the sequential
  reduction on the remaining columns.

:func:`betti_at` is a dense rank computation used as an independent oracle.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .complexes import DEFAULT_SIMPLEX_CAP, Filtration, sublevel_complex
from .errors import FiltrationError, InputFormatError, ParameterError, ResourceLimitError

__all__ = [
    "PersistenceDiagram",
    "compute_persistence",
    "flag_persistence",
    "betti_at",
    "enclosing_radius",
    "BETTI_ORACLE_LIMIT",
]

BETTI_ORACLE_LIMIT = 2000
_EMPTY = np.zeros((0, 2))
_EMPTY.setflags(write=False)


@dataclass(frozen=True)
class PersistenceDiagram:
    """Intervals ``[birth, death)`` per homology dimension; ``death`` may be inf."""

    intervals: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for dim, arr in self.intervals.items():
            a = np.array(arr, dtype=np.float64).reshape(-1, 2)
            if a.size:
                order = np.lexsort((a[:, 1], a[:, 0]))
                a = a[order]
            a.setflags(write=False)
            clean[int(dim)] = a
        object.__setattr__(self, "intervals", clean)

    def __getitem__(self, dim: int) -> np.ndarray:
        return self.intervals.get(int(dim), _EMPTY)

    @property
    def dims(self) -> list:
        return sorted(self.intervals)

    def count_alive(self, alpha: float, dim: int) -> int:
        a = self[dim]
        return int(np.count_nonzero((a[:, 0] <= alpha) & (alpha < a[:, 1])))

    def finite(self, dim: int) -> np.ndarray:
        a = self[dim]
        return a[np.isfinite(a[:, 1])]

    def lifetimes(self, dim: int, cap: Optional[float] = None) -> np.ndarray:
        a = self[dim]
        d = a[:, 1] if cap is None else np.minimum(a[:, 1], cap)
        return np.sort(d - a[:, 0])[::-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("dim,birth,death\n")
        for dim in self.dims:
            for b, d in self[dim].tolist():
                dtxt = "inf" if math.isinf(d) else repr(d)
                buf.write(f"{dim},{b!r},{dtxt}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PersistenceDiagram":
        rows = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("dim"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise InputFormatError("expected dim,birth,death", lineno)
            try:
                dim, b, d = int(parts[0]), float(parts[1]), float(parts[2])
            except ValueError:
                raise InputFormatError(f"cannot parse {raw!r}", lineno) from None
            rows.setdefault(dim, []).append((b, d))
        return cls(rows)


def _diagram_from_pairs(pairs_by_dim: dict, dims) -> PersistenceDiagram:
    out = {}
    for k in dims:
        pts = [(b, d) for b, d in pairs_by_dim.get(k, ()) if d > b]
        out[k] = np.array(pts, dtype=np.float64).reshape(-1, 2)
    return PersistenceDiagram(out)


# ---------------------------------------------------------------------------
# explicit boundary-matrix reduction


def compute_persistence(f: Filtration) -> PersistenceDiagram:
    """Persistence diagram of an explicit filtration.

    Dimensions ``0..max_dim-1`` are complete; dimension ``max_dim`` only
    carries births, since nothing of higher dimension can kill them.
    """
    index = f.index
    simplices = f.simplices
    values = f.values.tolist()
    dims = [len(s) - 1 for s in simplices]
    by_dim = {}
    for pos, k in enumerate(dims):
        by_dim.setdefault(k, []).append(pos)

    def boundary(pos):
        s = simplices[pos]
        out = set()
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            fpos = index.get(face)
            if fpos is None:
                raise FiltrationError(f"face {face} of {s} is missing")
            if fpos >= pos:
                raise FiltrationError(f"face {face} does not precede {s}")
            out.add(fpos)
        return out

    paired = {}          # creator position -> destroyer position
    destroyers = set()
    for k in sorted(by_dim, reverse=True):
        if k == 0:
            continue
        pivot_owner = {}
        reduced = {}
        for pos in by_dim[k]:
            if pos in paired:  # cleared: a creator column reduces to zero
                continue
            col = boundary(pos)
            while col:
                low = max(col)
                owner = pivot_owner.get(low)
                if owner is None:
                    break
                col ^= reduced[owner]
            if col:
                low = max(col)
                pivot_owner[low] = pos
                reduced[pos] = col
                paired[low] = pos
                destroyers.add(pos)

    pairs = {}
    for pos, k in enumerate(dims):
        if pos in destroyers:
            continue
        death = values[paired[pos]] if pos in paired else math.inf
        pairs.setdefault(k, []).append((values[pos], death))
    top = max(f.max_dim, max(dims, default=0))
    return _diagram_from_pairs(pairs, range(top + 1))


# ---------------------------------------------------------------------------
# dense rank oracle


def _gf2_rank(columns) -> int:
    pivots = {}
    rank = 0
    for v in columns:
        while v:
            h = v.bit_length() - 1
            p = pivots.get(h)
            if p is None:
                pivots[h] = v
                rank += 1
                break
            v ^= p
    return rank


def betti_at(f: Filtration, alpha: float, k: int) -> int:
    """Rank of H_k of the sublevel complex at ``alpha`` by Gaussian elimination."""
    if k < 0 or k > max(f.max_dim - 1, 0):
        raise ParameterError(f"betti_at needs 0 <= k <= max_dim-1 (max_dim={f.max_dim})")
    cx = sublevel_complex(f, alpha)
    if len(cx) > BETTI_ORACLE_LIMIT:
        raise ResourceLimitError(f"oracle refuses complexes above {BETTI_ORACLE_LIMIT} simplices")
    by_dim = {}
    for s in cx:
        by_dim.setdefault(len(s) - 1, []).append(s)
    for lst in by_dim.values():
        lst.sort()

    def boundary_rank(d):
        if d == 0 or d not in by_dim:
            return 0
        row = {s: i for i, s in enumerate(by_dim.get(d - 1, ()))}
        cols = []
        for s in by_dim[d]:
            v = 0
            for i in range(len(s)):
                v |= 1 << row[s[:i] + s[i + 1:]]
            cols.append(v)
        return _gf2_rank(cols)

    n_k = len(by_dim.get(k, ()))
    return n_k - boundary_rank(k) - boundary_rank(k + 1)


# ---------------------------------------------------------------------------
# implicit flag-complex cohomology


def enclosing_radius(edge_values: np.ndarray) -> float:
    """Smallest scale at which some vertex is joined to all others.

    From there on every sublevel flag complex is a cone, so no homology below
    the top dimension is created or survives past this value.
    """
    w = np.array(edge_values, dtype=np.float64)
    m = w.shape[0]
    if m < 2:
        return 0.0
    np.fill_diagonal(w, -np.inf)
    return float(w.max(axis=1).min())


class _FlagComplex:
    """Vectorised simplex arithmetic for a flag complex truncated at ``alpha``."""

    def __init__(self, w: np.ndarray, alpha: float):
        self.w = w
        self.m = w.shape[0]
        self.alpha = alpha
        self.ok = w <= alpha
        np.fill_diagonal(self.ok, False)
        self.value_ranks = np.unique(np.append(w[self.ok], 0.0))

    def codes(self, verts: np.ndarray) -> np.ndarray:
        """Lexicographic rank of sorted vertex tuples (base-m digits)."""
        out = np.zeros(verts.shape[0], dtype=np.int64)
        for j in range(verts.shape[1]):
            out = out * self.m + verts[:, j]
        return out

    def edges(self):
        iu, ju = np.nonzero(np.triu(self.ok, k=1))
        verts = np.stack([iu, ju], axis=1).astype(np.int64)
        vals = self.w[iu, ju].astype(np.float64)
        return verts, vals

    def expand(self, verts: np.ndarray, vals: np.ndarray, chunk: int, cap: int):
        """All (k+1)-simplices whose largest-vertex prefix is a k-simplex in ``verts``."""
        out_v, out_f = [], []
        total = 0
        for start in range(0, verts.shape[0], chunk):
            v = verts[start:start + chunk]
            f = vals[start:start + chunk]
            mask = np.ones((v.shape[0], self.m), dtype=bool)
            cof = np.broadcast_to(f[:, None], mask.shape).copy()
            for j in range(v.shape[1]):
                mask &= self.ok[v[:, j]]
                np.maximum(cof, self.w[v[:, j]], out=cof)
            mask &= np.arange(self.m)[None, :] > v[:, -1:]
            rows, us = np.nonzero(mask)
            total += rows.size
            if total > cap:
                raise ResourceLimitError(
                    f"flag complex exceeds {cap} simplices in one dimension; lower alpha_max")
            out_v.append(np.concatenate([v[rows], us[:, None]], axis=1))
            out_f.append(cof[rows, us])
        k1 = verts.shape[1] + 1
        if not out_v:
            return np.zeros((0, k1), dtype=np.int64), np.zeros(0)
        return np.concatenate(out_v), np.concatenate(out_f)

    def coboundary_arrays(self, v: np.ndarray, f: np.ndarray):
        """Values and codes of all cofacets for a batch of simplices.

        Returns ``(vals, codes)`` of shape ``(B, m)``; entries for vertices
        already in the simplex or beyond ``alpha`` have value ``inf``.
        """
        b, kk = v.shape
        m = self.m
        vals = np.broadcast_to(f[:, None], (b, m)).copy()
        valid = np.ones((b, m), dtype=bool)
        for j in range(kk):
            valid &= self.ok[v[:, j]]
            np.maximum(vals, self.w[v[:, j]], out=vals)
        vals[~valid] = np.inf
        u = np.arange(m, dtype=np.int64)[None, :]
        # insert u into the sorted tuple and read off base-m digits
        codes = np.zeros((b, m), dtype=np.int64)
        placed = np.zeros((b, m), dtype=bool)
        for j in range(kk):
            vj = v[:, j:j + 1]
            put_u = (~placed) & (u < vj)
            codes = np.where(put_u, codes * m + u, codes)
            placed |= put_u
            codes = codes * m + vj
        codes = np.where(~placed, codes * m + u, codes)
        return vals, codes

    def facet_keys(self, tau: np.ndarray, tau_vals: np.ndarray, skip_pos: np.ndarray):
        """Largest (value, code) among facets of ``tau`` other than the one at ``skip_pos``.

        ``skip_pos[b]`` is the position (in tau[b]) of the vertex whose removal
        gives the simplex being tested.
        """
        b, kk = tau.shape
        best_v = np.full(b, -np.inf)
        best_c = np.full(b, -1, dtype=np.int64)
        for drop in range(kk):
            keep = [j for j in range(kk) if j != drop]
            face = tau[:, keep]
            if face.shape[1] == 1:
                fv = np.zeros(b)
            else:
                fv = np.zeros(b)
                for x in range(len(keep)):
                    for y in range(x + 1, len(keep)):
                        np.maximum(fv, self.w[face[:, x], face[:, y]], out=fv)
            fc = self.codes(face)
            use = skip_pos != drop
            better = use & ((fv > best_v) | ((fv == best_v) & (fc > best_c)))
            best_v = np.where(better, fv, best_v)
            best_c = np.where(better, fc, best_c)
        return best_v, best_c


def flag_persistence(edge_values: np.ndarray, max_hom_dim: int = 1,
                     alpha_max: Optional[float] = None,
                     max_simplices: int = DEFAULT_SIMPLEX_CAP,
                     chunk_entries: int = 2_000_000) -> PersistenceDiagram:
    """Persistence of the flag filtration of ``edge_values`` in dims ``0..max_hom_dim``.

    Vertices enter at 0 and the diagonal is ignored. Simplices above
    ``alpha_max`` (default: the largest edge value) are excluded. Past the
    enclosing radius nothing below the top dimension changes except by
    zero-length intervals, so the computation stops there.
    """
    w = np.array(edge_values, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ParameterError("edge value matrix must be square")
    if max_hom_dim < 0:
        raise ParameterError("max_hom_dim must be >= 0")
    m = w.shape[0]
    np.fill_diagonal(w, 0.0)
    if alpha_max is None:
        alpha_max = float(w.max()) if m > 1 else 0.0
    alpha = min(float(alpha_max), enclosing_radius(w)) if m > 1 else 0.0
    cx = _FlagComplex(w, alpha)
    pairs = {k: [] for k in range(max_hom_dim + 1)}

    # H0 by union-find in filtration order; merging edges are the cleared set
    verts, vals = cx.edges()
    codes = cx.codes(verts)
    order = np.lexsort((codes, vals))
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    cleared = set()
    for e in order.tolist():
        a, b = find(int(verts[e, 0])), find(int(verts[e, 1]))
        if a != b:
            parent[max(a, b)] = min(a, b)
            cleared.add(int(codes[e]))
            pairs[0].append((0.0, float(vals[e])))
    roots = sum(1 for x in range(m) if find(x) == x)
    pairs[0].extend([(0.0, math.inf)] * roots)

    for k in range(1, max_hom_dim + 1):
        if verts.shape[0] == 0:
            break
        if verts.shape[0] > max_simplices:
            raise ResourceLimitError(f"{verts.shape[0]} {k}-simplices exceed cap {max_simplices}")
        next_cleared = _reduce_dimension(cx, verts, vals, codes, cleared, pairs[k],
                                         chunk_entries)
        if k < max_hom_dim:
            chunk = max(1, chunk_entries // max(m, 1))
            verts, vals = cx.expand(verts, vals, chunk, max_simplices)
            codes = cx.codes(verts)
        cleared = next_cleared
    return _diagram_from_pairs(pairs, range(max_hom_dim + 1))


def _xor_sorted(a, b):
    """Symmetric difference of two sorted duplicate-free arrays, kept sorted (Z/2 column sum)."""
    if a.size == 0:
        return b
    pos = np.searchsorted(a, b)
    hit = a[np.minimum(pos, a.size - 1)] == b
    if hit.any():
        keep = np.ones(a.size, dtype=bool)
        keep[pos[hit]] = False
        a = a[keep]
        b = b[~hit]
        pos = np.searchsorted(a, b)
    out = np.empty(a.size + b.size, dtype=a.dtype)
    at_b = pos + np.arange(b.size)
    mask = np.ones(out.size, dtype=bool)
    mask[at_b] = False
    out[at_b] = b
    out[mask] = a
    return out


def _reduce_dimension(cx: _FlagComplex, verts, vals, codes, cleared, out_pairs, chunk_entries):
    """Reduce the coboundary columns of one dimension; returns the pivot codes."""
    keep = np.fromiter((c not in cleared for c in codes.tolist()), dtype=bool,
                       count=codes.size)
    verts, vals, codes = verts[keep], vals[keep], codes[keep]
    # columns in reverse filtration order
    order = np.lexsort((codes, vals))[::-1]
    verts, vals, codes = verts[order], vals[order], codes[order]
    n = verts.shape[0]
    m = cx.m
    chunk = max(1, chunk_entries // max(m, 1))

    piv_val = np.empty(n)
    piv_code = np.empty(n, dtype=np.int64)
    apparent = np.zeros(n, dtype=bool)
    for start in range(0, n, chunk):
        v = verts[start:start + chunk]
        f = vals[start:start + chunk]
        cv, cc = cx.coboundary_arrays(v, f)
        mn = cv.min(axis=1)
        masked = np.where(cv == mn[:, None], cc, np.iinfo(np.int64).max)
        u = masked.argmin(axis=1)
        rows = np.arange(v.shape[0])
        piv_val[start:start + len(v)] = mn
        piv_code[start:start + len(v)] = cc[rows, u]
        has = np.isfinite(mn) & (mn == f)
        if has.any():
            sel = np.flatnonzero(has)
            tau = np.concatenate([v[sel], u[sel, None]], axis=1)
            pos = np.argsort(tau, axis=1, kind="stable")
            tau = np.take_along_axis(tau, pos, axis=1)
            skip = np.argmax(pos == v.shape[1], axis=1)  # where u landed
            fv, fc = cx.facet_keys(tau, mn[sel], skip)
            mine_c = codes[start:start + len(v)][sel]
            mine_v = f[sel]
            is_max = (fv < mine_v) | ((fv == mine_v) & (fc < mine_c))
            apparent[start + sel[is_max]] = True

    # pack (value, code) into one sortable int64: every coface value is an edge value
    ranks = cx.value_ranks
    base = m ** (verts.shape[1] + 1)
    if ranks.size * float(base) >= 2.0 ** 62:
        raise ResourceLimitError("complex too large for packed column keys")

    def pack(cv, cc):
        return np.searchsorted(ranks, cv) * base + cc

    pivot_owner = {}
    for i in np.flatnonzero(apparent).tolist():
        pivot_owner[int(piv_code[i])] = i
    stored = {}

    def raw_column(i):
        cv, cc = cx.coboundary_arrays(verts[i:i + 1], vals[i:i + 1])
        ok = np.isfinite(cv[0])
        return np.sort(pack(cv[0][ok], cc[0][ok]))

    vals_list = vals.tolist()
    for i in range(n):
        if apparent[i]:
            continue  # zero-length pair; its pivot is already registered
        birth = vals_list[i]
        if not np.isfinite(piv_val[i]):
            out_pairs.append((birth, math.inf))
            continue
        if int(piv_code[i]) not in pivot_owner:
            pivot_owner[int(piv_code[i])] = i
            out_pairs.append((birth, float(piv_val[i])))
            continue
        col = raw_column(i)
        while col.size:
            owner = pivot_owner.get(int(col[0] % base))
            if owner is None:
                break
            other = stored.get(owner)
            if other is None:
                other = raw_column(owner)
            col = _xor_sorted(col, other)
        if col.size:
            pc = int(col[0] % base)
            pivot_owner[pc] = i
            stored[i] = col
            out_pairs.append((birth, float(ranks[col[0] // base])))
        else:
            out_pairs.append((birth, math.inf))
    return set(pivot_owner)
