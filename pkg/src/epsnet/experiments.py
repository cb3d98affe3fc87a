"""Experiment grids behind the ``epsnet`` command line.

A grid is ``algorithm x eps x repetition``. The point cloud is drawn once per
experiment (from the dataset seed) and only the landmark selection varies
between repetitions, so reference computations on the whole cloud, such as
its full Rips diagram, are shared by every run.

Per-run seeds come from ``SeedSequence(master_seed, spawn_key=...)`` and are
recorded in each :class:`RunRecord`. Budget baselines (``random``,
``maxmin``) receive ``K`` = the ``eps_net_maxmin`` landmark count of the same
``(eps, repetition)`` cell.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import datasets
from .complexes import DEFAULT_SIMPLEX_CAP, flag_filtration, lazy_witness_edge_matrix
from .diagnostics import (
    bootstrap_band,
    bottleneck,
    landscape,
    landscape_grid,
    log_scale_diagram,
    truncate_diagram,
    wasserstein1,
)
from .errors import ParameterError
from .landmarks import ALGORITHMS, BUDGET_ALGORITHMS, EPS_NET_ALGORITHMS, select_landmarks, verify_net
from .metric import cross_distances, diameter, distance_matrix, hausdorff, nu_distances
from .persistence import PersistenceDiagram, flag_persistence

__all__ = [
    "DatasetConfig",
    "ExperimentConfig",
    "RunRecord",
    "SizeLawFit",
    "derive_seed",
    "load_dataset",
    "run_landmarks",
    "counts_csv",
    "read_counts_csv",
    "fit_size_law",
    "validate_run",
    "run_validate",
    "run_effectiveness",
    "run_stability",
    "write_runs",
    "worker_count",
    "THREE_LOG_THREE",
]

THREE_LOG_THREE = 3.0 * math.log(3.0)
WORKERS_ENV = "EPSNET_WORKERS"
_TOL = 1e-9

# spawn-key purposes
_LANDMARKS = 0
_BAND = 1


@dataclass(frozen=True)
class DatasetConfig:
    kind: str = "torus"  # torus | tangled | points | distances
    n: int = 500
    major_radius: float = 2.5
    minor_radius: float = 0.5
    seed: int = 0
    path: Optional[str] = None
    format: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("torus", "tangled", "points", "distances"):
            raise ParameterError(f"unknown dataset kind {self.kind!r}")
        if self.kind in ("points", "distances") and not self.path:
            raise ParameterError(f"dataset kind {self.kind!r} needs a path")


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    algorithms: tuple = ALGORITHMS
    eps_grid: tuple = (0.4, 0.6, 1.0)
    seeds: int = 10
    nu: int = 1
    max_dim: int = 2  # largest homology dimension
    alpha_max: Optional[float] = None
    output_dir: Optional[str] = None
    master_seed: int = 0
    simplex_cap: int = DEFAULT_SIMPLEX_CAP
    alpha_factors: tuple = (2.0, 2.5, 3.0)
    replicates: int = 1000
    level: float = 0.95
    save_diagrams: bool = True

    def __post_init__(self):
        algs = tuple(self.algorithms)
        for a in algs:
            if a not in ALGORITHMS:
                raise ParameterError(f"unknown algorithm {a!r}; choose from {ALGORITHMS}")
        grid = tuple(float(e) for e in self.eps_grid)
        if not grid or any(e <= 0 or not math.isfinite(e) for e in grid):
            raise ParameterError("eps grid must be nonempty with positive finite values")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ParameterError("eps grid must be strictly increasing")
        if self.seeds < 1:
            raise ParameterError("seeds must be >= 1")
        if self.nu < 1:
            raise ParameterError("nu must be >= 1")
        if self.max_dim < 0:
            raise ParameterError("max_dim must be >= 0")
        if self.alpha_max is not None and not self.alpha_max > 0:
            raise ParameterError("alpha_max must be positive")
        object.__setattr__(self, "algorithms", algs)
        object.__setattr__(self, "eps_grid", grid)
        object.__setattr__(self, "alpha_factors", tuple(float(a) for a in self.alpha_factors))
        if isinstance(self.dataset, dict):
            object.__setattr__(self, "dataset", DatasetConfig(**self.dataset))

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        ds = data.get("dataset")
        if isinstance(ds, dict):
            bad = set(ds) - set(DatasetConfig.__dataclass_fields__)
            if bad:
                raise ParameterError(f"unknown dataset keys: {sorted(bad)}")
            data["dataset"] = DatasetConfig(**ds)
        for key in ("algorithms", "eps_grid", "alpha_factors"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        ds = {k[8:]: kw.pop(k) for k in list(kw) if k.startswith("dataset_")}
        cfg = self
        if ds:
            cfg = replace(cfg, dataset=replace(cfg.dataset, **ds))
        return replace(cfg, **kw) if kw else cfg

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunRecord:
    algorithm: str
    eps: float
    rep: int
    seed: int
    landmark_count: int
    budget: Optional[int] = None
    seconds: dict = field(default_factory=dict)
    diagram_paths: dict = field(default_factory=dict)
    distances: dict = field(default_factory=dict)
    validators: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.landmark_count < 1:
            raise ParameterError("landmark count must be >= 1")
        if any(t < 0 for t in self.seconds.values()):
            raise ParameterError("stage times must be >= 0")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, default=_json_default)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def derive_seed(master_seed: int, *key: int) -> int:
    """Deterministic 32-bit child seed for a spawn key."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1)[0])


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ParameterError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


# ---------------------------------------------------------------------------
# shared per-experiment state; set in the parent or in each worker

_STATE = {}


def _install(dm, config):
    _STATE["dm"] = dm
    _STATE["config"] = config


def _map(fn, jobs, dm, config):
    workers = min(worker_count(), max(len(jobs), 1))
    if workers <= 1:
        _install(dm, config)
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(workers, initializer=_install, initargs=(dm, config)) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def load_dataset(ds: DatasetConfig) -> np.ndarray:
    """Distance matrix of the configured cloud."""
    if ds.kind == "torus":
        pts = datasets.sample_torus(datasets.TorusSpec(ds.major_radius, ds.minor_radius, ds.n, ds.seed))
    elif ds.kind == "tangled":
        pts = datasets.sample_tangled_tori(
            datasets.TangledSpec(ds.major_radius, ds.minor_radius, ds.n, ds.seed))
    elif ds.kind == "points":
        pts = datasets.load_points(ds.path, ds.format)
    else:
        return datasets.load_distance_matrix(ds.path)
    return distance_matrix(pts)


def _cells(config):
    return [(alg, ei, rep) for ei in range(len(config.eps_grid)) for alg in config.algorithms
            for rep in range(config.seeds)]


def _select(dm, config, alg, ei, rep):
    eps = config.eps_grid[ei]
    seed = derive_seed(config.master_seed, _LANDMARKS, ALGORITHMS.index(alg), ei, rep)
    budget = None
    if alg in BUDGET_ALGORITHMS:
        ref_seed = derive_seed(config.master_seed, _LANDMARKS,
                               ALGORITHMS.index("eps_net_maxmin"), ei, rep)
        budget = len(select_landmarks("eps_net_maxmin", dm, eps=eps, seed=ref_seed))
        lm = select_landmarks(alg, dm, k=budget, seed=seed)
    else:
        lm = select_landmarks(alg, dm, eps=eps, seed=seed)
    return lm, seed, budget


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


# ---------------------------------------------------------------------------
# landmark counts and the size law


def _landmark_job(job):
    alg, ei, rep = job
    dm, config = _STATE["dm"], _STATE["config"]
    (lm, seed, budget), secs = _timed(_select, dm, config, alg, ei, rep)
    rec = RunRecord(alg, config.eps_grid[ei], rep, seed, len(lm), budget,
                    seconds={"landmarks": secs})
    return rec, lm


def run_landmarks(config: ExperimentConfig, dm: Optional[np.ndarray] = None):
    """Landmark counts for every grid cell; returns ``(records, landmark_sets)``."""
    if dm is None:
        dm = load_dataset(config.dataset)
    out = _map(_landmark_job, _cells(config), dm, config)
    return [r for r, _ in out], [lm for _, lm in out]


def counts_csv(records, diam: float) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "eps", "rep", "seed", "count", "budget", "diameter"])
    for r in records:
        w.writerow([r.algorithm, repr(r.eps), r.rep, r.seed, r.landmark_count,
                    "" if r.budget is None else r.budget, repr(diam)])
    return buf.getvalue()


def read_counts_csv(text: str):
    """``(eps, counts, diameter, algorithms)`` columns from a counts table."""
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ParameterError("counts table is empty")
    try:
        eps = np.array([float(r["eps"]) for r in rows])
        counts = np.array([float(r["count"]) for r in rows])
        diam = float(rows[0]["diameter"]) if rows[0].get("diameter") else None
    except (KeyError, ValueError) as exc:
        raise ParameterError(f"malformed counts table: {exc}") from None
    algs = [r.get("algorithm", "") for r in rows]
    return eps, counts, diam, algs


@dataclass(frozen=True)
class SizeLawFit:
    theta: float
    r_squared: float
    diameter: float
    points: int


def fit_size_law(eps, counts, diam: float) -> SizeLawFit:
    """Least squares for ``log(count) = theta * log(diam / eps)`` with diam fixed."""
    eps = np.asarray(eps, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    if eps.shape != counts.shape or eps.ndim != 1:
        raise ParameterError("eps and counts must be 1-D arrays of equal length")
    if np.unique(eps).size < 4:
        raise ParameterError("size-law fit needs at least 4 distinct eps values")
    if np.any(eps <= 0) or np.any(counts < 1) or not diam > 0:
        raise ParameterError("eps, counts and diameter must be positive")
    x = np.log(diam / eps)
    y = np.log(counts)
    sxx = float(x @ x)
    if sxx == 0.0:
        raise ParameterError("degenerate eps grid: every eps equals the diameter")
    theta = float(x @ y) / sxx
    resid = y - theta * x
    sst = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(resid @ resid) / sst if sst > 0 else 1.0
    return SizeLawFit(theta, r2, float(diam), int(eps.size))


# ---------------------------------------------------------------------------
# theorem validators


def _lw_matrix(dm, idx, nu):
    block = cross_distances(dm, idx)
    return lazy_witness_edge_matrix(block, nu_distances(dm, idx, nu))


def _simplex_set(w, alpha, cap):
    return set(flag_filtration(w, 2, alpha, cap).simplices)


def sandwich_check(dm, idx, eps, factor, cap=DEFAULT_SIMPLEX_CAP, w1=None) -> dict:
    """Compare simplex sets of ``R_{a/3}(L)``, ``LW_a(P, L, 1)`` and ``R_{3a}(L)`` up to dim 2."""
    alpha = factor * eps
    if factor < 2.0:
        return {"factor": factor, "status": "out of theorem range"}
    if w1 is None:
        w1 = _lw_matrix(dm, idx, 1)
    rips = dm[np.ix_(idx, idx)]
    low = _simplex_set(rips, alpha / 3.0, cap)
    mid = _simplex_set(w1, alpha, cap)
    high = _simplex_set(rips, 3.0 * alpha, cap)
    lower_bad = len(low - mid)
    upper_bad = len(mid - high)
    return {"factor": factor, "status": "pass" if lower_bad == upper_bad == 0 else "fail",
            "lower_violations": lower_bad, "upper_violations": upper_bad,
            "sizes": [len(low), len(mid), len(high)]}


def validate_run(dm, landmarks, eps, config: ExperimentConfig) -> dict:
    """Net, Hausdorff, sandwich and log-bottleneck checks for one landmark set."""
    idx = np.asarray(getattr(landmarks, "indices", landmarks), dtype=np.intp)
    out = {}
    rep = verify_net(dm, idx, eps)
    out["net"] = {"pass": rep.is_net, "sparse": rep.is_sparse, "sample": rep.is_sample,
                  "min_pairwise": rep.min_pairwise, "cover_gap": rep.max_cover_gap}
    h = hausdorff(dm, np.arange(dm.shape[0]), idx)
    out["hausdorff"] = {"pass": h <= eps + _TOL, "value": h, "slack": eps - h}
    w1 = _lw_matrix(dm, idx, 1)
    checks = [sandwich_check(dm, idx, eps, f, config.simplex_cap, w1) for f in config.alpha_factors]
    out["sandwich"] = {"pass": all(c["status"] != "fail" for c in checks), "checks": checks}

    w = w1 if config.nu == 1 else _lw_matrix(dm, idx, config.nu)
    lw = flag_persistence(w, config.max_dim, config.alpha_max, config.simplex_cap)
    rips = flag_persistence(dm[np.ix_(idx, idx)], config.max_dim, config.alpha_max,
                            config.simplex_cap)
    lw_t, rips_t = truncate_diagram(lw, 2 * eps), truncate_diagram(rips, 2 * eps)
    lw_log, rips_log = log_scale_diagram(lw_t), log_scale_diagram(rips_t)
    per_dim = {}
    for k in range(config.max_dim + 1):
        value = bottleneck(lw_log[k], rips_log[k])
        per_dim[str(k)] = {"log_bottleneck": value, "raw_bottleneck": bottleneck(lw_t[k], rips_t[k]),
                           "slack": THREE_LOG_THREE - value}
    ok = all(v["log_bottleneck"] <= THREE_LOG_THREE + _TOL for v in per_dim.values())
    out["bottleneck"] = {"pass": ok, "bound": THREE_LOG_THREE, "dims": per_dim}
    out["pass"] = all(out[k]["pass"] for k in ("net", "hausdorff", "sandwich", "bottleneck"))
    return out


def _validate_job(job):
    alg, ei, rep = job
    dm, config = _STATE["dm"], _STATE["config"]
    (lm, seed, budget), t_lm = _timed(_select, dm, config, alg, ei, rep)
    report, t_val = _timed(validate_run, dm, lm, config.eps_grid[ei], config)
    return RunRecord(alg, config.eps_grid[ei], rep, seed, len(lm), budget,
                     seconds={"landmarks": t_lm, "validate": t_val}, validators=report)


def run_validate(config: ExperimentConfig, dm: Optional[np.ndarray] = None) -> list:
    """Validator reports for the eps-net algorithms of the grid (baselines are not nets)."""
    algs = tuple(a for a in config.algorithms if a in EPS_NET_ALGORITHMS)
    if not algs:
        raise ParameterError("validation needs at least one eps-net algorithm")
    config = replace(config, algorithms=algs)
    if dm is None:
        dm = load_dataset(config.dataset)
    return _map(_validate_job, _cells(config), dm, config)


def validation_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "eps", "rep", "seed", "count", "net", "hausdorff", "hausdorff_slack",
                "sandwich", "bottleneck", "min_log_slack", "pass"])
    for r in records:
        v = r.validators
        slack = min(d["slack"] for d in v["bottleneck"]["dims"].values())
        w.writerow([r.algorithm, repr(r.eps), r.rep, r.seed, r.landmark_count,
                    int(v["net"]["pass"]), int(v["hausdorff"]["pass"]),
                    repr(v["hausdorff"]["slack"]), int(v["sandwich"]["pass"]),
                    int(v["bottleneck"]["pass"]), repr(slack), int(v["pass"])])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# effectiveness (W1 to the full Rips diagram) and stability (landscape bands)


def _lw_diagram(dm, idx, config):
    w = _lw_matrix(dm, idx, config.nu)
    return flag_persistence(w, config.max_dim, config.alpha_max, config.simplex_cap)


def _effect_job(job):
    alg, ei, rep = job
    dm, config = _STATE["dm"], _STATE["config"]
    full = _STATE["full"]
    (lm, seed, budget), t_lm = _timed(_select, dm, config, alg, ei, rep)
    idx = np.asarray(lm.indices)
    w, t_cx = _timed(_lw_matrix, dm, idx, config.nu)
    dgm, t_ph = _timed(flag_persistence, w, config.max_dim, config.alpha_max, config.simplex_cap)
    t0 = time.perf_counter()
    dist = {str(k): wasserstein1(dgm[k], full[k]) for k in range(config.max_dim + 1)}
    t_d = time.perf_counter() - t0
    rec = RunRecord(alg, config.eps_grid[ei], rep, seed, len(lm), budget,
                    seconds={"landmarks": t_lm, "complex": t_cx, "persistence": t_ph,
                             "distance": t_d},
                    distances={"wasserstein1": dist})
    return rec, dgm


def _effect_install(dm, config, full):
    _install(dm, config)
    _STATE["full"] = full


def run_effectiveness(config: ExperimentConfig, dm: Optional[np.ndarray] = None):
    """W1 between each lazy witness diagram and the full-cloud Rips diagram.

    Returns ``(records, lw_diagrams, full_diagram, full_seconds)``.
    """
    if dm is None:
        dm = load_dataset(config.dataset)
    full, t_full = _timed(flag_persistence, dm, config.max_dim, config.alpha_max,
                          config.simplex_cap)
    jobs = _cells(config)
    workers = min(worker_count(), max(len(jobs), 1))
    if workers <= 1:
        _effect_install(dm, config, full)
        out = [_effect_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(workers, initializer=_effect_install,
                                 initargs=(dm, config, full)) as pool:
            out = list(pool.map(_effect_job, jobs))
    return [r for r, _ in out], [d for _, d in out], full, t_full


def _summary(records, key):
    cells = {}
    for r in records:
        for dim, value in r.distances[key].items():
            cells.setdefault((r.algorithm, r.eps, int(dim)), []).append(value)
    return cells


def effectiveness_csv(records, config: ExperimentConfig) -> str:
    cells = _summary(records, "wasserstein1")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "eps", "dim", "mean_w1", "std_w1", "runs"])
    for alg in config.algorithms:
        for eps in config.eps_grid:
            for dim in range(config.max_dim + 1):
                vals = np.array(cells[(alg, eps, dim)])
                w.writerow([alg, repr(eps), dim, repr(float(vals.mean())),
                            repr(float(vals.std(ddof=1)) if vals.size > 1 else 0.0), vals.size])
    return buf.getvalue()


def effectiveness_curves(records, config: ExperimentConfig, dim: int = 1) -> dict:
    """``{algorithm: mean W1 per grid eps}`` for one dimension."""
    cells = _summary(records, "wasserstein1")
    return {alg: np.array([np.mean(cells[(alg, eps, dim)]) for eps in config.eps_grid])
            for alg in config.algorithms}


def timings_csv(records, extra: Optional[dict] = None) -> str:
    """Mean seconds per (algorithm, eps, stage); kept apart from reproducible outputs."""
    cells = {}
    for r in records:
        for stage, secs in r.seconds.items():
            cells.setdefault((r.algorithm, r.eps, stage), []).append(secs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "eps", "stage", "mean_seconds", "runs"])
    for (alg, eps, stage), vals in cells.items():
        w.writerow([alg, repr(eps), stage, f"{np.mean(vals):.6f}", len(vals)])
    for stage, secs in (extra or {}).items():
        w.writerow(["", "", stage, f"{secs:.6f}", 1])
    return buf.getvalue()


def _stability_job(job):
    alg, ei, rep = job
    dm, config = _STATE["dm"], _STATE["config"]
    (lm, seed, budget), t_lm = _timed(_select, dm, config, alg, ei, rep)
    dgm, t_ph = _timed(_lw_diagram, dm, np.asarray(lm.indices), config)
    rec = RunRecord(alg, config.eps_grid[ei], rep, seed, len(lm), budget,
                    seconds={"landmarks": t_lm, "persistence": t_ph})
    return rec, dgm


def run_stability(config: ExperimentConfig, dm: Optional[np.ndarray] = None, dim: int = 1,
                  rank: int = 1):
    """Rank-``rank`` landscape bands per (algorithm, eps) over the repetitions.

    All algorithms at one eps share a landscape grid. Returns
    ``(records, bands)`` with ``bands[(algorithm, eps)]`` a ConfidenceBand.
    """
    if config.seeds < 2:
        raise ParameterError("confidence bands need at least two seeds per cell")
    if config.max_dim < dim:
        config = replace(config, max_dim=dim)
    if dm is None:
        dm = load_dataset(config.dataset)
    out = _map(_stability_job, _cells(config), dm, config)
    records = [r for r, _ in out]
    cap = config.alpha_max if config.alpha_max is not None else diameter(dm)
    bands = {}
    for ei, eps in enumerate(config.eps_grid):
        cell = [(r, d) for r, d in out if r.eps == eps]
        grid = landscape_grid([np.minimum(d[dim], cap) for _, d in cell])
        for alg in config.algorithms:
            lss = [landscape(d[dim], rank, grid, cap=cap) for r, d in cell if r.algorithm == alg]
            seed = derive_seed(config.master_seed, _BAND, ALGORITHMS.index(alg), ei)
            bands[(alg, eps)] = bootstrap_band(lss, config.replicates, config.level, seed)
    return records, bands


def bands_summary_csv(bands) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "eps", "sup_width", "replicates", "level"])
    for (alg, eps), band in bands.items():
        w.writerow([alg, repr(eps), repr(band.sup_width), band.replicates, band.level])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# output


def _write_atomic(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_runs(out_dir, records, files: Optional[dict] = None, diagrams=None):
    """Write ``runs.jsonl`` plus named text artifacts into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if diagrams is not None:
        ddir = out / "diagrams"
        ddir.mkdir(exist_ok=True)
        for rec, dgm in zip(records, diagrams):
            name = f"{rec.algorithm}_eps{rec.eps:g}_rep{rec.rep}.csv"
            _write_atomic(ddir / name, dgm.to_csv())
            rec.diagram_paths["lazy_witness"] = str(Path("diagrams") / name)
    for name, text in (files or {}).items():
        _write_atomic(out / name, text)
    _write_atomic(out / "runs.jsonl", "".join(r.to_json() + "\n" for r in records))
    return out


def diagram_from_record(out_dir, record: RunRecord, key: str = "lazy_witness") -> PersistenceDiagram:
    return PersistenceDiagram.from_csv((Path(out_dir) / record.diagram_paths[key]).read_text())
