"""``epsnet`` command line.

Exit codes: 0 success, 1 validation failure, 2 usage or input error,
3 resource refusal. Experiment settings come from a TOML file (``--config``)
and/or flags; flags win.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import datasets, experiments as ex
from .complexes import DEFAULT_SIMPLEX_CAP, Filtration, lazy_witness_filtration, rips_filtration
from .diagnostics import (
    bootstrap_band,
    diagram_distance,
    landscape,
    landscape_grid,
    log_scale_diagram,
    truncate_diagram,
)
from .errors import EpsNetError, ResourceLimitError, ValidationFailure
from .landmarks import ALGORITHMS, LandmarkSet, select_landmarks
from .metric import cross_distances, distance_matrix
from .persistence import PersistenceDiagram, compute_persistence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("epsnet")

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(EpsNetError):
    pass


def _emit(text: str, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _points_csv(points) -> str:
    return "".join(",".join(repr(float(x)) for x in row) + "\n" for row in np.asarray(points))


def _load_metric(args):
    if getattr(args, "distances", None):
        return datasets.load_distance_matrix(args.distances)
    if getattr(args, "points", None):
        return distance_matrix(datasets.load_points(args.points, args.format))
    raise UsageError("give --points or --distances")


# ---------------------------------------------------------------------------
# single-step commands


def cmd_generate(args):
    if args.dataset == "torus":
        pts = datasets.sample_torus(datasets.TorusSpec(args.R, args.r, args.n, args.seed))
    else:
        pts = datasets.sample_tangled_tori(datasets.TangledSpec(args.R, args.r, args.n, args.seed))
    if args.thin is not None:
        pts = datasets.thin_maxmin(pts, args.thin, args.seed)
    _emit(_points_csv(pts), args.out)
    return EXIT_OK


def cmd_landmarks(args):
    dm = _load_metric(args)
    lm = select_landmarks(args.algorithm, dm, eps=args.eps, k=args.k, seed=args.seed)
    _emit(lm.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_rips(args):
    dm = _load_metric(args)
    f = rips_filtration(dm, args.max_dim, args.alpha_max, args.cap)
    _emit(f.to_text(), args.out)
    return EXIT_OK


def cmd_witness(args):
    dm = _load_metric(args)
    lm = LandmarkSet.from_json(Path(args.landmarks).read_text())
    if max(lm.indices) >= dm.shape[0]:
        raise UsageError("landmark index out of range for this point cloud")
    block = cross_distances(dm, lm)
    f = lazy_witness_filtration(block, lm, args.nu, args.max_dim, args.alpha_max, args.cap)
    _emit(f.to_text(), args.out)
    return EXIT_OK


def cmd_persist(args):
    f = Filtration.from_text(Path(args.filtration).read_text())
    _emit(compute_persistence(f).to_csv(), args.out)
    return EXIT_OK


def _prepare(dgm, args):
    if args.truncate is not None:
        dgm = truncate_diagram(dgm, args.truncate)
    if args.log:
        dgm = log_scale_diagram(dgm)
    return dgm


def cmd_distance(args):
    d1 = _prepare(PersistenceDiagram.from_csv(Path(args.diagram1).read_text()), args)
    d2 = _prepare(PersistenceDiagram.from_csv(Path(args.diagram2).read_text()), args)
    dims = None if args.dim is None else [args.dim]
    recs = diagram_distance(d1, d2, args.metric, dims)
    _emit("".join(json.dumps(r) + "\n" for r in recs), args.out)
    return EXIT_OK


def cmd_landscape(args):
    dgms = [PersistenceDiagram.from_csv(Path(p).read_text()) for p in args.diagrams]
    pts = [d[args.dim] for d in dgms]
    if args.cap is not None:
        pts = [np.column_stack([p[:, 0], np.minimum(p[:, 1], args.cap)]) for p in pts]
    grid = landscape_grid(pts, nodes=args.nodes)
    lss = [landscape(p, args.rank, grid) for p in pts]
    if len(lss) == 1:
        _emit(lss[0].to_csv(), args.out)
    else:
        band = bootstrap_band(lss, args.replicates, args.level, args.seed)
        _emit(band.to_csv(), args.out)
    return EXIT_OK


def cmd_fit_size_law(args):
    eps, counts, diam, algs = ex.read_counts_csv(Path(args.counts).read_text())
    if args.algorithm:
        keep = np.array([a == args.algorithm for a in algs])
        eps, counts = eps[keep], counts[keep]
    if args.diameter is not None:
        diam = args.diameter
    if diam is None:
        raise UsageError("counts table has no diameter column; pass --diameter")
    fit = ex.fit_size_law(eps, counts, diam)
    _emit(json.dumps({"diameter": fit.diameter, "theta": fit.theta, "r_squared": fit.r_squared,
                      "points": fit.points}) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# grid commands


def _config(args) -> ex.ExperimentConfig:
    data = {}
    if args.config:
        with open(args.config, "rb") as fh:
            try:
                data = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise UsageError(f"bad config file: {exc}") from None
    cfg = ex.ExperimentConfig.from_mapping(data)
    return cfg.with_overrides(
        algorithms=tuple(args.algorithms) if args.algorithms else None,
        eps_grid=tuple(args.eps_grid) if args.eps_grid else None,
        seeds=args.seeds, nu=args.nu, max_dim=args.max_dim, alpha_max=args.alpha_max,
        output_dir=args.output_dir, master_seed=args.master_seed, simplex_cap=args.cap,
        dataset_kind=args.dataset, dataset_n=args.n, dataset_seed=args.data_seed,
        dataset_path=args.input,
    )


def _out_dir(cfg):
    if not cfg.output_dir:
        raise UsageError("grid commands need an output directory (--output-dir or config)")
    return Path(cfg.output_dir)


def cmd_validate(args):
    cfg = _config(args)
    out = _out_dir(cfg)
    records = ex.run_validate(cfg)
    ex.write_runs(out, records, {"validation.csv": ex.validation_csv(records),
                                 "timings.csv": ex.timings_csv(records)})
    failed = [r for r in records if not r.validators["pass"]]
    for r in failed:
        bad = [k for k in ("net", "hausdorff", "sandwich", "bottleneck") if not r.validators[k]["pass"]]
        log.error("validation failed: algorithm=%s eps=%g rep=%d seed=%d checks=%s",
                  r.algorithm, r.eps, r.rep, r.seed, ",".join(bad))
    print(f"{len(records) - len(failed)}/{len(records)} runs passed all validators")
    if failed:
        raise ValidationFailure(f"{len(failed)} run(s) failed validation")
    return EXIT_OK


def cmd_experiment(args):
    cfg = _config(args)
    out = _out_dir(cfg)
    dm = ex.load_dataset(cfg.dataset)
    diam = float(dm.max())
    if args.kind == "landmarks":
        records, sets = ex.run_landmarks(cfg, dm)
        files = {"counts.csv": ex.counts_csv(records, diam), "timings.csv": ex.timings_csv(records)}
        if len(set(cfg.eps_grid)) >= 4:
            for alg in cfg.algorithms:
                rows = [r for r in records if r.algorithm == alg]
                fit = ex.fit_size_law([r.eps for r in rows], [r.landmark_count for r in rows], diam)
                print(f"{alg}: theta={fit.theta:.4f} R2={fit.r_squared:.4f} diameter={diam:.4f}")
        ex.write_runs(out, records, files)
    elif args.kind == "effectiveness":
        records, dgms, full, t_full = ex.run_effectiveness(cfg, dm)
        files = {"effectiveness.csv": ex.effectiveness_csv(records, cfg),
                 "full_rips.csv": full.to_csv(),
                 "timings.csv": ex.timings_csv(records, {"full_rips": t_full})}
        ex.write_runs(out, records, files, dgms if cfg.save_diagrams else None)
    else:
        records, bands = ex.run_stability(cfg, dm)
        files = {"bands.csv": ex.bands_summary_csv(bands), "timings.csv": ex.timings_csv(records)}
        for (alg, eps), band in bands.items():
            files[f"band_{alg}_eps{eps:g}.csv"] = band.to_csv()
        ex.write_runs(out, records, files)
    print(f"wrote {len(records)} runs to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def _metric_args(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--points", help="CSV or XYZ coordinates")
    src.add_argument("--distances", help="square CSV distance matrix")
    p.add_argument("--format", choices=("csv", "xyz"), help="point file format (default: by suffix)")


def _grid_args(p):
    p.add_argument("--config", help="TOML experiment configuration")
    p.add_argument("--output-dir")
    p.add_argument("--algorithms", nargs="+", choices=ALGORITHMS)
    p.add_argument("--eps-grid", nargs="+", type=float)
    p.add_argument("--seeds", type=int)
    p.add_argument("--nu", type=int)
    p.add_argument("--max-dim", type=int, help="largest homology dimension")
    p.add_argument("--alpha-max", type=float)
    p.add_argument("--master-seed", type=int)
    p.add_argument("--cap", type=int, help="simplex-count cap")
    p.add_argument("--dataset", choices=("torus", "tangled", "points", "distances"))
    p.add_argument("--n", type=int)
    p.add_argument("--data-seed", type=int)
    p.add_argument("--input", help="path for points/distances datasets")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epsnet", description="eps-net landmarks and lazy witness persistence")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a synthetic point cloud")
    p.add_argument("dataset", choices=("torus", "tangled"))
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--R", type=float, default=2.5, help="major radius")
    p.add_argument("--r", type=float, default=0.5, help="minor radius")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--thin", type=int, help="keep an evenly spread subset of this size")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("landmarks", help="select one landmark set")
    _metric_args(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument("--eps", type=float)
    p.add_argument("--k", type=int, help="budget for random/maxmin")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_landmarks)

    p = sub.add_parser("rips", help="Vietoris-Rips filtration")
    _metric_args(p)
    p.add_argument("--max-dim", type=int, default=2, help="largest simplex dimension")
    p.add_argument("--alpha-max", type=float)
    p.add_argument("--cap", type=int, default=DEFAULT_SIMPLEX_CAP)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rips)

    p = sub.add_parser("witness", help="lazy witness filtration on a landmark set")
    _metric_args(p)
    p.add_argument("--landmarks", required=True, help="landmark JSON")
    p.add_argument("--nu", type=int, default=1)
    p.add_argument("--max-dim", type=int, default=2, help="largest simplex dimension")
    p.add_argument("--alpha-max", type=float)
    p.add_argument("--cap", type=int, default=DEFAULT_SIMPLEX_CAP)
    p.add_argument("--out")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("persist", help="persistence diagram of a filtration file")
    p.add_argument("filtration")
    p.add_argument("--out")
    p.set_defaults(func=cmd_persist)

    p = sub.add_parser("distance", help="bottleneck or 1-Wasserstein distance of two diagrams")
    p.add_argument("diagram1")
    p.add_argument("diagram2")
    p.add_argument("--metric", choices=("bottleneck", "wasserstein1"), default="bottleneck")
    p.add_argument("--dim", type=int)
    p.add_argument("--truncate", type=float, help="drop intervals born below this value")
    p.add_argument("--log", action="store_true", help="compare in log coordinates")
    p.add_argument("--out")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("landscape", help="landscape of one diagram, or a bootstrap band of several")
    p.add_argument("diagrams", nargs="+")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--cap", type=float, help="replace infinite deaths by this value")
    p.add_argument("--nodes", type=int, default=500)
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("fit-size-law", help="fit count = (diameter/eps)^theta")
    p.add_argument("counts", help="counts CSV from 'experiment landmarks'")
    p.add_argument("--algorithm")
    p.add_argument("--diameter", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit_size_law)

    p = sub.add_parser("validate", help="run the theorem validators over a grid")
    _grid_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("experiment", help="landmark-count, effectiveness or stability grid")
    p.add_argument("kind", choices=("landmarks", "effectiveness", "stability"))
    _grid_args(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ValidationFailure as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    except ResourceLimitError as exc:
        log.error("resource limit: %s", exc)
        return EXIT_RESOURCE
    except (EpsNetError, OSError, ValueError, TypeError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
