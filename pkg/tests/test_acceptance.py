"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one ``CRITERION n: PASS|FAIL ...`` line; the lines are
printed together in the terminal summary (see conftest) and also when this
file is run as a script.
"""
from __future__ import annotations

import math
import time

import numpy as np
import pytest

from epsnet import experiments as ex
from epsnet.complexes import rips_filtration
from epsnet.datasets import TangledSpec, TorusSpec, sample_tangled_tori, sample_torus, thin_maxmin
from epsnet.diagnostics import bottleneck, wasserstein1
from epsnet.landmarks import EPS_NET_ALGORITHMS, verify_net
from epsnet.metric import diameter, distance_matrix, hausdorff
from epsnet.persistence import betti_at, compute_persistence, flag_persistence
from oracles import brute_bottleneck, brute_wasserstein, random_filtration_pairs

NETS = tuple(EPS_NET_ALGORITHMS)
TOL = 1e-9
SUMMARY = []


def report(record_property, n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    SUMMARY.append(line)
    print(line)
    if record_property is not None:
        record_property("criterion", line)
    assert ok, line


def _net_runs():
    """Criterion 1/2 grid: 50 clouds x 10 seeds x 3 eps x 3 algorithms."""
    rng = np.random.default_rng(2024)
    for c in range(50):
        n = int(rng.integers(5, 201))
        dim = int(rng.choice([2, 3]))
        dm = distance_matrix(rng.random((n, dim)))
        delta = diameter(dm)
        for frac in (0.1, 0.2, 0.4):
            eps = frac * delta
            for name in NETS:
                for seed in range(10):
                    yield dm, eps, EPS_NET_ALGORITHMS[name](dm, eps, seed=seed)


@pytest.fixture(scope="module")
def net_grid():
    t0 = time.perf_counter()
    rows = []
    for dm, eps, lm in _net_runs():
        rep = verify_net(dm, lm, eps)
        h = hausdorff(dm, np.arange(dm.shape[0]), lm)
        rows.append((rep.is_net, h, eps))
    return rows, time.perf_counter() - t0


def test_criterion_01_eps_net_correctness(net_grid, record_property):
    rows, secs = net_grid
    failures = sum(1 for ok, _, _ in rows if not ok)
    report(record_property, 1, failures == 0 and secs < 60,
           f"{len(rows)} runs, {failures} verify_net failures, {secs:.1f}s (limit 60s)")


def test_criterion_02_hausdorff_bound(net_grid, record_property):
    rows, _ = net_grid
    failures = sum(1 for _, h, eps in rows if h > eps + TOL)
    worst = max(h - eps for _, h, eps in rows)
    report(record_property, 2, failures == 0,
           f"{len(rows)} runs, {failures} with hausdorff > eps, max(h - eps) = {worst:.3g}")


def test_criterion_03_sandwich(record_property):
    t0 = time.perf_counter()
    cases = []
    torus = distance_matrix(sample_torus(TorusSpec(n=300, seed=0)))
    for eps in (0.4, 0.6, 1.0):
        for name in NETS:
            for seed in range(3):
                cases.append((torus, eps, EPS_NET_ALGORITHMS[name](torus, eps, seed=seed)))
    rng = np.random.default_rng(33)
    for _ in range(10):
        dm = distance_matrix(rng.random((int(rng.integers(10, 101)), int(rng.choice([2, 3])))))
        for frac in (0.1, 0.2):
            eps = frac * diameter(dm)
            for name in NETS:
                cases.append((dm, eps, EPS_NET_ALGORITHMS[name](dm, eps, seed=int(rng.integers(1000)))))
    violations = checks = 0
    for dm, eps, lm in cases:
        for factor in (2.0, 2.5, 3.0):
            res = ex.sandwich_check(dm, np.asarray(lm.indices), eps, factor)
            checks += 1
            violations += res["lower_violations"] + res["upper_violations"]
    secs = time.perf_counter() - t0
    report(record_property, 3, violations == 0 and secs < 300,
           f"{checks} containment checks, {violations} simplex violations, {secs:.1f}s (limit 300s)")


def test_criterion_04_log_bottleneck_bound(record_property):
    cfg = ex.ExperimentConfig(ex.DatasetConfig("torus", n=500, seed=0), algorithms=NETS,
                              eps_grid=(0.4, 0.8, 1.2, 2.0), seeds=10, max_dim=2,
                              alpha_factors=())
    records = ex.run_validate(cfg)
    values = [d["log_bottleneck"] for r in records
              for d in r.validators["bottleneck"]["dims"].values()]
    bad = sum(v > ex.THREE_LOG_THREE + TOL for v in values)
    report(record_property, 4, bad == 0,
           f"{len(records)} runs x dims 0-2, {bad} above 3 ln 3 = {ex.THREE_LOG_THREE:.3f}, "
           f"max log-bottleneck {max(values):.4f}")


def test_criterion_05_size_law(record_property):
    t0 = time.perf_counter()
    dm = ex.load_dataset(ex.DatasetConfig("torus", n=500, seed=0))
    cfg = ex.ExperimentConfig(algorithms=NETS, eps_grid=(0.3, 0.4, 0.6, 0.8, 1.2, 1.6, 2.0, 2.5),
                              seeds=10)
    records, _ = ex.run_landmarks(cfg, dm)
    delta = diameter(dm)
    thetas = {}
    for name in NETS:
        rows = [r for r in records if r.algorithm == name]
        thetas[name] = ex.fit_size_law([r.eps for r in rows], [r.landmark_count for r in rows],
                                       delta).theta
    secs = time.perf_counter() - t0
    ok = all(1.4 <= t <= 2.0 for t in thetas.values()) and 5.6 <= delta <= 6.0 and secs < 120
    detail = ", ".join(f"{k} theta={v:.3f}" for k, v in thetas.items())
    report(record_property, 5, ok, f"diameter={delta:.3f}, {detail}, {secs:.1f}s (limit 120s)")


def test_criterion_06_engine_vs_rank_oracle(record_property):
    rng = np.random.default_rng(606)
    mismatches = queries = 0
    for _ in range(200):
        from epsnet.complexes import Filtration
        f = Filtration.from_pairs(random_filtration_pairs(rng))
        d = compute_persistence(f)
        for alpha in rng.uniform(0, f.alpha_max, 5):
            for k in range(max(f.max_dim - 1, 0) + 1):
                queries += 1
                mismatches += d.count_alive(alpha, k) != betti_at(f, alpha, k)
    square = distance_matrix([[0, 0], [1, 0], [1, 1], [0, 1]])
    h1 = compute_persistence(rips_filtration(square, 2, 2.0))[1].tolist()
    h1_flag = flag_persistence(square, 1)[1].tolist()
    square_ok = h1 == [[1.0, math.sqrt(2)]] == h1_flag
    report(record_property, 6, mismatches == 0 and square_ok,
           f"{queries} rank queries, {mismatches} mismatches; unit square H1 = {h1}")


def _lifetimes(points):
    dgm = flag_persistence(distance_matrix(points), 1)
    return np.sort(dgm[1][:, 1] - dgm[1][:, 0])[::-1]


def _dominant(life, factor=3.0):
    """Sizes k with life[k-1] >= factor * life[k]."""
    return [k for k in range(1, len(life)) if life[k - 1] >= factor * life[k]]


def test_criterion_07_known_topology(record_property):
    # dense = evenly spread: farthest-point thinning of a 10x larger uniform sample
    t0 = time.perf_counter()
    torus = thin_maxmin(sample_torus(TorusSpec(1.0, 0.5, n=4000, seed=0)), 400, seed=0)
    life_t = _lifetimes(torus)
    torus_ok = len(life_t) >= 3 and life_t[1] >= 3 * life_t[2]
    tangled = thin_maxmin(sample_tangled_tori(TangledSpec(1.0, 0.5, n=6000, seed=0)), 600, seed=0)
    life_g = _lifetimes(tangled)
    dom = _dominant(life_g)
    tangled_ok = any(k >= 2 for k in dom)
    secs = time.perf_counter() - t0
    report(record_property, 7, torus_ok and tangled_ok and secs < 600,
           f"torus top H1 lifetimes {np.round(life_t[:3], 3).tolist()} "
           f"(ratio {life_t[1] / life_t[2]:.2f}); tangled top {np.round(life_g[:4], 3).tolist()}, "
           f"3x gaps after {dom[:3]}; {secs:.1f}s (limit 600s)")


def test_criterion_08_matching_exactness(record_property):
    rng = np.random.default_rng(808)

    def diagram(n):
        b = rng.uniform(0, 3, n)
        return list(zip(b, b + rng.uniform(0, 2, n)))

    worst = 0.0
    for _ in range(500):
        n1 = int(rng.integers(0, 7))
        n2 = int(rng.integers(0, 7 - n1))
        a, b = diagram(n1), diagram(n2)
        worst = max(worst, abs(bottleneck(a, b) - brute_bottleneck(a, b)),
                    abs(wasserstein1(a, b) - brute_wasserstein(a, b)))
    order_bad = 0
    for _ in range(1000):
        a, b = diagram(int(rng.integers(0, 8))), diagram(int(rng.integers(0, 8)))
        order_bad += bottleneck(a, b) > wasserstein1(a, b) + TOL
    report(record_property, 8, worst <= TOL and order_bad == 0,
           f"500 pairs max |exact - brute| = {worst:.2e}; {order_bad}/1000 with bottleneck > W1")


def _local_minima(eps, curve, lo, hi):
    return [eps[i] for i in range(1, len(eps) - 1)
            if lo <= eps[i] <= hi and curve[i] < curve[i - 1] and curve[i] < curve[i + 1]]


def test_criterion_09_effectiveness_shape(record_property):
    grid = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0, 1.2, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5)
    cfg = ex.ExperimentConfig(ex.DatasetConfig("torus", n=500, seed=0), algorithms=NETS,
                              eps_grid=grid, seeds=10, max_dim=1)
    records, _, _, _ = ex.run_effectiveness(cfg)
    curves = ex.effectiveness_curves(records, cfg, dim=1)
    parts, ok = [], True
    for name, curve in curves.items():
        first = _local_minima(grid, curve, 0.4, 0.7)
        second = _local_minima(grid, curve, 2.0, 4.0)
        ok &= bool(first) and bool(second)
        parts.append(f"{name} minima in [0.4,0.7]={first} in [2,4]={second} "
                     f"curve={np.round(curve, 2).tolist()}")
    report(record_property, 9, ok, "; ".join(parts))


def test_criterion_10_band_stability(record_property):
    cfg = ex.ExperimentConfig(ex.DatasetConfig("tangled", n=1000, seed=0),
                              algorithms=("random", "eps_net_rand", "eps_2eps_net"),
                              eps_grid=(0.5, 1.0, 1.5), seeds=10, max_dim=1, master_seed=0)
    _, bands = ex.run_stability(cfg)
    wins = 0
    parts = []
    for eps in cfg.eps_grid:
        w = {a: bands[(a, eps)].sup_width for a in cfg.algorithms}
        win = w["random"] >= w["eps_net_rand"] and w["random"] >= w["eps_2eps_net"]
        wins += win
        parts.append(f"eps={eps}: " + " ".join(f"{a}={v:.3f}" for a, v in w.items()))
    report(record_property, 10, wins >= 2, f"random widest in {wins}/3 cells; " + "; ".join(parts))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
