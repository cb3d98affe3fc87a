import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from epsnet.errors import ParameterError
from epsnet.landmarks import (
    EPS_NET_ALGORITHMS,
    LandmarkSet,
    eps_2eps_net,
    eps_net_maxmin,
    eps_net_rand,
    maxmin_landmarks,
    random_landmarks,
    select_landmarks,
    verify_net,
)
from epsnet.metric import diameter, distance_matrix
from oracles import maxmin_order, net_report

NETS = list(EPS_NET_ALGORITHMS.values())
clouds = arrays(np.float64, st.tuples(st.integers(1, 40), st.integers(1, 3)),
                elements=st.floats(-5, 5, allow_nan=False))


def test_random_permutation_and_singleton():
    dm = distance_matrix(np.arange(5.0))
    lm = random_landmarks(dm, 5, seed=3)
    assert sorted(lm.indices) == [0, 1, 2, 3, 4]
    assert random_landmarks(distance_matrix([[0.0]]), 1, seed=0).indices == (0,)
    with pytest.raises(ParameterError):
        random_landmarks(dm, 6, seed=0)


def test_random_uniform_frequency():
    dm = np.zeros((100, 100))
    counts = np.zeros(100)
    for s in range(10000):
        counts[list(random_landmarks(dm, 10, seed=s).indices)] += 1
    freq = counts / 10000
    assert np.all(np.abs(freq - 0.1) <= 0.01)


def test_maxmin_line():
    dm = distance_matrix([0.0, 1.0, 10.0])
    assert maxmin_landmarks(dm, 2, first=0).indices == (0, 2)


def test_maxmin_full_and_oracle(rng):
    dm = distance_matrix(rng.random((30, 2)))
    lm = maxmin_landmarks(dm, 30, seed=2)
    assert sorted(lm.indices) == list(range(30))
    for first in (0, 7, 19):
        assert list(maxmin_landmarks(dm, 8, first=first).indices) == maxmin_order(dm, first, 8)


def test_maxmin_realized_delta_sparse(rng):
    dm = distance_matrix(rng.random((50, 3)))
    idx = list(maxmin_landmarks(dm, 12, seed=4).indices)
    sub = dm[np.ix_(idx, idx)]
    delta = sub[np.triu_indices(12, 1)].min()
    # every pair is at least the realised separation apart
    assert net_report(dm, idx, delta - 1e-12)[0]


@pytest.mark.parametrize("fn", NETS)
def test_eps_above_diameter_gives_one(fn, rng):
    dm = distance_matrix(rng.random((40, 2)))
    assert len(fn(dm, diameter(dm) * 1.01, seed=5)) == 1


@pytest.mark.parametrize("fn", NETS)
def test_line_eps_one(fn, line10):
    for seed in range(20):
        lm = fn(line10, 1.0, seed=seed)
        rep = verify_net(line10, lm, 1.0)
        assert rep.is_sparse and rep.is_sample
        assert rep.min_pairwise > 1.0


def test_two_clusters_exercise_ring_doubling(rng):
    eps = 0.1
    a = rng.random((30, 2)) * 0.3
    b = a + np.array([100 * eps, 0.0])
    dm = distance_matrix(np.vstack([a, b]))
    for seed in range(10):
        lm = eps_2eps_net(dm, eps, seed=seed)
        assert verify_net(dm, lm, eps).is_net
        sides = {i < 30 for i in lm.indices}
        assert sides == {True, False}


def test_maxmin_all_points_below_min_pairwise(rng):
    dm = distance_matrix(rng.random((25, 2)))
    mp = dm[np.triu_indices(25, 1)].min()
    assert len(eps_net_maxmin(dm, 0.5 * mp, seed=0)) == 25


def test_verify_net_examples(rng):
    dm = distance_matrix(rng.random((20, 2)))
    mp = dm[np.triu_indices(20, 1)].min()
    rep = verify_net(dm, range(20), 0.5 * mp)
    assert rep.is_sparse and rep.is_sample and rep.max_cover_gap == 0.0
    ecc = dm[3].max()
    assert not verify_net(dm, [3], 0.9 * ecc).is_sample


@pytest.mark.parametrize("fn", NETS)
@given(pts=clouds, frac=st.floats(0.02, 1.2), seed=st.integers(0, 2 ** 31))
def test_nets_are_nets(fn, pts, frac, seed):
    dm = distance_matrix(pts)
    eps = max(frac * diameter(dm), 1e-6)
    lm = fn(dm, eps, seed=seed)
    assert len(set(lm.indices)) == len(lm)
    assert net_report(dm, lm.indices, eps) == (True, True)
    rep = verify_net(dm, lm, eps)
    assert rep.is_sparse and rep.is_sample
    assert lm.indices == fn(dm, eps, seed=seed).indices


def test_counts_nonincreasing_in_eps(rng):
    dm = distance_matrix(rng.random((150, 2)))
    for fn in NETS:
        means = [np.mean([len(fn(dm, e, seed=s)) for s in range(10)]) for e in (0.05, 0.1, 0.2, 0.4)]
        assert all(b <= a for a, b in zip(means, means[1:]))


def test_landmark_set_json_roundtrip():
    lm = LandmarkSet((4, 1, 9), "eps_net_rand", 0.5, 7)
    d = json.loads(lm.to_json())
    assert d == {"algorithm": "eps_net_rand", "eps": 0.5, "seed": 7, "indices": [4, 1, 9]}
    assert LandmarkSet.from_json(lm.to_json()) == lm
    with pytest.raises(ParameterError):
        LandmarkSet((1, 1), "random")
    with pytest.raises(ParameterError):
        LandmarkSet((), "random")


def test_select_dispatch(line10):
    assert select_landmarks("random", line10, k=3, seed=1).algorithm == "random"
    assert select_landmarks("eps_2eps_net", line10, eps=2.0, seed=1).eps == 2.0
    with pytest.raises(ParameterError):
        select_landmarks("eps_net_rand", line10, k=3)
    with pytest.raises(ParameterError):
        select_landmarks("maxmin", line10, eps=1.0)
    with pytest.raises(ParameterError):
        select_landmarks("nope", line10, eps=1.0)
    with pytest.raises(ParameterError):
        eps_net_rand(line10, 0.0)
