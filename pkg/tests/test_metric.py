import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from epsnet.errors import InputFormatError, ParameterError
from epsnet.metric import (
    as_distance_matrix,
    cross_distances,
    diameter,
    distance_matrix,
    hausdorff,
    nu_distances,
)
from oracles import loop_distances

clouds = arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 3)),
                elements=st.floats(-10, 10, allow_nan=False))


def test_three_four_five():
    dm = distance_matrix([[0, 0], [3, 4]])
    assert dm[0, 1] == 5.0
    assert diameter(dm) == 5.0


def test_single_point():
    dm = distance_matrix([[1.0, 2.0]])
    assert dm.shape == (1, 1) and dm[0, 0] == 0.0
    assert diameter(dm) == 0.0


def test_matches_loop_oracle(rng):
    pts = rng.random((10, 2))
    assert np.allclose(distance_matrix(pts), loop_distances(pts), atol=1e-12)


def test_rejects_non_finite():
    with pytest.raises(InputFormatError):
        distance_matrix([[0.0, np.nan], [1.0, 1.0]])
    with pytest.raises(InputFormatError):
        distance_matrix([[0.0, np.inf]])


def test_output_is_read_only():
    dm = distance_matrix([[0.0], [1.0]])
    with pytest.raises(ValueError):
        dm[0, 1] = 3.0


def test_nu_distances_line():
    dm = distance_matrix([0.0, 1.0, 2.0])
    assert nu_distances(dm, [0, 2], 1).tolist() == [0, 1, 0]
    assert nu_distances(dm, [0, 2], 2).tolist() == [2, 1, 2]
    with pytest.raises(ParameterError):
        nu_distances(dm, [0, 2], 3)
    with pytest.raises(ParameterError):
        nu_distances(dm, [0, 2], 0)


def test_nu_distances_sort_oracle(rng):
    dm = distance_matrix(rng.random((20, 2)))
    L = rng.choice(20, 5, replace=False)
    for nu in range(1, 6):
        want = np.sort(dm[:, L], axis=1)[:, nu - 1]
        assert np.array_equal(nu_distances(dm, L, nu), want)


def test_nu_distances_all_landmarks_zero(rng):
    dm = distance_matrix(rng.random((15, 3)))
    assert not nu_distances(dm, range(15), 1).any()


def test_hausdorff_examples():
    dm = distance_matrix([0.0, 10.0])
    assert hausdorff(dm, [0, 1], [0]) == 10.0
    assert hausdorff(dm, [0, 1], [0, 1]) == 0.0
    with pytest.raises(ParameterError):
        hausdorff(dm, [], [0])


def test_hausdorff_of_net_is_within_eps(rng):
    from epsnet.landmarks import eps_net_rand
    dm = distance_matrix(rng.random((100, 3)))
    lm = eps_net_rand(dm, 0.2, seed=1)
    assert hausdorff(dm, range(100), lm) <= 0.2


def test_cross_distances_block(rng):
    dm = distance_matrix(rng.random((8, 2)))
    assert np.array_equal(cross_distances(dm, [3, 1]), dm[:, [3, 1]])


@given(clouds)
def test_distance_matrix_axioms(pts):
    dm = distance_matrix(pts)
    assert np.array_equal(dm, dm.T)
    assert not np.diag(dm).any()
    assert (dm >= 0).all()
    n = dm.shape[0]
    assert (dm[:, None, :] <= dm[:, :, None] + dm[None, :, :] + 1e-9).all() or n == 0


@given(clouds, st.data())
def test_hausdorff_symmetric(pts, data):
    dm = distance_matrix(pts)
    n = dm.shape[0]
    a = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n))
    b = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n))
    assert hausdorff(dm, a, b) == hausdorff(dm, b, a)
    assert hausdorff(dm, a, a) == 0.0


def test_as_distance_matrix_checks():
    with pytest.raises(InputFormatError):
        as_distance_matrix([[0, 1], [2, 0]])
    with pytest.raises(InputFormatError):
        as_distance_matrix([[0, -1], [-1, 0]])
    with pytest.raises(InputFormatError):
        as_distance_matrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]], check_triangle=True)
    ok = as_distance_matrix([[0, 1], [1, 0]])
    assert ok[0, 1] == 1.0
