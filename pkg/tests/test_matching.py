import numpy as np
import pytest

from hgmeans import solve_assignment

import naive


def test_identity_favoring_matrix():
    cost = np.ones((4, 4)) - np.eye(4)
    perm, total = solve_assignment(cost)
    assert perm.tolist() == [0, 1, 2, 3]
    assert total == 0.0


def test_two_by_two_by_inspection():
    perm, total = solve_assignment(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert perm.tolist() == [0, 1]
    assert total == 2.0


def test_random_seven_by_seven_vs_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(100):
        cost = rng.random((7, 7))
        perm, total = solve_assignment(cost)
        brute, _ = naive.assignment_minimum(cost)
        assert total == pytest.approx(brute, abs=1e-12)


def test_optimal_for_all_small_sizes():
    rng = np.random.default_rng(11)
    for m in range(2, 9):
        for _ in range(20):
            cost = rng.random((m, m))
            perm, total = solve_assignment(cost)
            brute, _ = naive.assignment_minimum(cost)
            assert total == pytest.approx(brute, abs=1e-12)


def test_permutation_is_bijection():
    rng = np.random.default_rng(3)
    for _ in range(50):
        m = int(rng.integers(1, 12))
        cost = rng.random((m, m))
        perm, _ = solve_assignment(cost)
        assert sorted(perm.tolist()) == list(range(m))
    # degenerate all-equal costs still yield a bijection
    perm, total = solve_assignment(np.full((5, 5), 2.0))
    assert sorted(perm.tolist()) == list(range(5))
    assert total == 10.0


def test_scaling_leaves_optimal_set_unchanged():
    rng = np.random.default_rng(19)
    lam = 3.7
    for _ in range(40):
        m = int(rng.integers(2, 7))
        # integer costs so ties between optima actually occur
        cost = rng.integers(0, 4, size=(m, m)).astype(np.float64)
        perm, total = solve_assignment(cost)
        perm_scaled, total_scaled = solve_assignment(lam * cost)
        brute, _ = naive.assignment_minimum(cost)
        chosen = sum(cost[i, perm_scaled[i]] for i in range(m))
        assert chosen == pytest.approx(brute, abs=1e-12)  # still within optimal set
        assert total_scaled == pytest.approx(lam * total, rel=1e-12)


def test_input_validation():
    with pytest.raises(ValueError):
        solve_assignment(np.ones((2, 3)))
    with pytest.raises(ValueError):
        solve_assignment(np.array([[1.0, -0.5], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        solve_assignment(np.array([[np.nan, 1.0], [1.0, 0.0]]))
    with pytest.raises(ValueError):
        solve_assignment(np.empty((0, 0)))
