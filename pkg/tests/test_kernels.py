import math

import numpy as np
import pytest

from annosplit import kernels


def entropy_oracle(row) -> float:
    total = sum(row)
    return -sum((c / total) * math.log(c / total) for c in row if c > 0)


def dominance_oracle(costs, qualities):
    n = len(costs)
    flags = []
    for i in range(n):
        efficient = True
        for j in range(n):
            if i == j:
                continue
            if (
                costs[j] <= costs[i]
                and qualities[j] >= qualities[i]
                and (costs[j] < costs[i] or qualities[j] > qualities[i])
            ):
                efficient = False
                break
        flags.append(efficient)
    return flags


@pytest.fixture(params=["numpy", "jit"])
def impl(request):
    if request.param == "jit" and not kernels.USING_NUMBA:
        pytest.skip("numba backend disabled")
    suffix = "_numpy" if request.param == "numpy" else "_jit"
    return {
        "entropy": getattr(kernels, f"entropy_from_counts{suffix}"),
        "majority": getattr(kernels, f"majority_from_counts{suffix}"),
        "dominance": getattr(kernels, f"dominance_flags{suffix}"),
    }


def test_entropy_matches_oracle(impl):
    rng = np.random.default_rng(11)
    counts = rng.integers(0, 8, size=(300, 5)).astype(np.float64)
    counts[counts.sum(axis=1) == 0, 0] = 1.0
    got = impl["entropy"](counts)
    want = [entropy_oracle(row) for row in counts]
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_entropy_known_values(impl):
    counts = np.array([[7.0, 0.0], [4.0, 3.0], [1.0, 1.0]])
    got = impl["entropy"](counts)
    assert got[0] == 0.0
    assert got[1] == pytest.approx(entropy_oracle([4, 3]), abs=1e-12)
    assert got[2] == pytest.approx(math.log(2), abs=1e-12)


def test_majority_matches_python_count(impl):
    rng = np.random.default_rng(7)
    counts = rng.integers(0, 5, size=(500, 4)).astype(np.float64)
    counts[counts.sum(axis=1) == 0, 0] = 1.0
    winners, tied = impl["majority"](counts)
    for row, w, t in zip(counts, winners, tied):
        top = row.max()
        assert row[w] == top
        assert t == (list(row).count(top) > 1)


def test_dominance_matches_oracle(impl):
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(1, 60))
        costs = np.round(rng.uniform(0, 10, size=n), 1)
        qualities = np.round(rng.uniform(0, 1, size=n), 2)
        got = impl["dominance"](costs, qualities)
        assert list(got) == dominance_oracle(costs, qualities)


def test_duplicate_points_are_both_efficient(impl):
    costs = np.array([1.0, 1.0])
    qualities = np.array([0.9, 0.9])
    assert list(impl["dominance"](costs, qualities)) == [True, True]


def test_backends_agree():
    if not kernels.USING_NUMBA:
        pytest.skip("numba backend disabled")
    rng = np.random.default_rng(23)
    counts = rng.integers(0, 6, size=(200, 6)).astype(np.float64)
    counts[counts.sum(axis=1) == 0, 0] = 1.0
    np.testing.assert_allclose(
        kernels.entropy_from_counts_numpy(counts),
        kernels.entropy_from_counts_jit(counts),
        atol=1e-14,
    )
    costs = rng.uniform(0, 5, size=150)
    qualities = rng.uniform(0, 1, size=150)
    assert list(kernels.dominance_flags_numpy(costs, qualities)) == list(
        kernels.dominance_flags_jit(costs, qualities)
    )
    wn, tn = kernels.majority_from_counts_numpy(counts)
    wj, tj = kernels.majority_from_counts_jit(counts)
    assert list(tn) == list(tj)
    assert list(wn) == list(wj)
