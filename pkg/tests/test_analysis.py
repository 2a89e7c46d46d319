import random
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gohr.analysis import (
    classical_mds,
    dissimilarity,
    kruskal_wallis,
    mann_whitney_exact,
    midranks,
    pvalue_matrix,
    spearman,
)
from gohr.analysis import test_error_ratio as error_mode_ratio  # alias dodges pytest collection


def brute_mw(a, b):
    """Independent oracle: U from pairwise comparisons, p by value enumeration."""
    def u_of(x, y):
        u = 0.0
        for xi in x:
            for yi in y:
                u += (xi > yi) + 0.5 * (xi == yi)
        return u

    u_obs = min(u_of(a, b), u_of(b, a))
    pooled = list(a) + list(b)
    n1, n2 = len(a), len(b)
    lo = hi = total = 0
    for idx in combinations(range(len(pooled)), n1):
        xs = [pooled[i] for i in idx]
        ys = [pooled[i] for i in range(len(pooled)) if i not in idx]
        u = u_of(xs, ys)
        total += 1
        lo += u <= u_obs + 1e-9
        hi += u >= n1 * n2 - u_obs - 1e-9
    return u_obs, min(1.0, 2.0 * min(lo, hi) / total)


def test_spearman_examples():
    assert spearman([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0)
    assert spearman([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)


@settings(max_examples=60)
@given(st.lists(st.integers(-500, 500), min_size=3, max_size=12, unique=True))
def test_spearman_monotone_invariance(xs):
    ys = [x * 3 + 7 for x in xs]
    base = spearman(xs, ys)
    warped = spearman([x ** 3 for x in xs], ys)  # strictly monotone transform
    assert warped == pytest.approx(base)
    assert base == pytest.approx(1.0)


def test_midranks_ties():
    assert list(midranks([10, 20, 20, 30])) == [1.0, 2.5, 2.5, 4.0]


def test_mw_exact_examples():
    u, p = mann_whitney_exact([1, 2, 3, 4, 5], [6, 7, 8, 9, 10])
    assert u == 0 and p == pytest.approx(2 / 252)
    u, p = mann_whitney_exact([1, 2, 3], [4, 5, 6])
    assert u == 0 and p == pytest.approx(2 / 20)
    _, p = mann_whitney_exact([1, 2, 3], [1, 2, 3])
    assert p == 1.0


def test_mw_exact_symmetry_and_range():
    rng = random.Random(0)
    for _ in range(30):
        a = [rng.randint(0, 8) for _ in range(4)]
        b = [rng.randint(0, 8) for _ in range(5)]
        ua, pa = mann_whitney_exact(a, b)
        ub, pb = mann_whitney_exact(b, a)
        assert ua == ub and pa == pb
        assert 0 < pa <= 1.0


def test_mw_exact_against_brute_oracle():
    rng = random.Random(7)
    for _ in range(50):
        a = [rng.randint(0, 20) for _ in range(5)]
        b = [rng.randint(0, 20) for _ in range(5)]
        got = mann_whitney_exact(a, b)
        want = brute_mw(a, b)
        assert got[0] == pytest.approx(want[0])
        assert got[1] == pytest.approx(want[1])


def test_mw_exact_size_guard():
    with pytest.raises(ValueError):
        mann_whitney_exact(list(range(11)), list(range(10)))


def test_kruskal_wallis_identical_groups():
    h, p = kruskal_wallis([[1, 2, 3], [1, 2, 3]])
    assert h == 0.0 and p == 1.0


def test_kruskal_wallis_hand_case():
    # ranks 1..6; H = 12/42 * (9/2 + 49/2 + 121/2) - 21 = 32/7
    h, p = kruskal_wallis([[1, 2], [10, 11], [20, 21]])
    assert h == pytest.approx(32 / 7)
    assert 0 < p < 0.2


def test_kruskal_wallis_matches_scipy():
    from scipy.stats import kruskal

    rng = random.Random(1)
    for _ in range(40):
        groups = [[rng.randint(0, 10) for _ in range(rng.randint(2, 6))] for _ in range(3)]
        if all(x == groups[0][0] for g in groups for x in g):
            continue
        h, p = kruskal_wallis(groups)
        want = kruskal(*groups)
        assert h == pytest.approx(want.statistic)
        assert p == pytest.approx(want.pvalue)


def test_two_group_kw_agrees_with_mw_decision():
    rng = random.Random(2)
    agree = total = 0
    for _ in range(300):
        a = [rng.randint(0, 12) for _ in range(5)]
        b = [rng.randint(0, 12) for _ in range(5)]
        if len(set(a + b)) == 1:
            continue
        _, p_mw = mann_whitney_exact(a, b)
        _, p_kw = kruskal_wallis([a, b])
        total += 1
        agree += (p_mw < 0.05) == (p_kw < 0.05)
    # KW uses a chi-square approximation; decisions agree on the large majority
    assert agree / total > 0.9


def test_pvalue_matrix_and_dissimilarity():
    rng = random.Random(3)
    samples = {f"r{i}": [rng.randint(0, 30) for _ in range(5)] for i in range(6)}
    labels, p = pvalue_matrix(samples)
    assert p.shape == (6, 6)
    assert np.allclose(p, p.T)
    assert np.allclose(np.diag(p), 1.0)
    d = dissimilarity(p)
    assert np.allclose(np.diag(d), 0.0)
    assert (d >= 0).all() and np.allclose(d, d.T)
    assert d[0, 1] == pytest.approx(1 - p[0, 1])


def test_mds_closed_forms():
    coords, evals = classical_mds(np.array([[0.0, 2.0], [2.0, 0.0]]))
    assert sorted(coords[:, 0]) == pytest.approx([-1.0, 1.0])
    tri = np.ones((3, 3)) - np.eye(3)
    coords3, _ = classical_mds(tri)
    for i, j in combinations(range(3), 2):
        assert np.linalg.norm(coords3[i] - coords3[j]) == pytest.approx(1.0, abs=1e-9)


def test_mds_roundtrips_rank3_euclidean():
    rng = np.random.default_rng(4)
    for _ in range(5):
        pts = rng.normal(size=(9, 3))
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        coords, evals = classical_mds(d, 3)
        back = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(-1))
        assert np.abs(back - d).max() <= 1e-8
        assert all(e > -1e-9 for e in evals)


def test_mds_rejects_bad_input():
    with pytest.raises(ValueError):
        classical_mds(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError):
        classical_mds(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_median_range_coverage_is_about_94_percent():
    # P(true median outside [min, max] of 5 draws) = 2 * (1/2)^5 = 6.25%
    rng = np.random.default_rng(5)
    draws = rng.random((100_000, 5))
    outside = ((draws > 0.5).all(axis=1) | (draws < 0.5).all(axis=1)).mean()
    assert outside == pytest.approx(0.0625, abs=0.005)


def test_test_error_ratio():
    recs = [
        {"mode": "train", "errors": 0},
        {"mode": "test", "errors": 3},
        {"mode": "train", "errors": 0},
        {"mode": "test", "errors": 1},
    ]
    assert error_mode_ratio(recs) == 1.0
    recs[0]["errors"] = 4
    assert error_mode_ratio(recs) == 0.5
    assert error_mode_ratio([{"mode": "train", "errors": 0}]) is None
