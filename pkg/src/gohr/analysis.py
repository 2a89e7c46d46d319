"""Nonparametric statistics and embedding of rule-difficulty data.

The Mann-Whitney test is exact: the U distribution is enumerated over all
label assignments of the pooled sample (mid-ranks for ties), and the
two-sided p doubles the one-sided tail, capped at 1. Pairwise p-values
over rule sets give a dissimilarity matrix D = 1 - p, embedded in 3-D by
classical (double-centering) multidimensional scaling.
"""

from __future__ import annotations

from itertools import combinations
from math import comb, sqrt

import numpy as np
from scipy.stats import chi2


def midranks(values) -> np.ndarray:
    """Ranks 1..n with ties sharing their average rank."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=np.float64)
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Pearson correlation of mid-ranks."""
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("spearman needs two equal-length samples of size >= 2")
    rx, ry = midranks(x), midranks(y)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    denom = sqrt(float((rx ** 2).sum() * (ry ** 2).sum()))
    if denom == 0.0:
        raise ValueError("constant sample has no rank correlation")
    return float((rx * ry).sum() / denom)


def mann_whitney_exact(a, b, max_total: int = 20) -> tuple[float, float]:
    """Exact two-sided Mann-Whitney test by full enumeration.

    Returns (U, p) with U = min(U_a, U_b). The U distribution is enumerated
    over all C(n_a+n_b, n_a) label assignments of the pooled mid-ranks; the
    one-sided tail is the smaller of P(U <= u_obs) and P(U >= n_a*n_b -
    u_obs), and the two-sided p doubles it, capped at 1. Taking the smaller
    tail keeps p symmetric in the arguments when ties skew the distribution.
    """
    a = list(a)
    b = list(b)
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be nonempty")
    if n1 + n2 > max_total:
        raise ValueError(f"exact enumeration limited to {max_total} total observations")
    ranks = midranks(a + b)
    r1 = float(ranks[:n1].sum())
    u1 = r1 - n1 * (n1 + 1) / 2.0
    u2 = n1 * n2 - u1
    u_obs = min(u1, u2)

    base = n1 * (n1 + 1) / 2.0
    lo = hi = 0
    total = comb(n1 + n2, n1)
    for subset in combinations(range(n1 + n2), n1):
        u = sum(ranks[i] for i in subset) - base
        if u <= u_obs + 1e-9:
            lo += 1
        if u >= n1 * n2 - u_obs - 1e-9:
            hi += 1
    p = min(1.0, 2.0 * min(lo, hi) / total)
    return u_obs, p


def kruskal_wallis(groups) -> tuple[float, float]:
    """Kruskal-Wallis H with tie correction; p from the chi-square tail."""
    groups = [list(g) for g in groups]
    if len(groups) < 2 or any(len(g) == 0 for g in groups):
        raise ValueError("need >= 2 nonempty groups")
    pooled = [x for g in groups for x in g]
    n = len(pooled)
    ranks = midranks(pooled)
    h = 0.0
    offset = 0
    for g in groups:
        r = ranks[offset : offset + len(g)].sum()
        h += r * r / len(g)
        offset += len(g)
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)

    _, counts = np.unique(np.asarray(pooled, dtype=np.float64), return_counts=True)
    tie = 1.0 - float(((counts ** 3 - counts).sum())) / (n ** 3 - n)
    if tie == 0.0:  # every observation identical
        return 0.0, 1.0
    h /= tie
    h = max(h, 0.0)
    p = float(chi2.sf(h, len(groups) - 1))
    return h, p


def pvalue_matrix(samples: dict) -> tuple[list, np.ndarray]:
    """Symmetric matrix of pairwise exact MW p-values; diagonal 1."""
    labels = list(samples)
    n = len(labels)
    p = np.ones((n, n), dtype=np.float64)
    for i, j in combinations(range(n), 2):
        _, pij = mann_whitney_exact(samples[labels[i]], samples[labels[j]])
        p[i, j] = p[j, i] = pij
    return labels, p


def dissimilarity(p: np.ndarray) -> np.ndarray:
    """D = 1 - p elementwise, diagonal forced to zero."""
    d = 1.0 - np.asarray(p, dtype=np.float64)
    np.fill_diagonal(d, 0.0)
    return d


def classical_mds(d: np.ndarray, k: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """Classical (double-centering) MDS.

    Returns (coords, eigenvalues): coords uses the top-k nonnegative
    eigenpairs of B = -1/2 J D^2 J (axes of vanished eigenvalues become
    zero columns); the full eigenvalue spectrum is returned so truncated
    negative mass is visible to callers.
    """
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    if d.shape != (n, n) or not np.allclose(d, d.T, atol=1e-12):
        raise ValueError("distance matrix must be square and symmetric")
    if not np.allclose(np.diag(d), 0.0, atol=1e-12):
        raise ValueError("distance matrix must have a zero diagonal")
    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * j @ (d ** 2) @ j
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    coords = np.zeros((n, k), dtype=np.float64)
    for axis in range(min(k, n)):
        if evals[axis] > 1e-12:
            coords[:, axis] = evecs[:, axis] * sqrt(evals[axis])
    return coords, evals


def test_error_ratio(episode_records) -> float | None:
    """Fraction of all errors that occurred in test-mode episodes.

    Returns None when the batch produced no errors at all.
    """
    test_errors = sum(e["errors"] for e in episode_records if e["mode"] == "test")
    total_errors = sum(e["errors"] for e in episode_records)
    if total_errors == 0:
        return None
    return test_errors / total_errors
