"""Nonparametric tests for the objective measures: Friedman across the
four gesture conditions, pairwise Wilcoxon signed-rank post-hoc tests
with Bonferroni correction, and the rank-biserial-style effect size
r = |Z| / sqrt(2N)."""

from __future__ import annotations

import math

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2, norm, rankdata


@dataclass(frozen=True)
class StatsResult:
    test: str  # "friedman" | "wilcoxon"
    statistic: float  # chi-squared or W
    z: float | None
    df: int | None
    p_raw: float
    p_corrected: float
    effect_size_r: float | None
    n: int


# exact permutation p is computed when the within-row permutation space
# (k!)^N stays below this bound; beyond it the chi-squared asymptotic is
# used (which is what large-N studies report anyway)
_EXACT_PERMUTATION_LIMIT = 300_000


def _uncorrected_chisq(rank_sums, n, k):
    return (12.0 / (n * k * (k + 1))) * (rank_sums ** 2).sum(axis=-1) \
        - 3.0 * n * (k + 1)


def _friedman_exact_p(ranks, observed_uncorrected):
    """Exact right-tail probability of the Friedman statistic under
    within-row permutations, by full enumeration."""
    from itertools import permutations

    n, k = ranks.shape
    sums = np.zeros((1, k))
    for row in ranks:
        perms = np.array(list(permutations(row)))
        sums = (sums[:, None, :] + perms[None, :, :]).reshape(-1, k)
    stats_all = _uncorrected_chisq(sums, n, k)
    return float(np.mean(stats_all >= observed_uncorrected - 1e-9))


def friedman_test(data) -> StatsResult:
    """Friedman rank test over an N x k matrix (rows: subjects, columns:
    repeated conditions), with the standard tie correction.

    The p value is exact (full within-row permutation enumeration) when
    that space is small enough; otherwise it comes from the chi-squared
    distribution with k-1 degrees of freedom.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] < 2:
        raise ValueError("need an N x k matrix with N >= 2 and k >= 2")
    n, k = data.shape
    ranks = np.apply_along_axis(rankdata, 1, data)  # ties share mean rank
    chisq = float(_uncorrected_chisq(ranks.sum(axis=0), n, k))
    # tie correction: deflate by 1 - sum(t^3 - t) / (N k (k^2 - 1))
    ties = 0.0
    for row in data:
        _, counts = np.unique(row, return_counts=True)
        ties += float((counts ** 3 - counts).sum())
    correction = 1.0 - ties / (n * k * (k * k - 1))
    if correction <= 0:
        return StatsResult(test="friedman", statistic=0.0, z=None, df=k - 1,
                           p_raw=1.0, p_corrected=1.0, effect_size_r=None,
                           n=n)
    if math.factorial(k) ** n <= _EXACT_PERMUTATION_LIMIT:
        p = _friedman_exact_p(ranks, chisq)
    else:
        p = float(chi2.sf(chisq / correction, k - 1))
    return StatsResult(test="friedman", statistic=float(chisq / correction),
                       z=None, df=k - 1, p_raw=p, p_corrected=p,
                       effect_size_r=None, n=n)


def wilcoxon_signed_rank(a, b) -> StatsResult:
    """Wilcoxon signed-rank test on paired samples.

    W is the rank sum of positive differences a - b (ties mean-ranked,
    zero differences dropped); Z uses the normal approximation with tie
    variance correction and no continuity correction; the effect size is
    r = |Z| / sqrt(2N) with N the pair count before dropping zeros.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("a and b must be equal-length 1-D arrays")
    n_pairs = len(a)
    d = a - b
    d = d[d != 0.0]
    n = len(d)
    if n == 0:
        raise ValueError("all differences are zero")
    ranks = rankdata(np.abs(d))
    w = float(ranks[d > 0].sum())
    mean_w = n * (n + 1) / 4.0
    var_w = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    var_w -= float((tie_counts ** 3 - tie_counts).sum()) / 48.0
    if var_w <= 0:
        raise ValueError("zero variance (all differences tied)")
    z = (w - mean_w) / np.sqrt(var_w)
    p = 2.0 * float(norm.sf(abs(z)))
    r = abs(z) / np.sqrt(2.0 * n_pairs)
    return StatsResult(test="wilcoxon", statistic=w, z=float(z), df=None,
                       p_raw=min(1.0, p), p_corrected=min(1.0, p),
                       effect_size_r=float(r), n=n_pairs)


def bonferroni(p_raw: float, m_comparisons: int) -> float:
    """Bonferroni-corrected p value: min(1, p * m)."""
    if m_comparisons < 1:
        raise ValueError("m_comparisons must be >= 1")
    return min(1.0, p_raw * m_comparisons)
