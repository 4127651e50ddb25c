"""Goodness-of-fit helpers shared by the statistical tests."""

import numpy as np
from scipy import stats


def poisson_gof_pvalue(samples, mu: float) -> float:
    """Chi-square test of integer samples against Poisson(mu), bins of expected count >= 5."""
    x = np.asarray(samples)
    n = x.size
    if mu == 0:
        return 1.0 if np.all(x == 0) else 0.0
    top = int(max(x.max(), mu + 10 * np.sqrt(mu) + 10))
    observed = np.bincount(x, minlength=top + 1).astype(float)
    expected = n * stats.poisson.pmf(np.arange(top + 1), mu)
    expected[-1] += n * stats.poisson.sf(top, mu)
    obs, exp = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= 5:
            obs.append(o_acc)
            exp.append(e_acc)
            o_acc = e_acc = 0.0
    if obs:
        obs[-1] += o_acc
        exp[-1] += e_acc
    if len(obs) < 2:
        return 1.0
    return float(stats.chisquare(obs, exp).pvalue)


def two_sample_pvalue(a, b, min_expected: float = 5.0) -> float:
    """Chi-square homogeneity test on binned integer counts, sparse tail bins merged."""
    a, b = np.asarray(a), np.asarray(b)
    top = int(max(a.max(), b.max()))
    table = np.array([np.bincount(a, minlength=top + 1), np.bincount(b, minlength=top + 1)])
    # Fold the tail right-to-left until every column has enough expected mass.
    frac = np.array([a.size, b.size]) / (a.size + b.size)
    cols = []
    acc = np.zeros(2)
    for k in range(top, -1, -1):
        acc = acc + table[:, k]
        if np.all(acc.sum() * frac >= min_expected):
            cols.append(acc)
            acc = np.zeros(2)
    if acc.sum() > 0:
        if cols:
            cols[-1] = cols[-1] + acc
        else:
            cols.append(acc)
    merged = np.array(cols).T
    if merged.shape[1] < 2:
        return 1.0
    return float(stats.chi2_contingency(merged, correction=False).pvalue)
