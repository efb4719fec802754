"""Rank-based comparison statistics: Friedman test and Holm's step-down procedure.

Methods are ranked per dataset (best rank 1, ties get midranks).  The Friedman
statistic tests the null of equal performance across k methods on N datasets;
Holm's procedure then compares a control method against the rest with
step-down thresholds alpha / (k - j + 1).
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
import scipy.special
import scipy.stats


class DegenerateStatistic(Exception):
    """Perfect rank separation drives the Friedman F statistic to infinity."""


class InvalidAlpha(Exception):
    """Significance level must lie strictly between 0 and 1."""


@dataclass(frozen=True)
class RankSummary:
    """Per-dataset ranks of k methods over N datasets plus their column means."""

    k: int
    n_datasets: int
    avg_ranks: np.ndarray
    per_dataset_ranks: np.ndarray | None = None
    method_names: tuple | None = None


def ranks_from_scores(scores, higher_is_better=False, method_names=None):
    """Rank methods per dataset row; best gets rank 1, ties get midranks."""
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.shape[0] < 1 or scores.shape[1] < 1:
        raise ValueError("scores must be a non-empty N x k matrix")
    keyed = -scores if higher_is_better else scores
    ranks = np.vstack([scipy.stats.rankdata(row, method="average") for row in keyed])
    return RankSummary(
        k=scores.shape[1],
        n_datasets=scores.shape[0],
        avg_ranks=ranks.mean(axis=0),
        per_dataset_ranks=ranks,
        method_names=tuple(method_names) if method_names is not None else None,
    )


@dataclass(frozen=True)
class FriedmanResult:
    chi2: float
    f_f: float
    df1: int
    df2: int
    p_value: float


def friedman(summary):
    """Friedman chi-square and its F-form with degrees of freedom (k-1, (k-1)(N-1)).

    Raises DegenerateStatistic when N(k-1) - chi2 <= 0, which happens under
    perfect rank separation; that outcome is reported distinctly instead of
    producing an infinite statistic.
    """
    k, N = summary.k, summary.n_datasets
    if k < 2 or N < 2:
        raise ValueError("need at least 2 methods and 2 datasets")
    R = np.asarray(summary.avg_ranks, dtype=float)
    chi2 = 12.0 * N / (k * (k + 1)) * (float(np.sum(R**2)) - k * (k + 1) ** 2 / 4.0)
    denom = N * (k - 1) - chi2
    if denom <= 0:
        raise DegenerateStatistic(
            f"N(k-1) - chi2 = {denom:.3e} <= 0 (perfect rank separation)"
        )
    f_f = (N - 1) * chi2 / denom
    df1, df2 = k - 1, (k - 1) * (N - 1)
    return FriedmanResult(
        chi2=chi2, f_f=f_f, df1=df1, df2=df2, p_value=1.0 - f_cdf(f_f, df1, df2)
    )


@dataclass(frozen=True)
class HolmEntry:
    j: int
    method: int
    method_name: str
    avg_rank: float
    z: float
    p: float
    threshold: float
    significant: bool


def holm(summary, control_index, alpha=0.05):
    """Step-down comparison of every method against the control.

    Non-control methods are ordered by descending average rank (j = 2..k).
    z_j = (R_control - R_j) / sqrt(k(k+1) / (6N)), with two-sided normal
    p-values.  Methods are significant up to (excluding) the first j whose
    p-value reaches alpha / (k - j + 1); if none does, all are significant.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha={alpha} not in (0, 1)")
    k, N = summary.k, summary.n_datasets
    if k < 2:
        raise ValueError("need at least 2 methods")
    if not 0 <= control_index < k:
        raise ValueError(f"control index {control_index} out of range")
    R = np.asarray(summary.avg_ranks, dtype=float)
    names = summary.method_names or tuple(f"method{i}" for i in range(k))

    others = [i for i in range(k) if i != control_index]
    others.sort(key=lambda i: (-R[i], i))
    se = math.sqrt(k * (k + 1) / (6.0 * N))

    entries = []
    cut = False
    for pos, i in enumerate(others):
        j = pos + 2
        z = (R[control_index] - R[i]) / se
        p = min(1.0, 2.0 * (1.0 - normal_cdf(abs(z))))
        threshold = alpha / (k - j + 1)
        if not cut and p >= threshold:
            cut = True
        entries.append(
            HolmEntry(
                j=j,
                method=i,
                method_name=names[i],
                avg_rank=float(R[i]),
                z=z,
                p=p,
                threshold=threshold,
                significant=not cut,
            )
        )
    return entries


def normal_cdf(x):
    """Standard normal distribution function."""
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def f_cdf(x, d1, d2):
    """F-distribution function via the regularized incomplete beta function."""
    if d1 < 1 or d2 < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if x <= 0:
        return 0.0
    u = d1 * x / (d1 * x + d2)
    return float(scipy.special.betainc(d1 / 2.0, d2 / 2.0, u))


def f_quantile(p, d1, d2, tol=1e-12):
    """Inverse of f_cdf in p, by bisection (f_cdf is monotone in x)."""
    if not 0.0 <= p < 1.0:
        raise ValueError("p must lie in [0, 1)")
    if p == 0.0:
        return 0.0
    hi = 1.0
    while f_cdf(hi, d1, d2) < p:
        hi *= 2.0
        if hi > 1e300:
            raise ValueError("quantile out of range")
    lo = 0.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if f_cdf(mid, d1, d2) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def load_score_table(stream):
    """Read a comma-separated score table: header of method names, one row per dataset.

    An optional leading non-numeric column is treated as dataset names.
    Returns (method_names, scores, dataset_names).
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    rows = [row for row in csv.reader(stream) if row and any(c.strip() for c in row)]
    if len(rows) < 2:
        raise ValueError("score table needs a header row and at least one data row")
    header = [c.strip() for c in rows[0]]
    body = [[c.strip() for c in row] for row in rows[1:]]
    if any(len(row) != len(header) for row in body):
        raise ValueError("ragged score table")

    def numeric(col):
        try:
            for row in body:
                float(row[col])
            return True
        except ValueError:
            return False

    start = 0 if numeric(0) else 1
    if len(header) - start < 1:
        raise ValueError("score table has no method columns")
    names = header[start:]
    scores = np.array([[float(c) for c in row[start:]] for row in body])
    dataset_names = [row[0] for row in body] if start == 1 else None
    return names, scores, dataset_names


def format_comparison_report(summary, result, entries, control_index, alpha):
    """Comma-separated report: Friedman statistics block, then the Holm table."""
    names = summary.method_names or tuple(f"method{i}" for i in range(summary.k))
    lines = [
        f"friedman_chi2,{result.chi2:.6g}",
        f"friedman_f,{result.f_f:.6g}",
        f"df1,{result.df1}",
        f"df2,{result.df2}",
        f"friedman_p,{result.p_value:.6g}",
        f"critical_value_{alpha:g},{f_quantile(1.0 - alpha, result.df1, result.df2):.6g}",
        f"control,{names[control_index]}",
        f"control_avg_rank,{float(summary.avg_ranks[control_index]):.6g}",
        "j,method,avg_rank,z,p,threshold,significant",
    ]
    for e in entries:
        lines.append(
            f"{e.j},{e.method_name},{e.avg_rank:.6g},{e.z:.6g},"
            f"{e.p:.6g},{e.threshold:.6g},{'yes' if e.significant else 'no'}"
        )
    return "\n".join(lines) + "\n"
