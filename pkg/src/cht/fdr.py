"""Permutation estimate of the false discovery rate over the pair statistics.

The permutation scheme keeps each observation's standardized products
z_{i,jk} frozen at the class moments of the ORIGINAL labels and only
re-groups observations by a permuted label vector; the pooled sd of the
interaction t statistic is recomputed under the permuted grouping, and the
original main contrasts w are reused when rebuilding the pair statistics.
With B permutations, at penalty level lam

    FDR-hat(lam) = (1/B) sum_b #{(j,k): lam'_jk(b) > lam} / #{(j,k): lam'_jk > lam}

with strict exceedance; an empty rejection set (denominator zero) yields
0 and estimates are clipped at 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contrasts import (
    ClassMoments,
    ContrastSet,
    PairObservationCache,
    compute_all_contrasts,
    compute_moments,
    pooled_t,
)
from .dataset import ClassedDataset
from .output import document, section
from .parallel import ordered_map
from .stats import compute_test_statistics


def permuted_interaction_contrasts(
    dataset: ClassedDataset,
    moments: ClassMoments,
    y_star: np.ndarray,
    cache: PairObservationCache | None = None,
) -> np.ndarray:
    """Interaction contrast matrix with the standardized products kept at
    the original class moments but grouped by the permuted labels y_star."""
    if cache is None:
        cache = PairObservationCache(dataset, moments)
    p = dataset.p
    z = np.zeros((p, p), dtype=np.float64)
    for j in range(p):
        for k in range(j + 1, p):
            t = pooled_t(
                cache.get(j, k), y_star, what=f"pair ({j + 1}, {k + 1}) under permutation"
            )
            z[j, k] = t
            z[k, j] = t
    return z


@dataclass(frozen=True)
class FdrCurve:
    """Estimated FDR along a descending penalty grid."""

    lambda_grid: np.ndarray
    observed_exceed: np.ndarray
    null_exceed_mean: np.ndarray
    fdr_hat: np.ndarray
    n_permutations: int
    seed: int


def _exceed_counts(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """#{v in values : v > g} for every g in grid (strict)."""
    ordered = np.sort(values)
    return values.size - np.searchsorted(ordered, grid, side="right")


def estimate_fdr(
    dataset: ClassedDataset,
    contrasts: ContrastSet | None = None,
    n_permutations: int = 100,
    seed: int = 0,
    lambda_grid=None,
    threads: int = 1,
    cache_bytes: int = 256 * 1024 * 1024,
) -> FdrCurve:
    """Permutation FDR estimate for the pair statistics of a dataset.

    Permutation b draws its labels from the dedicated substream
    default_rng([seed, b]), so results are independent of thread count.
    The default grid is the sorted distinct observed pair statistics,
    descending.
    """
    moments = compute_moments(dataset)
    if contrasts is None:
        contrasts = compute_all_contrasts(dataset, moments)
    stats = compute_test_statistics(contrasts)
    p = dataset.p
    iu = np.triu_indices(p, k=1)
    observed = stats.lambda_pair[iu]

    if lambda_grid is None:
        grid = np.unique(observed)[::-1]
    else:
        grid = np.sort(np.asarray(lambda_grid, dtype=np.float64).ravel())[::-1]

    cache = PairObservationCache(dataset, moments, max_bytes=cache_bytes)
    for j in range(p):
        for k in range(j + 1, p):
            cache.get(j, k)

    w = contrasts.w

    def one_permutation(b: int) -> np.ndarray:
        rng = np.random.default_rng([seed, b])
        y_star = rng.permutation(dataset.y)
        z_star = permuted_interaction_contrasts(dataset, moments, y_star, cache)
        stats_star = compute_test_statistics(
            ContrastSet(w, z_star, dataset.feature_names)
        )
        return _exceed_counts(stats_star.lambda_pair[iu], grid)

    null_counts = ordered_map(one_permutation, range(n_permutations), threads)
    null_total = np.sum(np.asarray(null_counts, dtype=np.float64), axis=0)
    null_mean = null_total / n_permutations

    observed_exceed = _exceed_counts(observed, grid).astype(np.int64)
    fdr_hat = np.zeros(grid.size, dtype=np.float64)
    nz = observed_exceed > 0
    fdr_hat[nz] = np.minimum(1.0, null_mean[nz] / observed_exceed[nz])
    return FdrCurve(grid, observed_exceed, null_mean, fdr_hat, n_permutations, seed)


def fdr_to_tsv(curve: FdrCurve) -> str:
    rows = [
        (
            float(curve.lambda_grid[i]),
            int(curve.observed_exceed[i]),
            float(curve.null_exceed_mean[i]),
            float(curve.fdr_hat[i]),
        )
        for i in range(curve.lambda_grid.size)
    ]
    return document(
        [
            section(
                "fdr",
                ["lambda", "observed_count", "null_mean", "fdr_hat"],
                rows,
            )
        ]
    )
