"""Baseline interaction detectors and stability utilities.

Baselines:
  * all-pairs: rank every pair by |z_jk| with no hierarchy information.
  * two-stage screening: keep pairs whose endpoints pass a main-contrast
    quantile threshold (strong: both endpoints, weak: at least one), rank
    candidates by |z| ahead of all non-candidates.

Stability tools (method-agnostic): stratified bootstrap frequency of each
pair in the top-k list, and mean top-k overlap across random stratified
half splits.
"""

from __future__ import annotations

import math

import numpy as np

from .contrasts import ContrastSet, compute_all_contrasts, compute_moments
from .dataset import ClassedDataset
from .errors import ChtError, DataError, DegenerateFeatureError
from .parallel import ordered_map
from .stats import compute_test_statistics

METHODS = ("cht", "all_pairs", "screen_strong", "screen_weak")


def all_pairs_statistics(contrasts: ContrastSet) -> np.ndarray:
    """|z| for every pair; the plain no-hierarchy competitor."""
    stat = np.abs(contrasts.z)
    np.fill_diagonal(stat, 0.0)
    return stat


def quantile_threshold(values, q: float) -> float:
    """Nearest-rank quantile: the ceil(q * len)-th smallest value."""
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if v.size == 0:
        raise DataError("cannot take a quantile of no values")
    if not 0.0 < q <= 1.0:
        raise DataError(f"quantile must be in (0, 1], got {q}")
    rank = max(1, math.ceil(q * v.size))
    return float(v[rank - 1])


def screen_main_effects(
    contrasts: ContrastSet, q: float = 0.75, rule: str = "strong"
) -> tuple[list[tuple[int, int]], np.ndarray]:
    """Two-stage screening: stage one keeps features with |w| strictly
    above the q nearest-rank quantile, stage two keeps pairs with both
    (strong) or at least one (weak) endpoint kept.

    Returns the candidate pairs and a p x p matrix holding |z| on
    candidates and NaN elsewhere.
    """
    if rule not in ("strong", "weak"):
        raise DataError(f"unknown screening rule {rule!r}")
    absw = np.abs(contrasts.w)
    threshold = quantile_threshold(absw, q)
    passed = absw > threshold
    p = contrasts.p
    candidates = []
    matrix = np.full((p, p), np.nan)
    for j in range(p):
        for k in range(j + 1, p):
            keep = (passed[j] and passed[k]) if rule == "strong" else (
                passed[j] or passed[k]
            )
            if keep:
                candidates.append((j, k))
                matrix[j, k] = matrix[k, j] = abs(contrasts.z[j, k])
    return candidates, matrix


def interaction_ranking(
    contrasts: ContrastSet, method: str, q: float = 0.75
) -> tuple[list[tuple[int, int]], list[tuple]]:
    """Deterministic pair ranking for one method.

    Returns (pairs, keys) sorted descending; keys are comparable tuples
    (higher is better) whose distinct runs define the tie groups used when
    thresholding a rejection set.
    """
    pairs = contrasts.pairs()
    if method == "cht":
        stats = compute_test_statistics(contrasts)
        keys = [(float(stats.lambda_pair[j, k]),) for j, k in pairs]
    elif method == "all_pairs":
        keys = [(abs(float(contrasts.z[j, k])),) for j, k in pairs]
    elif method in ("screen_strong", "screen_weak"):
        rule = "strong" if method == "screen_strong" else "weak"
        candidates, _ = screen_main_effects(contrasts, q, rule)
        chosen = set(candidates)
        keys = [
            (1.0 if (j, k) in chosen else 0.0, abs(float(contrasts.z[j, k])))
            for j, k in pairs
        ]
    else:
        raise ChtError(f"unknown method {method!r}; expected one of {METHODS}")
    order = sorted(range(len(pairs)), key=lambda i: (tuple(-v for v in keys[i]), pairs[i]))
    return [pairs[i] for i in order], [keys[i] for i in order]


def _top_pairs(dataset: ClassedDataset, method: str, k: int) -> list[tuple[int, int]]:
    contrasts = compute_all_contrasts(dataset)
    ranked, _ = interaction_ranking(contrasts, method)
    return ranked[:k]


def _stratified_resample(dataset: ClassedDataset, rng) -> ClassedDataset:
    rows = [dataset.class_rows(1), dataset.class_rows(2)]
    take = [r[rng.integers(0, r.size, r.size)] for r in rows]
    idx = np.concatenate(take)
    return ClassedDataset(dataset.x[idx], dataset.y[idx], dataset.feature_names)


def bootstrap_topk_frequency(
    dataset: ClassedDataset,
    method: str,
    k: int = 10,
    n_resamples: int = 200,
    seed: int = 0,
    threads: int = 1,
    max_retries: int = 100,
) -> dict[tuple[int, int], float]:
    """Share of stratified bootstrap resamples (with the original class
    sizes) in which each pair makes the method's top-k list. Resamples that
    leave a feature constant within a class are redrawn, up to max_retries
    per resample."""

    def one_resample(b: int) -> list[tuple[int, int]]:
        rng = np.random.default_rng([seed, b])
        for _ in range(max_retries):
            sample = _stratified_resample(dataset, rng)
            try:
                return _top_pairs(sample, method, k)
            except DegenerateFeatureError:
                continue
        raise DataError(
            f"no non-degenerate resample found in {max_retries} tries"
        )

    lists = ordered_map(one_resample, range(n_resamples), threads)
    counts: dict[tuple[int, int], int] = {}
    for top in lists:
        for pair in top:
            counts[pair] = counts.get(pair, 0) + 1
    return {pair: c / n_resamples for pair, c in sorted(counts.items())}


def split_half_overlap(
    dataset: ClassedDataset,
    method: str,
    k_max: int = 20,
    n_splits: int = 50,
    seed: int = 0,
    threads: int = 1,
    max_retries: int = 100,
) -> np.ndarray:
    """Mean top-k overlap |A_k intersect B_k| / k between the rankings of
    two random stratified halves, for k = 1..k_max."""
    if dataset.n1 < 4 or dataset.n2 < 4:
        raise DataError(
            "splitting needs at least 4 observations per class, got "
            f"n1={dataset.n1}, n2={dataset.n2}"
        )

    def one_split(r: int) -> np.ndarray:
        rng = np.random.default_rng([seed, r])
        for _ in range(max_retries):
            first, second = [], []
            for label in (1, 2):
                perm = rng.permutation(dataset.class_rows(label))
                half = perm.size // 2
                first.append(perm[:half])
                second.append(perm[half:])
            try:
                tops = []
                for part in (np.concatenate(first), np.concatenate(second)):
                    sub = ClassedDataset(
                        dataset.x[part], dataset.y[part], dataset.feature_names
                    )
                    ranked, _ = interaction_ranking(
                        compute_all_contrasts(sub), method
                    )
                    tops.append(ranked[:k_max])
            except DegenerateFeatureError:
                continue
            overlaps = np.empty(k_max, dtype=np.float64)
            for k in range(1, k_max + 1):
                overlaps[k - 1] = len(set(tops[0][:k]) & set(tops[1][:k])) / k
            return overlaps
        raise DataError(f"no non-degenerate split found in {max_retries} tries")

    rows = ordered_map(one_split, range(n_splits), threads)
    return np.mean(np.asarray(rows), axis=0)
