"""Standardized two-class contrasts for main effects and pairwise interactions.

For feature j the main contrast is the usual two-sample t statistic

    w_j = (xbar_{j,1} - xbar_{j,2}) / (s_j * sqrt(1/n1 + 1/n2))

with s_j the pooled standard deviation. For a pair (j, k) each observation i
in class l contributes a standardized product

    z_{i,jk} = (x_ij - xbar_{j,l}) (x_ik - xbar_{k,l}) / (s_{j,l} s_{k,l})

using that class's own means and standard deviations, and the interaction
contrast z_jk is the two-sample t statistic of these values between classes.

Every t statistic in the package funnels through one helper with a fixed
expression tree, so exchanging the class labels flips each statistic's sign
exactly and re-grouping by an identity permutation reproduces it bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import ClassedDataset
from .errors import DataError, DegenerateFeatureError
from .output import document, section


@dataclass(frozen=True)
class ClassMoments:
    """Per-class means and sds (ddof 1) plus the pooled sd (ddof n1+n2-2)."""

    mean1: np.ndarray
    mean2: np.ndarray
    sd1: np.ndarray
    sd2: np.ndarray
    pooled_sd: np.ndarray

    def mean(self, label: int) -> np.ndarray:
        return self.mean1 if label == 1 else self.mean2

    def sd(self, label: int) -> np.ndarray:
        return self.sd1 if label == 1 else self.sd2


def compute_moments(dataset: ClassedDataset) -> ClassMoments:
    """Class-wise and pooled moments for every feature.

    Raises DegenerateFeatureError if any feature is constant within a class;
    such features make the standardized interaction observations undefined.
    """
    x1 = dataset.x[dataset.y == 1]
    x2 = dataset.x[dataset.y == 2]
    n1, n2 = x1.shape[0], x2.shape[0]
    mean1 = x1.mean(axis=0)
    mean2 = x2.mean(axis=0)
    var1 = x1.var(axis=0, ddof=1)
    var2 = x2.var(axis=0, ddof=1)
    degenerate = np.flatnonzero((var1 == 0.0) | (var2 == 0.0))
    if degenerate.size:
        raise DegenerateFeatureError(
            dataset.feature_names[j] for j in degenerate
        )
    pooled = np.sqrt(((n1 - 1) * var1 + (n2 - 1) * var2) / (n1 + n2 - 2))
    return ClassMoments(mean1, mean2, np.sqrt(var1), np.sqrt(var2), pooled)


def pooled_t(values: np.ndarray, y: np.ndarray, what: str = "values") -> float:
    """Two-sample t statistic (class 1 minus class 2, pooled sd).

    Single code path for every statistic in the package: main contrasts,
    interaction contrasts, and their permuted versions all call this, which
    is what makes label swaps exact sign flips.
    """
    v1 = values[y == 1]
    v2 = values[y == 2]
    n1 = v1.size
    n2 = v2.size
    m1 = v1.mean()
    m2 = v2.mean()
    ss = ((v1 - m1) ** 2).sum() + ((v2 - m2) ** 2).sum()
    sp = math.sqrt(ss / (n1 + n2 - 2))
    if sp == 0.0:
        raise DataError(f"zero pooled standard deviation of {what}")
    return (m1 - m2) / (sp * math.sqrt(1.0 / n1 + 1.0 / n2))


def main_contrast(dataset: ClassedDataset, moments: ClassMoments, j: int) -> float:
    """Standardized mean difference for feature j."""
    scale = moments.pooled_sd[j] * math.sqrt(1.0 / dataset.n1 + 1.0 / dataset.n2)
    return float((moments.mean1[j] - moments.mean2[j]) / scale)


def interaction_observations(
    dataset: ClassedDataset, moments: ClassMoments, j: int, k: int
) -> np.ndarray:
    """Per-observation standardized products for the pair (j, k), each row
    centered and scaled by its own class's moments."""
    out = np.empty(dataset.n, dtype=np.float64)
    for label in (1, 2):
        rows = dataset.y == label
        mean = moments.mean(label)
        sd = moments.sd(label)
        out[rows] = (
            (dataset.x[rows, j] - mean[j]) * (dataset.x[rows, k] - mean[k])
        ) / (sd[j] * sd[k])
    return out


def interaction_contrast(z_obs: np.ndarray, y: np.ndarray) -> float:
    """Two-sample t statistic of the standardized products."""
    return pooled_t(z_obs, y, what="interaction observations")


class PairObservationCache:
    """Per-pair interaction observations, cached up to a byte budget.

    Pairs beyond the budget are recomputed on demand, so results never
    depend on the budget; only speed does.
    """

    def __init__(
        self,
        dataset: ClassedDataset,
        moments: ClassMoments,
        max_bytes: int = 256 * 1024 * 1024,
    ):
        self._dataset = dataset
        self._moments = moments
        self._max_bytes = int(max_bytes)
        self._store: dict[tuple[int, int], np.ndarray] = {}
        self._bytes = 0

    def get(self, j: int, k: int) -> np.ndarray:
        key = (j, k) if j <= k else (k, j)
        hit = self._store.get(key)
        if hit is not None:
            return hit
        z_obs = interaction_observations(self._dataset, self._moments, *key)
        if self._bytes + z_obs.nbytes <= self._max_bytes:
            z_obs.setflags(write=False)
            self._store[key] = z_obs
            self._bytes += z_obs.nbytes
        return z_obs


@dataclass(frozen=True)
class ContrastSet:
    """All main contrasts (w, length p) and interaction contrasts (z, p x p
    symmetric with zero diagonal)."""

    w: np.ndarray
    z: np.ndarray
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        w = np.array(self.w, dtype=np.float64)
        z = np.array(self.z, dtype=np.float64)
        p = w.shape[0]
        if z.shape != (p, p):
            raise DataError(f"z has shape {z.shape}, expected ({p}, {p})")
        names = self.feature_names or tuple(f"V{j + 1}" for j in range(p))
        w.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "feature_names", tuple(names))

    @property
    def p(self) -> int:
        return self.w.shape[0]

    def pairs(self):
        p = self.p
        return [(j, k) for j in range(p) for k in range(j + 1, p)]


def compute_all_contrasts(
    dataset: ClassedDataset,
    moments: ClassMoments | None = None,
    materialized: bool = False,
) -> ContrastSet:
    """Every w_j and z_jk for the dataset.

    The default streams pair by pair and never allocates the N x p x p
    product tensor; materialized=True builds the tensor first (useful when
    it is reused) and produces bit-identical statistics.
    """
    if moments is None:
        moments = compute_moments(dataset)
    n1, n2 = dataset.n1, dataset.n2
    scale = moments.pooled_sd * math.sqrt(1.0 / n1 + 1.0 / n2)
    w = (moments.mean1 - moments.mean2) / scale
    p = dataset.p
    z = np.zeros((p, p), dtype=np.float64)
    if materialized:
        tensor = np.empty((dataset.n, p, p), dtype=np.float64)
        for j in range(p):
            for k in range(j + 1, p):
                z_obs = interaction_observations(dataset, moments, j, k)
                tensor[:, j, k] = z_obs
                tensor[:, k, j] = z_obs
        for j in range(p):
            for k in range(j + 1, p):
                t = pooled_t(
                    tensor[:, j, k], dataset.y, what=f"pair ({j + 1}, {k + 1})"
                )
                z[j, k] = t
                z[k, j] = t
    else:
        for j in range(p):
            for k in range(j + 1, p):
                z_obs = interaction_observations(dataset, moments, j, k)
                t = pooled_t(z_obs, dataset.y, what=f"pair ({j + 1}, {k + 1})")
                z[j, k] = t
                z[k, j] = t
    return ContrastSet(w, z, dataset.feature_names)


def contrasts_to_tsv(contrasts: ContrastSet) -> str:
    """Two blocks: per-feature main contrasts, then per-pair interactions."""
    names = contrasts.feature_names
    main_rows = [
        (names[j], float(contrasts.w[j])) for j in range(contrasts.p)
    ]
    int_rows = [
        (names[j], names[k], float(contrasts.z[j, k]))
        for j, k in contrasts.pairs()
    ]
    return document(
        [
            section("main", ["feature", "w"], main_rows),
            section("interaction", ["feature_j", "feature_k", "z"], int_rows),
        ]
    )
