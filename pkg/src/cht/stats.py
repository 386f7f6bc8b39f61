"""Closed-form test statistics: the penalty value at which each effect
enters the regularization path.

For row j with main contrast w and remaining interaction contrasts z, the
main effect enters at

    nu = max(|w|, (|w| + ||z||_inf) / 2)

and interaction k enters at

    nu_k = min(|z_k|, |z_k|/2 + max(|w| - G_k, 0)/2),
    G_k  = sum over |z_l| strictly greater than |z_k| of (|z_l| - |z_k|),

so an interaction is shrunk by at most half and never stretched. Each pair
(j, k) has two directed statistics, one from each endpoint's row; the test
statistic of the pair is their maximum, which is what gives weak hierarchy:
a pair never enters after both of its main effects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contrasts import ContrastSet
from .output import document, section


def lambda_hat_main(w: float, z) -> float:
    """Entry point of the main effect of a row."""
    az = np.abs(np.asarray(z, dtype=np.float64).ravel())
    W = abs(float(w))
    if az.size == 0:
        return W
    zinf = float(az.max())
    return max(W, 0.5 * zinf + 0.5 * W)


def lambda_hat_interactions(w: float, z) -> np.ndarray:
    """Entry points of every interaction of a row, aligned with z."""
    az = np.abs(np.asarray(z, dtype=np.float64).ravel())
    W = abs(float(w))
    if az.size == 0:
        return np.zeros(0, dtype=np.float64)
    asc = np.sort(az)
    desc = asc[::-1]
    csum = np.concatenate(([0.0], np.cumsum(desc)))
    # count of magnitudes strictly above each |z_k|, then their excess mass
    above = az.size - np.searchsorted(asc, az, side="right")
    excess = csum[above] - above * az
    return np.minimum(az, 0.5 * az + 0.5 * np.maximum(W - excess, 0.0))


@dataclass(frozen=True)
class TestStatistics:
    """Entry-point statistics for a full contrast set.

    lambda_main[j] is feature j's main-effect statistic. lambda_directed[j, k]
    is the entry of interaction k within row j (zero diagonal), and
    lambda_pair = max(lambda_directed, lambda_directed.T) is the symmetric
    per-pair test statistic.
    """

    lambda_main: np.ndarray
    lambda_directed: np.ndarray
    lambda_pair: np.ndarray
    feature_names: tuple[str, ...] = ()

    @property
    def p(self) -> int:
        return self.lambda_main.shape[0]


def compute_test_statistics(contrasts: ContrastSet) -> TestStatistics:
    """All main and pairwise statistics from one set of contrasts."""
    p = contrasts.p
    lambda_main = np.zeros(p, dtype=np.float64)
    directed = np.zeros((p, p), dtype=np.float64)
    partners = np.arange(p)
    for j in range(p):
        others = partners[partners != j]
        z_row = contrasts.z[j, others]
        w = float(contrasts.w[j])
        lambda_main[j] = lambda_hat_main(w, z_row)
        directed[j, others] = lambda_hat_interactions(w, z_row)
    pair = np.maximum(directed, directed.T)
    np.fill_diagonal(pair, 0.0)
    return TestStatistics(lambda_main, directed, pair, contrasts.feature_names)


@dataclass(frozen=True)
class RankedEffect:
    kind: str  # "main" or "interaction"
    features: tuple[int, ...]
    name: str
    statistic: float


def rank_effects(stats: TestStatistics, top_k: int | None = None) -> list[RankedEffect]:
    """Merge main and pair statistics into one descending ranking.

    Ties break by kind (main first) and then by feature indices, so the
    ordering is fully deterministic.
    """
    names = stats.feature_names or tuple(f"V{j + 1}" for j in range(stats.p))
    effects = [
        RankedEffect("main", (j,), names[j], float(stats.lambda_main[j]))
        for j in range(stats.p)
    ]
    for j in range(stats.p):
        for k in range(j + 1, stats.p):
            effects.append(
                RankedEffect(
                    "interaction",
                    (j, k),
                    f"{names[j]}:{names[k]}",
                    float(stats.lambda_pair[j, k]),
                )
            )
    effects.sort(key=lambda e: (-e.statistic, e.kind != "main", e.features))
    if top_k is not None:
        effects = effects[:top_k]
    return effects


def shrinkage_curve(w: float, z_others, z_grid) -> np.ndarray:
    """Statistic of one interaction as its contrast sweeps z_grid while the
    rest of the row stays fixed; shows how competing interactions and the
    main contrast shrink an effect (by a factor of at most two)."""
    z_others = np.asarray(z_others, dtype=np.float64).ravel()
    out = np.empty(len(z_grid), dtype=np.float64)
    for i, z_val in enumerate(np.asarray(z_grid, dtype=np.float64).ravel()):
        row = np.concatenate(([z_val], z_others))
        out[i] = lambda_hat_interactions(w, row)[0]
    return out


def stats_to_tsv(stats: TestStatistics, contrasts: ContrastSet) -> str:
    """Main block (feature, w, lambda_hat) and interaction block
    (feature_j, feature_k, z, lambda_jk, lambda_kj, lambda_prime), each
    sorted by statistic descending."""
    names = stats.feature_names or tuple(f"V{j + 1}" for j in range(stats.p))
    main_order = sorted(
        range(stats.p), key=lambda j: (-stats.lambda_main[j], j)
    )
    main_rows = [
        (names[j], float(contrasts.w[j]), float(stats.lambda_main[j]))
        for j in main_order
    ]
    pairs = [(j, k) for j in range(stats.p) for k in range(j + 1, stats.p)]
    pairs.sort(key=lambda jk: (-stats.lambda_pair[jk[0], jk[1]], jk))
    int_rows = [
        (
            names[j],
            names[k],
            float(contrasts.z[j, k]),
            float(stats.lambda_directed[j, k]),
            float(stats.lambda_directed[k, j]),
            float(stats.lambda_pair[j, k]),
        )
        for j, k in pairs
    ]
    return document(
        [
            section("main", ["feature", "w", "lambda_hat"], main_rows),
            section(
                "interaction",
                [
                    "feature_j",
                    "feature_k",
                    "z",
                    "lambda_jk",
                    "lambda_kj",
                    "lambda_prime",
                ],
                int_rows,
            ),
        ]
    )
