"""Synthetic two-class scenarios with planted main effects and interactions.

Observations are multivariate normal. Class 1 shifts each true main effect
by +delta/2 and class 2 by -delta/2; each true pair (j, k) gets covariance
+rho/2 in class 1 and -rho/2 in class 2 on top of an identity base, so an
interaction is a class difference in dependence, not in location. The
interaction graph is a union of stars: each hub feature is paired with a
fixed number of partner features.

Scenarios:
  * hierarchical: the hubs ARE the main-effect features (interactions
    sit under main effects).
  * anti_hierarchical: main effects exist, but all interactions sit on
    hub features disjoint from them (partners may serve two hubs when the
    partner pool is short).
  * no_main_effects: interactions as in hierarchical but no mean shift
    anywhere and no true main effects.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .baselines import interaction_ranking
from .contrasts import compute_all_contrasts
from .dataset import ClassedDataset
from .errors import ScenarioError
from .parallel import ordered_map

SCENARIOS = ("hierarchical", "anti_hierarchical", "no_main_effects")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "hierarchical"
    n: int = 200
    p: int = 50
    n_main: int = 5
    interactions_per_main: int = 9
    main_effect_size: float = 1.5
    interaction_strength: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ScenarioError(
                f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}"
            )
        if self.n < 4:
            raise ScenarioError("n must be at least 4 (2 per class)")
        if self.p < 2:
            raise ScenarioError("p must be at least 2")
        if self.n_main < 1 or self.interactions_per_main < 1:
            raise ScenarioError("n_main and interactions_per_main must be >= 1")
        hubs = self.n_main
        slots = self.n_main * self.interactions_per_main
        if self.scenario == "anti_hierarchical":
            pool = self.p - 2 * self.n_main
            if pool < self.interactions_per_main or slots > 2 * pool:
                raise ScenarioError(
                    f"p={self.p} too small for {slots} interaction slots on "
                    f"{hubs} hubs disjoint from {self.n_main} main effects"
                )
        else:
            if self.p < hubs + slots:
                raise ScenarioError(
                    f"p={self.p} too small for {hubs} hubs with "
                    f"{self.interactions_per_main} partners each"
                )
        if not 0.0 <= self.interaction_strength < 2.0:
            raise ScenarioError("interaction_strength must be in [0, 2)")


@dataclass(frozen=True)
class GroundTruth:
    true_main: frozenset
    true_pairs: frozenset

    def is_true_pair(self, j: int, k: int) -> bool:
        return (min(j, k), max(j, k)) in self.true_pairs


def _star_pairs(hubs, partners, per_hub: int) -> list[tuple[int, int]]:
    pairs = []
    for i, hub in enumerate(hubs):
        for partner in partners[i * per_hub : (i + 1) * per_hub]:
            pairs.append((min(hub, partner), max(hub, partner)))
    return pairs


def _shared_star_pairs(hubs, pool, per_hub: int, rng) -> list[tuple[int, int]]:
    # each pool feature may serve at most two hubs; no duplicate pairs
    supply = deque(list(pool) + list(rng.permutation(pool)))
    pairs = []
    for hub in hubs:
        mine: list[int] = []
        skipped: list[int] = []
        while len(mine) < per_hub:
            candidate = int(supply.popleft())
            if candidate in mine:
                skipped.append(candidate)
            else:
                mine.append(candidate)
        supply.extend(skipped)
        pairs.extend((min(hub, c), max(hub, c)) for c in mine)
    return pairs


def generate_scenario(config: ScenarioConfig) -> tuple[ClassedDataset, GroundTruth]:
    """Draw one dataset and its ground truth from the configured design.

    Both class covariance matrices are verified positive definite by
    Cholesky factorization before sampling.
    """
    rng = np.random.default_rng(config.seed)
    p, m = config.p, config.n_main
    per_hub = config.interactions_per_main
    perm = rng.permutation(p)

    if config.scenario == "hierarchical":
        mains = perm[:m]
        hubs = mains
        partners = perm[m : m + m * per_hub]
        pairs = _star_pairs(hubs, partners, per_hub)
        true_main = frozenset(int(j) for j in mains)
    elif config.scenario == "no_main_effects":
        hubs = perm[:m]
        partners = perm[m : m + m * per_hub]
        pairs = _star_pairs(hubs, partners, per_hub)
        true_main = frozenset()
    else:
        mains = perm[:m]
        hubs = perm[m : 2 * m]
        pool = perm[2 * m :]
        pairs = _shared_star_pairs(hubs, pool, per_hub, rng)
        true_main = frozenset(int(j) for j in mains)

    half_rho = 0.5 * config.interaction_strength
    adjacency = np.zeros((p, p), dtype=np.float64)
    for j, k in pairs:
        adjacency[j, k] = adjacency[k, j] = 1.0
    sigma1 = np.eye(p) + half_rho * adjacency
    sigma2 = np.eye(p) - half_rho * adjacency
    try:
        l1 = np.linalg.cholesky(sigma1)
        l2 = np.linalg.cholesky(sigma2)
    except np.linalg.LinAlgError:
        raise ScenarioError(
            f"interaction strength {config.interaction_strength} makes a "
            "class covariance indefinite for this design"
        ) from None

    mu = np.zeros(p)
    if true_main:
        mu[list(true_main)] = 0.5 * config.main_effect_size
    n1 = config.n - config.n // 2
    n2 = config.n // 2
    x1 = rng.standard_normal((n1, p)) @ l1.T + mu
    x2 = rng.standard_normal((n2, p)) @ l2.T - mu
    x = np.vstack([x1, x2])
    y = np.concatenate([np.ones(n1, dtype=np.int64), np.full(n2, 2, dtype=np.int64)])
    dataset = ClassedDataset(x, y)
    truth = GroundTruth(
        true_main, frozenset((int(j), int(k)) for j, k in pairs)
    )
    return dataset, truth


def true_fdp_curve(ranked_pairs, truth: GroundTruth, max_rank: int) -> np.ndarray:
    """False discovery proportion of the top-r set for r = 1..max_rank."""
    out = np.empty(max_rank, dtype=np.float64)
    false = 0
    for r in range(1, max_rank + 1):
        if r <= len(ranked_pairs):
            j, k = ranked_pairs[r - 1]
            false += 0 if truth.is_true_pair(j, k) else 1
        else:
            false += 1  # exhausted ranking counts as false
        out[r - 1] = false / r
    return out


def run_fdp_experiment(
    config: ScenarioConfig,
    methods=("cht", "all_pairs", "screen_strong", "screen_weak"),
    n_replications: int = 10,
    max_rank: int = 45,
    threads: int = 1,
) -> dict[str, np.ndarray]:
    """Mean FDP-versus-rank curve per method over replicated datasets.

    Replication r uses seed config.seed + r, so curves are reproducible
    and methods are compared on identical datasets.
    """

    def one_replication(r: int) -> dict[str, np.ndarray]:
        cfg = replace(config, seed=config.seed + r)
        dataset, truth = generate_scenario(cfg)
        contrasts = compute_all_contrasts(dataset)
        curves = {}
        for method in methods:
            ranked, _ = interaction_ranking(contrasts, method)
            curves[method] = true_fdp_curve(ranked, truth, max_rank)
        return curves

    rows = ordered_map(one_replication, range(n_replications), threads)
    return {
        method: np.mean([row[method] for row in rows], axis=0)
        for method in methods
    }


def _power_at_budget(ranked, keys, truth: GroundTruth, fdp_budget: float) -> int:
    """True positives in the largest tie-respecting prefix with FDP within
    the budget; prefixes are evaluated at distinct-statistic boundaries."""
    best_tp = 0
    tp = fp = 0
    i = 0
    n = len(ranked)
    while i < n:
        j = i
        while j < n and keys[j] == keys[i]:
            pj, pk = ranked[j]
            if truth.is_true_pair(pj, pk):
                tp += 1
            else:
                fp += 1
            j += 1
        if fp / (tp + fp) <= fdp_budget:
            best_tp = tp
        i = j
    return best_tp


def run_power_experiment(
    config: ScenarioConfig,
    n_values=(200, 500),
    effect_sizes=None,
    methods=("cht", "all_pairs"),
    n_replications: int = 10,
    fdp_budget: float = 0.2,
    threads: int = 1,
) -> dict[tuple[str, int, float], float]:
    """Mean true-positive count of the largest rejection set with FDP at or
    under the budget, per (method, n, main effect size)."""
    if effect_sizes is None:
        effect_sizes = (config.main_effect_size,)
    grid = [
        (n, delta, r)
        for n in n_values
        for delta in effect_sizes
        for r in range(n_replications)
    ]

    def one_cell(item) -> dict[str, int]:
        n, delta, r = item
        cfg = replace(
            config, n=n, main_effect_size=delta, seed=config.seed + r
        )
        dataset, truth = generate_scenario(cfg)
        contrasts = compute_all_contrasts(dataset)
        out = {}
        for method in methods:
            ranked, keys = interaction_ranking(contrasts, method)
            out[method] = _power_at_budget(ranked, keys, truth, fdp_budget)
        return out

    rows = ordered_map(one_cell, grid, threads)
    result: dict[tuple[str, int, float], float] = {}
    for method in methods:
        for n in n_values:
            for delta in effect_sizes:
                cells = [
                    rows[i][method]
                    for i, (gn, gd, _) in enumerate(grid)
                    if gn == n and gd == delta
                ]
                result[(method, n, float(delta))] = float(np.mean(cells))
    return result
