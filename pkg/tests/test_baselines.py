import numpy as np
import pytest

from cht.baselines import (
    all_pairs_statistics,
    bootstrap_topk_frequency,
    interaction_ranking,
    quantile_threshold,
    screen_main_effects,
    split_half_overlap,
)
from cht.contrasts import ContrastSet, compute_all_contrasts
from cht.dataset import ClassedDataset
from cht.errors import ChtError, DataError

from conftest import make_noise_dataset


def contrast_set(w, z):
    w = np.asarray(w, dtype=float)
    return ContrastSet(w, np.asarray(z, dtype=float), tuple(f"V{j+1}" for j in range(w.size)))


def planted_pair_dataset(n=200, p=6, seed=88, load=0.9):
    """Class 1 carries one strongly correlated pair, class 2 none."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    shared = rng.standard_normal(n // 2)
    noise = np.sqrt(1.0 - load * load)
    x[: n // 2, 0] = load * shared + noise * x[: n // 2, 0]
    x[: n // 2, 1] = load * shared + noise * x[: n // 2, 1]
    return ClassedDataset(x, np.repeat([1, 2], n // 2))


# ----------------------------------------------------------------- all pairs


def test_all_pairs_is_absolute_z():
    rng = np.random.default_rng(1)
    z = rng.standard_normal((4, 4))
    z = (z + z.T) / 2.0
    np.fill_diagonal(z, 0.0)
    con = contrast_set(rng.standard_normal(4), z)
    assert np.array_equal(all_pairs_statistics(con), np.abs(z))


def test_all_pairs_zero_contrasts():
    con = contrast_set([1.0, 2.0, 3.0], np.zeros((3, 3)))
    assert np.all(all_pairs_statistics(con) == 0.0)


def test_rankings_agree_when_mains_dominate():
    # every row satisfies the no-shrinkage condition, so the hierarchy
    # machinery changes nothing
    z = np.zeros((3, 3))
    z[0, 1] = z[1, 0] = 0.9
    z[0, 2] = z[2, 0] = 0.4
    z[1, 2] = z[2, 1] = 0.7
    con = contrast_set([10.0, -9.0, 8.0], z)
    cht_pairs, _ = interaction_ranking(con, "cht")
    ap_pairs, _ = interaction_ranking(con, "all_pairs")
    assert cht_pairs == ap_pairs == [(0, 1), (1, 2), (0, 2)]


def test_rankings_disagree_on_orphan_interaction():
    # the orphan pair (3,4) has the largest raw contrast but no main
    # support; the hierarchy pushes it below the supported pair (1,2)
    z = np.zeros((4, 4))
    z[0, 1] = z[1, 0] = 3.0
    z[2, 3] = z[3, 2] = 3.5
    con = contrast_set([5.0, 4.0, 0.1, 0.1], z)
    cht_pairs, _ = interaction_ranking(con, "cht")
    ap_pairs, _ = interaction_ranking(con, "all_pairs")
    assert ap_pairs[0] == (2, 3)
    assert cht_pairs.index((0, 1)) < cht_pairs.index((2, 3))


def test_unknown_method_rejected():
    con = contrast_set([1.0, 2.0], [[0.0, 0.5], [0.5, 0.0]])
    with pytest.raises(ChtError, match="unknown method"):
        interaction_ranking(con, "ridge")


# ------------------------------------------------------------------ screening


def test_quantile_threshold_nearest_rank():
    values = [4.0, 3.0, 2.0, 1.0]
    # ceil(0.75 * 4) = 3rd smallest
    assert quantile_threshold(values, 0.75) == 3.0
    assert quantile_threshold(values, 0.5) == 2.0
    assert quantile_threshold(values, 0.05) == 1.0
    assert quantile_threshold(values, 1.0) == 4.0


def test_quantile_threshold_rejects_bad_input():
    with pytest.raises(DataError):
        quantile_threshold([], 0.5)
    with pytest.raises(DataError):
        quantile_threshold([1.0], 0.0)
    with pytest.raises(DataError):
        quantile_threshold([1.0], 1.5)


def test_screening_example_four_features():
    # |w| = (4,3,2,1), threshold 3: only the first feature passes stage one
    z = np.zeros((4, 4))
    con = contrast_set([4.0, -3.0, 2.0, 1.0], z)
    strong, _ = screen_main_effects(con, 0.75, "strong")
    weak, _ = screen_main_effects(con, 0.75, "weak")
    assert strong == []
    assert weak == [(0, 1), (0, 2), (0, 3)]


def test_screening_strong_subset_of_weak():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        p = 7
        z = rng.standard_normal((p, p))
        z = (z + z.T) / 2.0
        np.fill_diagonal(z, 0.0)
        con = contrast_set(rng.standard_normal(p), z)
        strong, _ = screen_main_effects(con, 0.6, "strong")
        weak, _ = screen_main_effects(con, 0.6, "weak")
        assert set(strong) <= set(weak)
        assert len(weak) <= p * (p - 1) // 2


def test_tiny_quantile_keeps_everything_weak():
    con = contrast_set([4.0, 3.0, 2.0, 1.0], np.zeros((4, 4)))
    weak, _ = screen_main_effects(con, 0.01, "weak")
    assert len(weak) == 6


def test_screening_matrix_masks_noncandidates():
    z = np.full((4, 4), 0.5)
    np.fill_diagonal(z, 0.0)
    con = contrast_set([4.0, 3.0, 2.0, 1.0], z)
    weak, matrix = screen_main_effects(con, 0.75, "weak")
    assert matrix[0, 1] == 0.5
    assert np.isnan(matrix[1, 2])


def test_screening_rejects_unknown_rule():
    con = contrast_set([1.0, 2.0], np.zeros((2, 2)))
    with pytest.raises(DataError):
        screen_main_effects(con, 0.75, "medium")


def test_screened_ranking_demotes_but_keeps_all_pairs():
    z = np.zeros((4, 4))
    z[0, 1] = z[1, 0] = 1.0
    z[2, 3] = z[3, 2] = 2.0
    con = contrast_set([4.0, 3.0, 2.0, 1.0], z)
    pairs, keys = interaction_ranking(con, "screen_weak")
    assert len(pairs) == 6
    # candidate pairs occupy the leading tier even with smaller |z|
    assert pairs.index((0, 1)) < pairs.index((2, 3))
    assert keys[0][0] == 1.0


# ------------------------------------------------------------------ bootstrap


def test_bootstrap_single_resample_frequencies():
    ds = make_noise_dataset(n=30, p=5, seed=20)
    freq = bootstrap_topk_frequency(ds, "all_pairs", k=3, n_resamples=1, seed=2)
    assert all(v == 1.0 for v in freq.values())
    assert len(freq) == 3


def test_bootstrap_frequency_mass_equals_k():
    ds = make_noise_dataset(n=40, p=6, seed=21)
    k = 4
    freq = bootstrap_topk_frequency(ds, "cht", k=k, n_resamples=25, seed=3)
    assert abs(sum(freq.values()) - k) <= 1e-12


def test_bootstrap_finds_dominant_pair():
    ds = planted_pair_dataset()
    freq = bootstrap_topk_frequency(ds, "all_pairs", k=1, n_resamples=100, seed=5)
    assert freq.get((0, 1), 0.0) >= 0.95


def test_bootstrap_deterministic_and_thread_safe():
    ds = make_noise_dataset(n=30, p=5, seed=22)
    a = bootstrap_topk_frequency(ds, "cht", k=3, n_resamples=20, seed=7, threads=1)
    b = bootstrap_topk_frequency(ds, "cht", k=3, n_resamples=20, seed=7, threads=4)
    assert a == b


# ----------------------------------------------------------------- split half


def test_split_overlap_shape_and_range():
    ds = make_noise_dataset(n=40, p=6, seed=23)
    overlap = split_half_overlap(ds, "all_pairs", k_max=5, n_splits=10, seed=4)
    assert overlap.shape == (5,)
    assert np.all((overlap >= 0.0) & (overlap <= 1.0))


def test_split_overlap_finds_dominant_pair_every_time():
    ds = planted_pair_dataset(n=400)
    overlap = split_half_overlap(ds, "all_pairs", k_max=1, n_splits=10, seed=6)
    assert overlap[0] == 1.0


def test_split_overlap_near_chance_on_noise():
    # two independent top-1 picks out of 45 pairs agree ~2% of the time
    ds = make_noise_dataset(n=60, p=10, seed=24)
    overlap = split_half_overlap(ds, "all_pairs", k_max=3, n_splits=50, seed=8)
    assert overlap[0] <= 0.2
    assert overlap[2] <= 0.3


def test_split_overlap_deterministic_and_thread_safe():
    ds = make_noise_dataset(n=40, p=6, seed=25)
    a = split_half_overlap(ds, "cht", k_max=4, n_splits=12, seed=9, threads=1)
    b = split_half_overlap(ds, "cht", k_max=4, n_splits=12, seed=9, threads=4)
    assert np.array_equal(a, b)


def test_split_overlap_needs_enough_observations():
    x = np.random.default_rng(0).standard_normal((6, 3))
    ds = ClassedDataset(x, [1, 1, 1, 2, 2, 2])
    with pytest.raises(DataError):
        split_half_overlap(ds, "cht", k_max=2, n_splits=3, seed=1)
