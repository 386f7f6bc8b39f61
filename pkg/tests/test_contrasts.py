import math

import numpy as np
import pytest

from cht.contrasts import (
    PairObservationCache,
    compute_all_contrasts,
    compute_moments,
    contrasts_to_tsv,
    interaction_contrast,
    interaction_observations,
    main_contrast,
    pooled_t,
)
from cht.dataset import ClassedDataset
from cht.errors import DataError, DegenerateFeatureError

from conftest import make_noise_dataset

ROOT_HALF = 1.0 / math.sqrt(2.0)


def two_class(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    x = np.vstack([x1, x2])
    y = np.repeat([1, 2], [x1.shape[0], x2.shape[0]])
    return ClassedDataset(x, y)


def test_moments_hand_example():
    # class1 values {1,3}, class2 values {0,2}: means 2 and 1, pooled
    # variance ((1)+(1)+(1)+(1))/2 = 2
    ds = two_class([[1.0], [3.0]], [[0.0], [2.0]])
    mom = compute_moments(ds)
    assert mom.mean1[0] == 2.0
    assert mom.mean2[0] == 1.0
    assert abs(mom.pooled_sd[0] - math.sqrt(2.0)) <= 1e-15


def test_moments_degenerate_feature():
    x = np.random.default_rng(2).standard_normal((8, 3))
    x[:, 2] = 4.0
    ds = ClassedDataset(x, np.repeat([1, 2], 4))
    with pytest.raises(DegenerateFeatureError) as info:
        compute_moments(ds)
    assert "V3" in info.value.features


def test_moments_symmetric_classes():
    vals = np.array([[0.0], [1.0], [2.0]])
    ds = ClassedDataset(np.vstack([vals, vals]), np.repeat([1, 2], 3))
    mom = compute_moments(ds)
    assert mom.mean1[0] == mom.mean2[0]
    assert mom.sd1[0] == mom.sd2[0]


def test_main_contrast_hand_example():
    ds = two_class([[1.0], [3.0]], [[0.0], [2.0]])
    mom = compute_moments(ds)
    w = main_contrast(ds, mom, 0)
    assert abs(w - ROOT_HALF) <= 1e-12


def test_main_contrast_label_swap_negates():
    ds = make_noise_dataset(n=24, p=4, seed=9)
    swapped = ClassedDataset(ds.x, 3 - ds.y, ds.feature_names)
    a = compute_all_contrasts(ds)
    b = compute_all_contrasts(swapped)
    assert np.array_equal(a.w, -b.w)
    assert np.array_equal(a.z, -b.z)


def test_pooled_t_matches_hand_value():
    t = pooled_t(np.array([1.0, 3.0, 0.0, 2.0]), np.array([1, 1, 2, 2]), "value")
    assert abs(t - ROOT_HALF) <= 1e-12


def test_pooled_t_rejects_constant_values():
    with pytest.raises(DataError):
        pooled_t(np.array([1.0, 1.0, 1.0, 1.0]), np.array([1, 1, 2, 2]), "value")


def test_interaction_observations_hand_example():
    # each class holds the two points (0,0) and (2,2): centered products
    # are (-1)(-1) and (1)(1), scaled by sd*sd = 2
    ds = two_class([[0.0, 0.0], [2.0, 2.0]], [[0.0, 0.0], [2.0, 2.0]])
    mom = compute_moments(ds)
    z_obs = interaction_observations(ds, mom, 0, 1)
    assert np.max(np.abs(z_obs - 0.5)) <= 1e-12


def test_interaction_observations_symmetric_in_pair():
    ds = make_noise_dataset(n=20, p=5, seed=4)
    mom = compute_moments(ds)
    assert np.array_equal(
        interaction_observations(ds, mom, 1, 3),
        interaction_observations(ds, mom, 3, 1),
    )


def test_interaction_observation_zero_at_class_mean():
    # feature 0 takes values {0,1,2} in each class, so its class means are
    # exactly 1 and the middle observations sit exactly on them
    rng = np.random.default_rng(6)
    x = np.column_stack([np.tile([0.0, 1.0, 2.0], 2), rng.standard_normal(6)])
    ds = ClassedDataset(x, np.repeat([1, 2], 3))
    mom = compute_moments(ds)
    z_obs = interaction_observations(ds, mom, 0, 1)
    assert z_obs[1] == 0.0
    assert z_obs[4] == 0.0


def test_interaction_contrast_hand_example():
    z_obs = np.array([1.0, 3.0, 0.0, 2.0])
    y = np.array([1, 1, 2, 2])
    assert abs(interaction_contrast(z_obs, y) - ROOT_HALF) <= 1e-12


def test_interaction_contrast_identical_classes_is_zero():
    z_obs = np.array([0.5, 1.5, 0.5, 1.5])
    y = np.array([1, 1, 2, 2])
    assert interaction_contrast(z_obs, y) == 0.0


def test_contrast_matrix_is_symmetric(noise_dataset):
    con = compute_all_contrasts(noise_dataset)
    assert np.array_equal(con.z, con.z.T)
    assert np.all(np.diag(con.z) == 0.0)


def test_streamed_equals_materialized():
    ds = make_noise_dataset(n=50, p=10, seed=21)
    streamed = compute_all_contrasts(ds, materialized=False)
    dense = compute_all_contrasts(ds, materialized=True)
    assert np.array_equal(streamed.w, dense.w)
    assert np.array_equal(streamed.z, dense.z)


def test_affine_invariance():
    ds = make_noise_dataset(n=30, p=5, seed=13)
    x = ds.x.copy()
    x[:, 2] = 3.5 * x[:, 2] - 11.0
    scaled = ClassedDataset(x, ds.y)
    a = compute_all_contrasts(ds)
    b = compute_all_contrasts(scaled)
    assert np.allclose(np.abs(a.w), np.abs(b.w), rtol=1e-10, atol=1e-12)
    assert np.allclose(a.z, b.z, rtol=1e-10, atol=1e-12)


def test_pair_cache_returns_same_values():
    ds = make_noise_dataset(n=20, p=6, seed=8)
    mom = compute_moments(ds)
    cache = PairObservationCache(ds, mom)
    direct = interaction_observations(ds, mom, 2, 4)
    assert np.array_equal(cache.get(2, 4), direct)
    assert np.array_equal(cache.get(4, 2), direct)
    # a second lookup must serve the stored array
    assert cache.get(2, 4) is cache.get(2, 4)


def test_pair_cache_with_zero_budget_still_correct():
    ds = make_noise_dataset(n=20, p=6, seed=8)
    mom = compute_moments(ds)
    cache = PairObservationCache(ds, mom, max_bytes=0)
    direct = interaction_observations(ds, mom, 1, 5)
    assert np.array_equal(cache.get(1, 5), direct)


def test_noise_contrasts_have_no_systematic_sign():
    # 200 small pure-noise datasets: the grand mean of all w must sit
    # within three standard errors of zero
    ws = []
    for r in range(200):
        rng = np.random.default_rng([777, r])
        x = rng.standard_normal((30, 6))
        ds = ClassedDataset(x, np.repeat([1, 2], 15))
        ws.append(compute_all_contrasts(ds).w)
    ws = np.concatenate(ws)
    se = ws.std(ddof=1) / math.sqrt(ws.size)
    assert abs(ws.mean()) <= 3.0 * se


def test_contrasts_tsv_structure(noise_dataset):
    con = compute_all_contrasts(noise_dataset)
    text = contrasts_to_tsv(con)
    assert "# main" in text
    assert "# interaction" in text
    lines = text.splitlines()
    header = lines[lines.index("# main") + 1]
    assert header == "feature\tw"
    p = noise_dataset.p
    # one row per feature plus one per unordered pair
    body = [ln for ln in lines if ln and not ln.startswith("#") and "\t" in ln]
    assert len(body) == 2 + p + p * (p - 1) // 2
