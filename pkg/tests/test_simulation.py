import numpy as np
import pytest

from cht.contrasts import compute_all_contrasts
from cht.errors import ScenarioError
from cht.simulation import (
    GroundTruth,
    ScenarioConfig,
    generate_scenario,
    run_fdp_experiment,
    run_power_experiment,
    true_fdp_curve,
)


def small_config(**kwargs):
    base = dict(
        scenario="hierarchical",
        n=40,
        p=8,
        n_main=2,
        interactions_per_main=2,
        seed=0,
    )
    base.update(kwargs)
    return ScenarioConfig(**base)


# -------------------------------------------------------------- ground truth


def test_default_truth_has_45_pairs():
    _, truth = generate_scenario(ScenarioConfig(seed=1))
    assert len(truth.true_pairs) == 45
    assert len(truth.true_main) == 5
    mains = set(truth.true_main)
    for j, k in truth.true_pairs:
        assert j in mains or k in mains


def test_anti_hierarchical_pairs_avoid_mains():
    _, truth = generate_scenario(
        ScenarioConfig(scenario="anti_hierarchical", seed=2)
    )
    assert len(truth.true_pairs) == 45
    mains = set(truth.true_main)
    for j, k in truth.true_pairs:
        assert j not in mains and k not in mains


def test_no_main_effects_truth():
    _, truth = generate_scenario(
        ScenarioConfig(scenario="no_main_effects", seed=3)
    )
    assert truth.true_main == frozenset()
    assert len(truth.true_pairs) == 45


def test_is_true_pair_is_unordered():
    truth = GroundTruth(true_main=(0,), true_pairs=((0, 3),))
    assert truth.is_true_pair(0, 3)
    assert truth.is_true_pair(3, 0)
    assert not truth.is_true_pair(0, 1)


# ----------------------------------------------------------------- generator


def test_generation_is_deterministic():
    cfg = small_config(seed=7)
    a_ds, a_truth = generate_scenario(cfg)
    b_ds, b_truth = generate_scenario(cfg)
    assert np.array_equal(a_ds.x, b_ds.x)
    assert np.array_equal(a_ds.y, b_ds.y)
    assert a_truth == b_truth


def test_classes_are_balanced():
    ds, _ = generate_scenario(small_config(n=41))
    assert {ds.n1, ds.n2} == {20, 21}


def test_generator_moments_match_design():
    # large sample: within-class correlation on a true pair ~ +-rho/2,
    # class mean difference on a true main ~ delta
    cfg = ScenarioConfig(
        n=10000, p=12, n_main=2, interactions_per_main=2,
        main_effect_size=1.5, interaction_strength=0.5, seed=42,
    )
    ds, truth = generate_scenario(cfg)
    j, k = sorted(truth.true_pairs)[0]
    rows1 = ds.y == 1
    rows2 = ds.y == 2
    c1 = np.corrcoef(ds.x[rows1][:, [j, k]].T)[0, 1]
    c2 = np.corrcoef(ds.x[rows2][:, [j, k]].T)[0, 1]
    assert abs(c1 - 0.25) <= 0.05
    assert abs(c2 + 0.25) <= 0.05
    m = sorted(truth.true_main)[0]
    diff = ds.x[rows1, m].mean() - ds.x[rows2, m].mean()
    assert abs(diff - 1.5) <= 0.1


def test_null_generator_contrasts_are_centered():
    # delta=0, rho=0 over 200 replications: mean w within 3 standard errors
    ws = []
    for r in range(200):
        cfg = small_config(
            n=30, p=6, main_effect_size=0.0, interaction_strength=0.0,
            seed=5000 + r,
        )
        ds, _ = generate_scenario(cfg)
        ws.append(compute_all_contrasts(ds).w)
    ws = np.concatenate(ws)
    se = ws.std(ddof=1) / np.sqrt(ws.size)
    assert abs(ws.mean()) <= 3.0 * se


# ---------------------------------------------------------------- validation


def test_rejects_unknown_scenario():
    with pytest.raises(ScenarioError, match="scenario"):
        ScenarioConfig(scenario="adversarial")


def test_rejects_structure_that_does_not_fit():
    with pytest.raises(ScenarioError):
        ScenarioConfig(p=10, n_main=5, interactions_per_main=9)


def test_rejects_bad_strength():
    with pytest.raises(ScenarioError):
        ScenarioConfig(interaction_strength=2.0)
    with pytest.raises(ScenarioError):
        ScenarioConfig(interaction_strength=-0.1)


def test_rejects_tiny_sample():
    with pytest.raises(ScenarioError):
        ScenarioConfig(n=3)


def test_indefinite_covariance_raises():
    # many strong interactions sharing leaf features break positive
    # definiteness; the factorization guard must catch it
    cfg = ScenarioConfig(
        scenario="anti_hierarchical", interaction_strength=1.2, seed=0
    )
    with pytest.raises(ScenarioError, match="indefinite"):
        generate_scenario(cfg)


# --------------------------------------------------------------- experiments


def test_fdp_curve_arithmetic():
    truth = GroundTruth(true_main=(), true_pairs=((0, 1),))
    ranked = [(0, 1), (2, 3), (0, 2)]
    curve = true_fdp_curve(ranked, truth, 4)
    assert np.allclose(curve, [0.0, 0.5, 2 / 3, 0.75])


def test_fdp_rank_one_with_overwhelming_signal():
    cfg = ScenarioConfig(
        n=400, p=10, n_main=1, interactions_per_main=1,
        main_effect_size=2.0, interaction_strength=1.2, seed=30,
    )
    curves = run_fdp_experiment(cfg, methods=("cht",), n_replications=3, max_rank=1)
    assert curves["cht"][0] == 0.0


def test_fdp_experiment_shapes_and_threads():
    cfg = small_config(n=60, p=8, seed=11)
    serial = run_fdp_experiment(
        cfg, methods=("cht", "all_pairs"), n_replications=4, max_rank=6, threads=1
    )
    parallel = run_fdp_experiment(
        cfg, methods=("cht", "all_pairs"), n_replications=4, max_rank=6, threads=4
    )
    assert set(serial) == {"cht", "all_pairs"}
    for method in serial:
        assert serial[method].shape == (6,)
        assert np.all((serial[method] >= 0.0) & (serial[method] <= 1.0))
        assert np.array_equal(serial[method], parallel[method])


def test_power_zero_signal_finds_nothing():
    cfg = small_config(
        n=40, p=8, main_effect_size=0.0, interaction_strength=0.0, seed=17
    )
    result = run_power_experiment(
        cfg, n_values=(40,), methods=("cht", "all_pairs"), n_replications=3
    )
    assert result[("cht", 40, 0.0)] == 0.0
    assert result[("all_pairs", 40, 0.0)] == 0.0


def test_power_strong_signal_finds_pairs():
    cfg = ScenarioConfig(
        n=300, p=12, n_main=2, interactions_per_main=2,
        main_effect_size=1.5, interaction_strength=1.0, seed=23,
    )
    result = run_power_experiment(
        cfg, n_values=(300,), methods=("cht",), n_replications=3
    )
    assert result[("cht", 300, 1.5)] >= 3.0
