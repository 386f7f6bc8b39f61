"""Convex hierarchical testing of all pairwise interactions in two-class data.

The pipeline: standardized main and interaction contrasts feed a per-row
hierarchy-constrained convex program whose solution path has closed-form
entry points; those entry values are the test statistics, calibrated by a
permutation estimate of the false discovery rate.
"""

from .baselines import (
    all_pairs_statistics,
    bootstrap_topk_frequency,
    interaction_ranking,
    quantile_threshold,
    screen_main_effects,
    split_half_overlap,
)
from .contrasts import (
    ClassMoments,
    ContrastSet,
    PairObservationCache,
    compute_all_contrasts,
    compute_moments,
    contrasts_to_tsv,
    interaction_contrast,
    interaction_observations,
    main_contrast,
)
from .dataset import ClassedDataset, DegeneracyReport, load_csv, validate, write_csv
from .errors import ChtError, DataError, DegenerateFeatureError, ScenarioError
from .fdr import FdrCurve, estimate_fdr, fdr_to_tsv, permuted_interaction_contrasts
from .simulation import (
    GroundTruth,
    ScenarioConfig,
    generate_scenario,
    run_fdp_experiment,
    run_power_experiment,
    true_fdp_curve,
)
from .solver import (
    Knots,
    KktCertificate,
    RowSolution,
    compute_knots,
    kkt_residuals,
    row_objective,
    solve_alpha,
    solve_path,
    solve_row,
    soft_threshold,
)
from .stats import (
    RankedEffect,
    TestStatistics,
    compute_test_statistics,
    lambda_hat_interactions,
    lambda_hat_main,
    rank_effects,
    shrinkage_curve,
    stats_to_tsv,
)
from .verification import (
    OracleReport,
    oracle_entry_points,
    oracle_solve_row,
    run_oracle_check,
    uniqueness_probe,
)

__version__ = "0.1.0"

__all__ = [
    "ChtError",
    "ClassMoments",
    "ClassedDataset",
    "ContrastSet",
    "DataError",
    "DegeneracyReport",
    "DegenerateFeatureError",
    "FdrCurve",
    "GroundTruth",
    "Knots",
    "KktCertificate",
    "OracleReport",
    "PairObservationCache",
    "RankedEffect",
    "RowSolution",
    "ScenarioConfig",
    "ScenarioError",
    "TestStatistics",
    "all_pairs_statistics",
    "bootstrap_topk_frequency",
    "compute_all_contrasts",
    "compute_knots",
    "compute_moments",
    "compute_test_statistics",
    "contrasts_to_tsv",
    "estimate_fdr",
    "fdr_to_tsv",
    "generate_scenario",
    "interaction_contrast",
    "interaction_observations",
    "interaction_ranking",
    "kkt_residuals",
    "lambda_hat_interactions",
    "lambda_hat_main",
    "load_csv",
    "main_contrast",
    "oracle_entry_points",
    "oracle_solve_row",
    "permuted_interaction_contrasts",
    "quantile_threshold",
    "rank_effects",
    "row_objective",
    "run_fdp_experiment",
    "run_oracle_check",
    "run_power_experiment",
    "screen_main_effects",
    "shrinkage_curve",
    "soft_threshold",
    "solve_alpha",
    "solve_path",
    "solve_row",
    "split_half_overlap",
    "stats_to_tsv",
    "true_fdp_curve",
    "uniqueness_probe",
    "validate",
    "write_csv",
]
