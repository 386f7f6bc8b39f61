"""Command-line interface.

Subcommands: test, fdr, simulate, path, stability, shrinkage-curve,
oracle-check. Every command writes a deterministic sectioned TSV (or JSON
with --json; oracle-check is always JSON) to stdout or --output, and can
additionally render figures into a directory given with --figures. Thread
counts (--threads or the CHT_THREADS variable) never change output bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import figures as figs
from .baselines import bootstrap_topk_frequency, split_half_overlap
from .contrasts import compute_all_contrasts, compute_moments
from .dataset import load_csv
from .errors import ChtError
from .fdr import estimate_fdr, fdr_to_tsv
from .output import document, fmt, section
from .parallel import resolve_threads
from .simulation import (
    ScenarioConfig,
    run_fdp_experiment,
    run_power_experiment,
)
from .solver import solve_row
from .stats import (
    compute_test_statistics,
    lambda_hat_main,
    rank_effects,
    shrinkage_curve,
    stats_to_tsv,
)
from .verification import run_oracle_check


def _dashed(name: str) -> str:
    return name.replace("_", "-")


def _internal(name: str) -> str:
    return name.replace("-", "_")


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip() != ""]


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip() != ""]


def _add_input_args(sub):
    sub.add_argument("--input", required=True, help="delimited data file")
    sub.add_argument(
        "--header", action="store_true", help="first row holds column names"
    )
    sub.add_argument(
        "--label-column", type=int, default=0, help="0-based label column"
    )


def _add_output_args(sub, threads: bool = False):
    sub.add_argument("--output", help="write the table here instead of stdout")
    sub.add_argument("--json", action="store_true", help="emit JSON instead of TSV")
    sub.add_argument("--figures", help="directory for rendered figures")
    if threads:
        sub.add_argument(
            "--threads",
            type=int,
            default=None,
            help="worker threads (default: CHT_THREADS or all cores)",
        )


def _load(args):
    return load_csv(args.input, has_header=args.header, label_column=args.label_column)


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(args, named_figures) -> None:
    if not getattr(args, "figures", None) or not named_figures:
        return
    os.makedirs(args.figures, exist_ok=True)
    for name, fig in named_figures:
        figs.save_figure(fig, os.path.join(args.figures, f"{name}.png"))


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cmd_test(args) -> int:
    dataset = _load(args)
    contrasts = compute_all_contrasts(dataset)
    stats = compute_test_statistics(contrasts)
    names = stats.feature_names
    if args.json:
        payload = {
            "main": [
                {
                    "feature": names[j],
                    "w": float(contrasts.w[j]),
                    "lambda_hat": float(stats.lambda_main[j]),
                }
                for j in range(stats.p)
            ],
            "interaction": [
                {
                    "feature_j": names[j],
                    "feature_k": names[k],
                    "z": float(contrasts.z[j, k]),
                    "lambda_jk": float(stats.lambda_directed[j, k]),
                    "lambda_kj": float(stats.lambda_directed[k, j]),
                    "lambda_prime": float(stats.lambda_pair[j, k]),
                }
                for j, k in contrasts.pairs()
            ],
        }
        if args.top:
            payload["top"] = [
                {"kind": e.kind, "effect": e.name, "statistic": e.statistic}
                for e in rank_effects(stats, args.top)
            ]
        _emit(args, _json_text(payload))
    else:
        text = stats_to_tsv(stats, contrasts)
        if args.top:
            top_rows = [
                (e.kind, e.name, e.statistic) for e in rank_effects(stats, args.top)
            ]
            text = text.rstrip("\n") + "\n\n" + document(
                [section("top", ["kind", "effect", "statistic"], top_rows)]
            )
        _emit(args, text)
    _render(args, [("effects", figs.effect_statistic_figure(stats, contrasts))])
    return 0


def _cmd_fdr(args) -> int:
    dataset = _load(args)
    grid = None if args.grid == "auto" else _float_list(args.grid)
    curve = estimate_fdr(
        dataset,
        n_permutations=args.permutations,
        seed=args.seed,
        lambda_grid=grid,
        threads=resolve_threads(args.threads),
    )
    if args.json:
        payload = {
            "lambda": [float(v) for v in curve.lambda_grid],
            "observed_count": [int(v) for v in curve.observed_exceed],
            "null_mean": [float(v) for v in curve.null_exceed_mean],
            "fdr_hat": [float(v) for v in curve.fdr_hat],
            "permutations": curve.n_permutations,
            "seed": curve.seed,
        }
        _emit(args, _json_text(payload))
    else:
        _emit(args, fdr_to_tsv(curve))
    _render(args, [("fdr_curve", figs.fdr_curve_figure(curve))])
    return 0


def _cmd_simulate(args) -> int:
    methods = tuple(_internal(m) for m in args.methods.split(","))
    config = ScenarioConfig(
        scenario=_internal(args.scenario),
        n=args.n,
        p=args.p,
        n_main=args.n_main,
        interactions_per_main=args.per_main,
        main_effect_size=args.delta,
        interaction_strength=args.rho,
        seed=args.seed,
    )
    threads = resolve_threads(args.threads)
    named_figures = []
    if args.experiment == "fdp":
        curves = run_fdp_experiment(
            config,
            methods=methods,
            n_replications=args.reps,
            max_rank=args.max_rank,
            threads=threads,
        )
        if args.json:
            payload = {
                "scenario": config.scenario,
                "rank": list(range(1, args.max_rank + 1)),
                "mean_fdp": {m: [float(v) for v in curves[m]] for m in methods},
            }
            _emit(args, _json_text(payload))
        else:
            rows = [
                (r + 1, *(float(curves[m][r]) for m in methods))
                for r in range(args.max_rank)
            ]
            _emit(
                args,
                document(
                    [section("mean_fdp", ["rank", *map(_dashed, methods)], rows)]
                ),
            )
        named_figures.append(("fdp_by_rank", figs.fdp_rank_figure(curves)))
    else:
        n_values = args.n_grid or [config.n]
        effect_sizes = args.delta_grid or [config.main_effect_size]
        results = run_power_experiment(
            config,
            n_values=n_values,
            effect_sizes=effect_sizes,
            methods=methods,
            n_replications=args.reps,
            fdp_budget=args.fdp_budget,
            threads=threads,
        )
        if args.json:
            payload = {
                "scenario": config.scenario,
                "fdp_budget": args.fdp_budget,
                "power": [
                    {
                        "method": m,
                        "n": n,
                        "effect_size": float(d),
                        "mean_true_positives": results[(m, n, float(d))],
                    }
                    for m in methods
                    for n in n_values
                    for d in effect_sizes
                ],
            }
            _emit(args, _json_text(payload))
        else:
            rows = [
                (_dashed(m), n, float(d), results[(m, n, float(d))])
                for m in methods
                for n in n_values
                for d in effect_sizes
            ]
            _emit(
                args,
                document(
                    [
                        section(
                            "power",
                            ["method", "n", "effect_size", "mean_true_positives"],
                            rows,
                        )
                    ]
                ),
            )
        named_figures.append(
            ("power", figs.power_figure(results, n_values, effect_sizes, methods))
        )
    _render(args, named_figures)
    return 0


def _cmd_path(args) -> int:
    dataset = _load(args)
    names = dataset.feature_names
    if args.feature in names:
        j = names.index(args.feature)
    else:
        try:
            j = int(args.feature) - 1
        except ValueError:
            raise ChtError(f"unknown feature {args.feature!r}") from None
        if not 0 <= j < dataset.p:
            raise ChtError(f"feature index {args.feature} out of range 1..{dataset.p}")
    contrasts = compute_all_contrasts(dataset)
    partners = [k for k in range(dataset.p) if k != j]
    w = float(contrasts.w[j])
    z_row = contrasts.z[j, partners]
    lam_max = args.lambda_max
    if lam_max is None:
        entry = lambda_hat_main(w, z_row)
        lam_max = 1.05 * entry if entry > 0.0 else 1.0
    lam_min = args.lambda_min if args.lambda_min is not None else lam_max / 100.0
    lambdas = np.linspace(lam_max, lam_min, args.points)
    rows = []
    betas = []
    thetas = []
    for lam in lambdas:
        solution, certificate = solve_row(w, z_row, float(lam))
        rows.append(
            (
                float(lam),
                solution.case_label,
                solution.beta,
                *(float(t) for t in solution.theta),
                certificate.alpha,
            )
        )
        betas.append(solution.beta)
        thetas.append(solution.theta)
    partner_names = [names[k] for k in partners]
    if args.json:
        payload = {
            "feature": names[j],
            "w": w,
            "lambda": [float(v) for v in lambdas],
            "rows": [
                {
                    "lambda": r[0],
                    "case": r[1],
                    "beta": r[2],
                    "theta": list(r[3:-1]),
                    "alpha": r[-1],
                }
                for r in rows
            ],
        }
        _emit(args, _json_text(payload))
    else:
        header = [
            "lambda",
            "case",
            "beta",
            *(f"theta_{name}" for name in partner_names),
            "alpha",
        ]
        _emit(args, document([section(f"path {names[j]}", header, rows)]))
    _render(
        args,
        [("path", figs.path_figure(lambdas, betas, np.asarray(thetas), partner_names))],
    )
    return 0


def _cmd_stability(args) -> int:
    if (args.bootstrap is None) == (args.splits is None):
        raise ChtError("choose exactly one of --bootstrap B or --splits R")
    dataset = _load(args)
    method = _internal(args.method)
    threads = resolve_threads(args.threads)
    names = dataset.feature_names
    if args.bootstrap is not None:
        freq = bootstrap_topk_frequency(
            dataset,
            method,
            k=args.topk,
            n_resamples=args.bootstrap,
            seed=args.seed,
            threads=threads,
        )
        items = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
        if args.json:
            payload = {
                "method": method,
                "top_k": args.topk,
                "resamples": args.bootstrap,
                "frequency": [
                    {
                        "feature_j": names[j],
                        "feature_k": names[k],
                        "frequency": value,
                    }
                    for (j, k), value in items
                ],
            }
            _emit(args, _json_text(payload))
        else:
            rows = [(names[j], names[k], value) for (j, k), value in items]
            _emit(
                args,
                document(
                    [
                        section(
                            "bootstrap_frequency",
                            ["feature_j", "feature_k", "frequency"],
                            rows,
                        )
                    ]
                ),
            )
        _render(args, [("bootstrap", figs.frequency_figure(freq, names))])
    else:
        overlaps = split_half_overlap(
            dataset,
            method,
            k_max=args.topk,
            n_splits=args.splits,
            seed=args.seed,
            threads=threads,
        )
        if args.json:
            payload = {
                "method": method,
                "splits": args.splits,
                "overlap": [float(v) for v in overlaps],
            }
            _emit(args, _json_text(payload))
        else:
            rows = [(k + 1, float(overlaps[k])) for k in range(len(overlaps))]
            _emit(args, document([section("split_overlap", ["k", "overlap"], rows)]))
        _render(args, [("overlap", figs.overlap_figure(overlaps))])
    return 0


def _cmd_shrinkage_curve(args) -> int:
    w_values = _float_list(args.w)
    rng = np.random.default_rng(args.seed)
    others = rng.standard_normal(args.count - 1)
    if args.mode == "one-large":
        others = 0.5 * others
    z_grid = np.linspace(0.0, args.z_max, args.z_points)
    curves = {}
    for w in w_values:
        curves[f"w={fmt(float(w))}"] = shrinkage_curve(w, others, z_grid)
    if args.json:
        payload = {
            "mode": args.mode,
            "z": [float(v) for v in z_grid],
            "curves": {
                label: [float(v) for v in values] for label, values in curves.items()
            },
        }
        _emit(args, _json_text(payload))
    else:
        header = ["z", *(f"lambda_{label}" for label in curves)]
        rows = [
            (float(z_grid[i]), *(float(curves[label][i]) for label in curves))
            for i in range(z_grid.size)
        ]
        _emit(args, document([section("shrinkage", header, rows)]))
    _render(args, [("shrinkage", figs.shrinkage_figure(z_grid, curves))])
    return 0


def _cmd_oracle_check(args) -> int:
    report = run_oracle_check(
        instances=args.instances,
        seed=args.seed,
        grid_resolution=args.grid,
    )
    _emit(args, _json_text(report.to_dict()))
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cht",
        description=(
            "Convex hierarchical testing of all pairwise interactions in "
            "two-class data"
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser(
        "test", help="main and interaction statistics for a dataset"
    )
    _add_input_args(sub)
    sub.add_argument("--top", type=int, help="also list the top K effects")
    _add_output_args(sub)
    sub.set_defaults(run=_cmd_test)

    sub = commands.add_parser("fdr", help="permutation FDR estimate")
    _add_input_args(sub)
    sub.add_argument("--permutations", type=int, default=100)
    sub.add_argument("--seed", type=int, default=1)
    sub.add_argument(
        "--grid",
        default="auto",
        help="'auto' (observed statistics) or comma-separated penalty values",
    )
    _add_output_args(sub, threads=True)
    sub.set_defaults(run=_cmd_fdr)

    sub = commands.add_parser("simulate", help="planted-truth experiments")
    sub.add_argument(
        "--scenario",
        default="hierarchical",
        choices=["hierarchical", "anti-hierarchical", "no-main-effects"],
    )
    sub.add_argument("--experiment", default="fdp", choices=["fdp", "power"])
    sub.add_argument("--n", type=int, default=200)
    sub.add_argument("--p", type=int, default=50)
    sub.add_argument("--n-main", type=int, default=5)
    sub.add_argument("--per-main", type=int, default=9)
    sub.add_argument("--delta", type=float, default=1.5, help="main effect size")
    sub.add_argument("--rho", type=float, default=0.5, help="interaction strength")
    sub.add_argument("--reps", type=int, default=10)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--max-rank", type=int, default=45)
    sub.add_argument(
        "--methods", default="cht,all-pairs,screen-strong,screen-weak"
    )
    sub.add_argument("--n-grid", type=_int_list, default=None)
    sub.add_argument("--delta-grid", type=_float_list, default=None)
    sub.add_argument("--fdp-budget", type=float, default=0.2)
    _add_output_args(sub, threads=True)
    sub.set_defaults(run=_cmd_simulate)

    sub = commands.add_parser("path", help="one row's solution path")
    _add_input_args(sub)
    sub.add_argument("--feature", required=True, help="feature name or 1-based index")
    sub.add_argument("--points", type=int, default=200)
    sub.add_argument("--lambda-max", type=float, default=None)
    sub.add_argument("--lambda-min", type=float, default=None)
    _add_output_args(sub)
    sub.set_defaults(run=_cmd_path)

    sub = commands.add_parser("stability", help="bootstrap or split-half stability")
    _add_input_args(sub)
    sub.add_argument(
        "--method",
        default="cht",
        choices=["cht", "all-pairs", "screen-strong", "screen-weak"],
    )
    sub.add_argument("--topk", type=int, default=10)
    sub.add_argument("--bootstrap", type=int, default=None, help="resample count")
    sub.add_argument("--splits", type=int, default=None, help="split count")
    sub.add_argument("--seed", type=int, default=0)
    _add_output_args(sub, threads=True)
    sub.set_defaults(run=_cmd_stability)

    sub = commands.add_parser(
        "shrinkage-curve", help="statistic of one interaction as its contrast grows"
    )
    sub.add_argument("--w", default="0,0.5,1,1.5", help="comma-separated main contrasts")
    sub.add_argument("--mode", default="normal", choices=["normal", "one-large"])
    sub.add_argument("--count", type=int, default=50, help="interactions in the row")
    sub.add_argument("--z-max", type=float, default=4.0)
    sub.add_argument("--z-points", type=int, default=200)
    sub.add_argument("--seed", type=int, default=1)
    _add_output_args(sub)
    sub.set_defaults(run=_cmd_shrinkage_curve)

    sub = commands.add_parser(
        "oracle-check", help="closed form vs brute force on random rows"
    )
    sub.add_argument("--instances", type=int, default=1000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--grid", type=float, default=1e-3, help="penalty grid resolution")
    sub.add_argument("--output", help="write the report here instead of stdout")
    sub.set_defaults(run=_cmd_oracle_check, json=True, figures=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except ChtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
