"""Command-line surface over every stage of the toolkit.

Subcommands cover the full path from data generation to graph export:

    synth       generate a synthetic dataset CSV
    train       fit a dense network on a dataset CSV
    explain     produce local attributions for a dataset
    normalize   emit normalized weights and ranks for an attribution CSV
    distances   pairwise rank-distance matrix for an attribution CSV
    cluster     k-medoids over a distance matrix
    silhouette  silhouette report for a distance matrix plus assignment
    gam         full global attribution map from an attribution CSV
    select-k    silhouette-vs-k sweep for an attribution CSV
    graph       DOT export of the attribution landscape
    pipeline    one-shot synthetic experiment reproduction

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 internal error. All outputs are written atomically and all randomness
flows from --seed, so identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .cluster import (
    DEFAULT_MAX_ITER,
    DEFAULT_RESTARTS,
    fit_kmedoids_restarts,
    select_k_detailed,
    silhouette,
)
from .datagen import load_csv, synth_group_a, synth_group_b, synth_mixture, write_dataset_csv
from .errors import GamapError
from .experiments import DEFAULT_SEED, SYNTH_VARIANTS, iris_study, pipeline_synthetic
from .explainers import ExplainConfig, FeatureStats, batch_explain
from .formats import (
    read_attribution_csv,
    read_distance_csv,
    read_json,
    read_vector_csv,
    write_attribution_csv,
    write_distance_csv,
    write_json,
)
from .mlp import TrainConfig, accuracy, load_model, save_model, train
from .pipeline import GamConfig, fit_gam, render_rank_graph
from .ranking import (
    AttributionVector,
    DistanceMatrix,
    normalize,
    pairwise_distances,
)


class UsageError(Exception):
    """Bad flags or flag values; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we want code 1
        raise UsageError(message)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise UsageError(message)


def _read_attributions(path):
    names, matrix = read_attribution_csv(path)
    return [AttributionVector(tuple(names), row) for row in matrix], names


def _ranked(path):
    attrs, names = _read_attributions(path)
    return [normalize(a) for a in attrs], attrs, names


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_synth(args) -> int:
    _require(args.n >= 2, "--n must be at least 2")
    if args.variant == "group-a":
        ds = synth_group_a(args.n, args.seed)
    elif args.variant == "group-b":
        ds = synth_group_b(args.n, args.seed)
    else:
        ds = synth_mixture(args.n, args.fraction_a, args.seed)
    write_dataset_csv(ds, args.out, label_column=args.label_column)
    return 0


def _cmd_train(args) -> int:
    ds = load_csv(args.data, label_column=args.label_column, one_hot=args.one_hot)
    loss = {"bce": "binary_cross_entropy", "cce": "categorical_cross_entropy"}[args.loss]
    config = TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        seed=args.seed,
        loss=loss,
    )
    model = train(ds, args.hidden, config, hidden_activation=args.hidden_activation)
    save_model(model, args.out)
    summary = {
        "train_accuracy": accuracy(model, ds.features, ds.labels),
        "samples": ds.n,
        "hidden_layers": args.hidden,
        "loss": loss,
        "epochs": args.epochs,
        "seed": args.seed,
    }
    print(json.dumps(summary))
    return 0


def _cmd_explain(args) -> int:
    model = load_model(args.model)
    ds = load_csv(args.data, label_column=args.label_column, one_hot=args.one_hot)
    method = args.method.replace("-", "_")
    baseline = read_vector_csv(args.baseline) if args.baseline else None
    _require(
        method == "lime" or baseline is not None,
        f"--baseline is required for {args.method}",
    )
    config = ExplainConfig(
        method=method,
        baseline=baseline,
        ig_steps=args.steps,
        lime_samples=args.samples,
        lime_kernel_width=args.kernel_width,
        seed=args.seed,
        target_output=args.target,
    )
    stats_source = ds
    if args.train_data:
        stats_source = load_csv(
            args.train_data, label_column=args.label_column, one_hot=args.one_hot
        )
    stats = FeatureStats.from_features(stats_source.features)
    attrs = batch_explain(model, ds, config, stats)
    write_attribution_csv(args.out, ds.feature_names, [a.weights for a in attrs])
    return 0


def _cmd_normalize(args) -> int:
    ranked, _attrs, names = _ranked(args.attributions)
    write_attribution_csv(args.out_weights, names, [r.weights for r in ranked])
    write_attribution_csv(args.out_ranks, names, [r.ranks for r in ranked], integer=True)
    return 0


def _cmd_distances(args) -> int:
    ranked, _attrs, _names = _ranked(args.attributions)
    d = pairwise_distances(ranked, args.metric)
    write_distance_csv(args.out, d.entries)
    return 0


def _cmd_cluster(args) -> int:
    _require(args.k >= 1, "--k must be at least 1")
    d = DistanceMatrix(read_distance_csv(args.distances))
    run = fit_kmedoids_restarts(d, args.k, args.seed, args.restarts, args.max_iter)
    doc = run.to_dict()
    labels = np.unique(run.assignment)
    doc["silhouette_mean"] = (
        silhouette(d, run.assignment).mean if labels.size >= 2 else 0.0
    )
    write_json(args.out, doc)
    return 0


def _cmd_silhouette(args) -> int:
    d = DistanceMatrix(read_distance_csv(args.distances))
    doc = read_json(args.assignment)
    assignment = doc["assignment"] if isinstance(doc, dict) else doc
    report = silhouette(d, assignment)
    write_json(args.out, {"per_point": list(report.per_point), "mean": report.mean})
    return 0


def _cmd_gam(args) -> int:
    _require(
        (args.k is None) != (args.auto_k is None),
        "exactly one of --k or --auto-k is required",
    )
    if args.k is not None:
        _require(args.k >= 1, "--k must be at least 1")
        config = GamConfig(
            metric=args.metric,
            k=args.k,
            seed=args.seed,
            restarts=args.restarts,
            max_iter=args.max_iter,
        )
    else:
        lo, hi = args.auto_k
        _require(2 <= lo <= hi, "--auto-k MIN MAX needs 2 <= MIN <= MAX")
        config = GamConfig(
            metric=args.metric,
            k=None,
            k_range=(lo, hi),
            seed=args.seed,
            restarts=args.restarts,
            max_iter=args.max_iter,
        )
    attrs, _names = _read_attributions(args.attributions)
    gam_map = fit_gam(attrs, config)
    write_json(args.out, gam_map.to_dict())
    return 0


def _cmd_select_k(args) -> int:
    _require(2 <= args.k_min <= args.k_max, "--k-min/--k-max need 2 <= MIN <= MAX")
    ranked, _attrs, _names = _ranked(args.attributions)
    d = pairwise_distances(ranked, args.metric)
    best_k, scores, _runs = select_k_detailed(
        d, args.k_min, args.k_max, args.seed, args.restarts, args.max_iter
    )
    write_json(
        args.out,
        {
            "selected_k": best_k,
            "metric": args.metric,
            "seed": args.seed,
            "restarts": args.restarts,
            "silhouette_by_k": {str(k): scores[k] for k in sorted(scores)},
        },
    )
    return 0


def _cmd_graph(args) -> int:
    ranked, _attrs, _names = _ranked(args.attributions)
    doc = read_json(args.map)
    labels = np.full(len(ranked), -1, dtype=np.int64)
    medoids = []
    for cid, cluster in enumerate(doc["clusters"]):
        for i in cluster["member_sample_indices"]:
            labels[i] = cid
        medoids.append(int(cluster["medoid_sample_index"]))
    _require(bool(np.all(labels >= 0)), "map does not cover every attribution row")
    dot = render_rank_graph(ranked, labels.tolist(), medoids, args.metric)
    from .formats import atomic_write_text

    atomic_write_text(args.out, dot)
    return 0


def _cmd_pipeline(args) -> int:
    if args.variant == "iris":
        run = iris_study(args.seed)
    else:
        run = pipeline_synthetic(args.variant, args.seed)
    write_json(args.out, run.report)
    if args.out_attributions:
        names = run.attributions[0].feature_names if run.attributions else ()
        write_attribution_csv(
            args.out_attributions, names, [a.weights for a in run.attributions]
        )
    return 0


# ---------------------------------------------------------------------------
# parser construction


def build_parser() -> _Parser:
    parser = _Parser(prog="gamap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gamap {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("synth", _cmd_synth, "generate a synthetic dataset CSV")
    p.add_argument("--variant", choices=("group-a", "group-b", "mixture"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--fraction-a", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--label-column", default="label")
    p.add_argument("--out", required=True)

    p = add("train", _cmd_train, "train a dense network on a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--label-column", default="label")
    p.add_argument("--one-hot", action="store_true")
    p.add_argument("--hidden", type=_int_list, default=[4], help="comma-separated widths")
    p.add_argument("--hidden-activation", choices=("relu", "sigmoid", "identity"), default="relu")
    p.add_argument("--loss", choices=("bce", "cce"), default="bce")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--learning-rate", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)

    p = add("explain", _cmd_explain, "attribute predictions for every dataset row")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label-column", default="label")
    p.add_argument("--one-hot", action="store_true")
    p.add_argument("--method", choices=("lime", "integrated-gradients", "deeplift"), required=True)
    p.add_argument("--baseline", help="CSV file with one row of baseline values")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--kernel-width", type=float, default=None)
    p.add_argument("--target", type=int, default=None, help="output index; default: predicted")
    p.add_argument("--train-data", help="dataset CSV for perturbation statistics")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)

    p = add("normalize", _cmd_normalize, "normalized weights and ranks for attributions")
    p.add_argument("--attributions", required=True)
    p.add_argument("--out-weights", required=True)
    p.add_argument("--out-ranks", required=True)

    p = add("distances", _cmd_distances, "pairwise rank-distance matrix CSV")
    p.add_argument("--attributions", required=True)
    p.add_argument("--metric", choices=("kendall", "spearman"), default="kendall")
    p.add_argument("--out", required=True)

    p = add("cluster", _cmd_cluster, "k-medoids over a distance matrix CSV")
    p.add_argument("--distances", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--out", required=True)

    p = add("silhouette", _cmd_silhouette, "silhouette for a distance matrix + assignment")
    p.add_argument("--distances", required=True)
    p.add_argument("--assignment", required=True, help="JSON array or clustering JSON")
    p.add_argument("--out", required=True)

    p = add("gam", _cmd_gam, "global attribution map from an attribution CSV")
    p.add_argument("--attributions", required=True)
    p.add_argument("--metric", choices=("kendall", "spearman"), default="kendall")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--auto-k", type=int, nargs=2, metavar=("MIN", "MAX"), default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--out", required=True)

    p = add("select-k", _cmd_select_k, "silhouette-vs-k table for an attribution CSV")
    p.add_argument("--attributions", required=True)
    p.add_argument("--metric", choices=("kendall", "spearman"), default="kendall")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--out", required=True)

    p = add("graph", _cmd_graph, "DOT graph of the attribution landscape")
    p.add_argument("--attributions", required=True)
    p.add_argument("--map", required=True, help="map JSON produced by the gam subcommand")
    p.add_argument("--metric", choices=("kendall", "spearman"), default="kendall")
    p.add_argument("--out", required=True)

    p = add("pipeline", _cmd_pipeline, "one-shot experiment reproduction")
    p.add_argument("--variant", choices=(*SYNTH_VARIANTS, "iris"), required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.add_argument("--out-attributions", help="also write the local attributions CSV")

    return parser


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}") from exc


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except GamapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
