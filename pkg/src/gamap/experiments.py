"""Bundled end-to-end experiments.

Two reproducible studies used by the acceptance suite and the CLI:

* the synthetic two-feature study: train a small network on a mixture of
  two groups (each group predictable from exactly one feature), explain a
  fresh test set with the LIME surrogate, and map the attributions into
  two subpopulations whose shares and medoid weights mirror the mixture.
* the iris study: train a two-hidden-layer softmax network, explain all
  150 rows against their predicted class, and pick the cluster count by
  silhouette over k in 2..4.

Both standardize features with training-set statistics before training
and explaining; every stage seed is derived from one master seed, so a
report is a pure function of (variant, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cluster import derive_seed, select_k_detailed
from .datagen import Dataset, load_iris, synth_mixture, train_test_split
from .explainers import ExplainConfig, FeatureStats, batch_explain
from .mlp import MlpModel, TrainConfig, accuracy, forward_batch, train
from .pipeline import GamConfig, GlobalAttributionMap, fit_gam
from .ranking import AttributionVector, DistanceMatrix, normalize, pairwise_distances

SYNTH_VARIANTS = ("balanced", "unbalanced")
SYNTH_FRACTION = {"balanced": 0.5, "unbalanced": 0.75}
SYNTH_TRAIN_N = 10_000
SYNTH_TEST_N = 2_000
SYNTH_HIDDEN = (4,)
SYNTH_EPOCHS = 200
SYNTH_LIME_SAMPLES = 1_000

IRIS_HIDDEN = (16, 16)
IRIS_EPOCHS = 200
IRIS_BATCH = 16
IRIS_TEST_FRACTION = 0.25
IRIS_LIME_SAMPLES = 2_000
IRIS_LIME_KERNEL = 1.0
IRIS_K_RANGE = (2, 4)

DEFAULT_SEED = 7


def standardize(train_data: Dataset, *others: Dataset) -> tuple[Dataset, ...]:
    """Center/scale every dataset by the training set's statistics."""
    mu = train_data.features.mean(axis=0)
    sd = train_data.features.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)

    def apply(ds: Dataset) -> Dataset:
        return Dataset(
            features=(ds.features - mu) / sd,
            labels=ds.labels,
            feature_names=ds.feature_names,
            class_names=ds.class_names,
            groups=ds.groups,
        )

    return tuple(apply(ds) for ds in (train_data, *others))


def neutral_baseline(
    model: MlpModel,
    lows: np.ndarray,
    highs: np.ndarray,
    grid_steps: int = 201,
    target: float = 0.5,
    tolerance: float = 0.005,
) -> tuple[np.ndarray, float]:
    """Grid-search a two-feature input whose output is nearly neutral.

    Scans the axis-aligned grid for the point whose first output is
    closest to `target`, and requires it inside `tolerance`.
    """
    if lows.shape != (2,) or highs.shape != (2,):
        raise ValueError("grid search is defined for two-feature models")
    axes = [np.linspace(lows[i], highs[i], grid_steps) for i in range(2)]
    aa, bb = np.meshgrid(axes[0], axes[1], indexing="ij")
    points = np.column_stack([aa.ravel(), bb.ravel()])
    outputs = forward_batch(model, points)[:, 0]
    best = int(np.argmin(np.abs(outputs - target)))
    if abs(float(outputs[best]) - target) > tolerance:
        raise RuntimeError(
            f"no grid point within {tolerance} of {target}; "
            f"closest output {outputs[best]!r}"
        )
    return points[best], float(outputs[best])


@dataclass(frozen=True)
class SyntheticRun:
    variant: str
    seed: int
    model: MlpModel
    train_data: Dataset
    test_data: Dataset
    feature_stats: FeatureStats
    attributions: list[AttributionVector]
    gam: GlobalAttributionMap
    model_accuracy: float
    baseline: np.ndarray
    baseline_output: float
    report: dict


def pipeline_synthetic(
    variant: str,
    seed: int = DEFAULT_SEED,
    *,
    epochs: int = SYNTH_EPOCHS,
    lime_samples: int = SYNTH_LIME_SAMPLES,
    restarts: int = 10,
) -> SyntheticRun:
    """Generate, train, explain and map one synthetic variant end to end."""
    if variant not in SYNTH_VARIANTS:
        raise ValueError(f"variant must be one of {SYNTH_VARIANTS}")
    fraction = SYNTH_FRACTION[variant]
    raw_train = synth_mixture(SYNTH_TRAIN_N, fraction, derive_seed(seed, 10))
    raw_test = synth_mixture(SYNTH_TEST_N, fraction, derive_seed(seed, 11))
    train_data, test_data = standardize(raw_train, raw_test)

    train_config = TrainConfig(
        epochs=epochs,
        batch_size=32,
        learning_rate=0.05,
        seed=derive_seed(seed, 12),
        loss="binary_cross_entropy",
    )
    model = train(train_data, SYNTH_HIDDEN, train_config)
    acc = accuracy(model, test_data.features, test_data.labels)

    stats = FeatureStats.from_features(train_data.features)
    explain_config = ExplainConfig(
        method="lime",
        lime_samples=lime_samples,
        seed=derive_seed(seed, 13),
        target_output=0,
    )
    attributions = batch_explain(model, test_data, explain_config, stats)
    gam = fit_gam(
        attributions,
        GamConfig(metric="kendall", k=2, seed=derive_seed(seed, 14), restarts=restarts),
    )
    baseline, baseline_out = neutral_baseline(
        model,
        train_data.features.min(axis=0),
        train_data.features.max(axis=0),
    )
    report = {
        "experiment": "synthetic",
        "variant": variant,
        "seed": seed,
        "train_samples": train_data.n,
        "test_samples": test_data.n,
        "fraction_group_a": fraction,
        "hidden_layers": list(SYNTH_HIDDEN),
        "epochs": epochs,
        "batch_size": train_config.batch_size,
        "learning_rate": train_config.learning_rate,
        "lime_samples": lime_samples,
        "model_accuracy": acc,
        "neutral_baseline": [float(v) for v in baseline],
        "neutral_baseline_output": baseline_out,
        "subpopulations": [
            {
                "share": c.explanatory_power,
                "size": c.size,
                "medoid_weights": {
                    name: float(w)
                    for name, w in zip(gam.feature_names, c.medoid_attribution.weights)
                },
                "dominant_feature": gam.feature_names[
                    int(np.argmax(c.medoid_attribution.weights))
                ],
            }
            for c in gam.clusters
        ],
        "gam": gam.to_dict(),
    }
    return SyntheticRun(
        variant=variant,
        seed=seed,
        model=model,
        train_data=train_data,
        test_data=test_data,
        feature_stats=stats,
        attributions=attributions,
        gam=gam,
        model_accuracy=acc,
        baseline=baseline,
        baseline_output=baseline_out,
        report=report,
    )


@dataclass(frozen=True)
class IrisRun:
    seed: int
    model: MlpModel
    train_data: Dataset
    test_data: Dataset
    all_data: Dataset
    attributions: list[AttributionVector]
    distances: DistanceMatrix
    silhouette_scores: dict[int, float]
    selected_k: int
    gam: GlobalAttributionMap
    model_accuracy: float
    baseline: np.ndarray
    report: dict


def iris_study(
    seed: int = DEFAULT_SEED,
    *,
    epochs: int = IRIS_EPOCHS,
    lime_samples: int = IRIS_LIME_SAMPLES,
    restarts: int = 10,
) -> IrisRun:
    """Train on iris, explain every row, and map attribution clusters.

    LIME targets each row's predicted class, so rows travel with the class
    the model actually chose for them. Cluster count is selected by mean
    silhouette over k = 2..4 on the weighted Kendall distances.
    """
    full = load_iris()
    raw_train, raw_test = train_test_split(full, IRIS_TEST_FRACTION, derive_seed(seed, 20))
    train_data, test_data, all_data = standardize(raw_train, raw_test, full)

    train_config = TrainConfig(
        epochs=epochs,
        batch_size=IRIS_BATCH,
        learning_rate=0.05,
        seed=derive_seed(seed, 21),
        loss="categorical_cross_entropy",
    )
    model = train(train_data, IRIS_HIDDEN, train_config)
    acc = accuracy(model, test_data.features, test_data.labels)

    stats = FeatureStats.from_features(train_data.features)
    explain_config = ExplainConfig(
        method="lime",
        lime_samples=lime_samples,
        lime_kernel_width=IRIS_LIME_KERNEL,
        seed=derive_seed(seed, 22),
        target_output=None,
    )
    attributions = batch_explain(model, all_data, explain_config, stats)
    ranked = [normalize(a) for a in attributions]
    distances = pairwise_distances(ranked, "kendall")
    selected_k, scores, runs = select_k_detailed(
        distances, *IRIS_K_RANGE, derive_seed(seed, 23), restarts
    )
    gam = fit_gam(
        attributions,
        GamConfig(
            metric="kendall", k=selected_k, seed=derive_seed(seed, 23), restarts=restarts
        ),
    )
    report = {
        "experiment": "iris",
        "seed": seed,
        "train_samples": train_data.n,
        "test_samples": test_data.n,
        "hidden_layers": list(IRIS_HIDDEN),
        "epochs": epochs,
        "lime_samples": lime_samples,
        "lime_kernel_width": IRIS_LIME_KERNEL,
        "model_accuracy": acc,
        "silhouette_by_k": {str(k): scores[k] for k in sorted(scores)},
        "selected_k": selected_k,
        "gam": gam.to_dict(),
    }
    return IrisRun(
        seed=seed,
        model=model,
        train_data=train_data,
        test_data=test_data,
        all_data=all_data,
        attributions=attributions,
        distances=distances,
        silhouette_scores=scores,
        selected_k=selected_k,
        gam=gam,
        model_accuracy=acc,
        baseline=np.zeros(len(full.feature_names)),
        report=report,
    )
