"""End-to-end global attribution mapping.

Normalizes a population of local attributions, measures their pairwise
rank distances, clusters them around medoids, and reports one global
explanation per subpopulation: the medoid's normalized weights, how many
samples it speaks for, and exactly which ones. Also renders the
attribution landscape as a DOT graph for external force-directed layout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cluster import (
    DEFAULT_MAX_ITER,
    DEFAULT_RESTARTS,
    ClusteringResult,
    fit_kmedoids_restarts,
    select_k_detailed,
    silhouette,
)
from .errors import EmptyInputError, LengthMismatchError, RowCountMismatchError
from .ranking import (
    AttributionVector,
    DistanceMatrix,
    Metric,
    METRICS,
    RankedAttribution,
    normalize,
    pairwise_distances,
)

GRAPH_COMPLETE_LIMIT = 500
GRAPH_NEIGHBORS = 10


@dataclass(frozen=True)
class GamConfig:
    """Knobs for one mapping run; k=None selects k by silhouette."""

    metric: Metric = "kendall"
    k: int | None = None
    k_range: tuple[int, int] = (2, 8)
    seed: int = 0
    restarts: int = DEFAULT_RESTARTS
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        if self.k is not None and self.k < 1:
            raise ValueError("fixed k must be at least 1")
        lo, hi = self.k_range
        if self.k is None and (lo < 2 or lo > hi):
            raise ValueError(f"auto k needs 2 <= k_min <= k_max, got {self.k_range}")
        if self.restarts < 1 or self.max_iter < 1:
            raise ValueError("restarts and max_iter must be at least 1")

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "k": self.k,
            "k_range": None if self.k is not None else list(self.k_range),
            "seed": self.seed,
            "restarts": self.restarts,
            "max_iter": self.max_iter,
        }


@dataclass(frozen=True)
class ClusterExplanation:
    """One subpopulation: its medoid attribution and its members."""

    medoid_attribution: RankedAttribution
    medoid_raw_weights: tuple[float, ...]
    medoid_sample_index: int
    size: int
    member_sample_indices: tuple[int, ...]
    explanatory_power: float


@dataclass(frozen=True)
class GlobalAttributionMap:
    feature_names: tuple[str, ...]
    clusters: tuple[ClusterExplanation, ...]
    silhouette_mean: float
    config: GamConfig
    k: int
    clustering: ClusteringResult

    @property
    def n(self) -> int:
        return sum(c.size for c in self.clusters)

    def to_dict(self) -> dict:
        cfg = self.config.to_dict()
        cfg["k"] = self.k  # effective value after auto-selection
        return {
            "config": cfg,
            "silhouette_mean": self.silhouette_mean,
            "clusters": [
                {
                    "size": c.size,
                    "explanatory_power": c.explanatory_power,
                    "medoid_sample_index": c.medoid_sample_index,
                    "medoid_weights": {
                        name: float(w)
                        for name, w in zip(
                            self.feature_names, c.medoid_attribution.weights
                        )
                    },
                    "medoid_raw_weights": {
                        name: float(w)
                        for name, w in zip(self.feature_names, c.medoid_raw_weights)
                    },
                    "member_sample_indices": list(c.member_sample_indices),
                }
                for c in self.clusters
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"


def _validate_attributions(
    attributions: Sequence[AttributionVector],
) -> tuple[str, ...]:
    if len(attributions) < 2:
        raise EmptyInputError("global mapping needs at least 2 attributions")
    names = attributions[0].feature_names
    for a in attributions:
        if a.feature_names != names:
            raise LengthMismatchError("attributions must share one feature set")
    return names


def fit_gam(
    attributions: Sequence[AttributionVector], config: GamConfig
) -> GlobalAttributionMap:
    """Normalize, measure, cluster, and package the global explanations.

    Clusters come back ordered by descending size (ties by medoid sample
    index) so reports are directly comparable between runs. Clusters that
    end up empty on degenerate inputs are dropped; member lists always
    partition the sample indices.
    """
    names = _validate_attributions(attributions)
    ranked = [normalize(a) for a in attributions]
    d = pairwise_distances(ranked, config.metric)
    if config.k is None:
        lo, hi = config.k_range
        hi = min(hi, d.n - 1)
        best_k, scores, runs = select_k_detailed(
            d, lo, hi, config.seed, config.restarts, config.max_iter
        )
        run = runs[best_k]
        sil_mean = scores[best_k]
    else:
        run = fit_kmedoids_restarts(
            d, config.k, config.seed, config.restarts, config.max_iter
        )
        labels_present = np.unique(run.assignment)
        sil_mean = (
            silhouette(d, run.assignment).mean if labels_present.size >= 2 else 0.0
        )
    return _package(attributions, ranked, run, sil_mean, config)


def _package(
    attributions: Sequence[AttributionVector],
    ranked: Sequence[RankedAttribution],
    run: ClusteringResult,
    sil_mean: float,
    config: GamConfig,
) -> GlobalAttributionMap:
    n = len(attributions)
    assignment = np.asarray(run.assignment)
    clusters = []
    for pos, medoid in enumerate(run.medoid_indices):
        members = np.flatnonzero(assignment == pos)
        if members.size == 0:
            continue
        clusters.append(
            ClusterExplanation(
                medoid_attribution=ranked[medoid],
                medoid_raw_weights=tuple(
                    float(w) for w in attributions[medoid].weights
                ),
                medoid_sample_index=int(medoid),
                size=int(members.size),
                member_sample_indices=tuple(int(i) for i in members),
                explanatory_power=float(members.size / n),
            )
        )
    clusters.sort(key=lambda c: (-c.size, c.medoid_sample_index))
    return GlobalAttributionMap(
        feature_names=attributions[0].feature_names,
        clusters=tuple(clusters),
        silhouette_mean=float(sil_mean),
        config=config,
        k=run.k,
        clustering=run,
    )


def subpopulation_summary(
    gam_map: GlobalAttributionMap,
    features: np.ndarray,
    feature_names: Sequence[str] | None = None,
) -> list[dict]:
    """Per-cluster summary statistics of a raw feature table.

    The table must have one row per mapped sample. Returns, per cluster in
    map order, mean/std/min/max of every column over the member rows.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != gam_map.n:
        raise RowCountMismatchError(
            f"feature table has {X.shape} rows; map covers {gam_map.n} samples"
        )
    if feature_names is None:
        if len(gam_map.feature_names) == X.shape[1]:
            feature_names = gam_map.feature_names
        else:
            feature_names = tuple(f"col{i}" for i in range(X.shape[1]))
    elif len(feature_names) != X.shape[1]:
        raise RowCountMismatchError("feature_names must match table columns")
    out = []
    for c in gam_map.clusters:
        rows = X[list(c.member_sample_indices)]
        out.append(
            {
                "size": c.size,
                "medoid_sample_index": c.medoid_sample_index,
                "features": {
                    str(name): {
                        "mean": float(col.mean()),
                        "std": float(col.std()),
                        "min": float(col.min()),
                        "max": float(col.max()),
                    }
                    for name, col in zip(feature_names, rows.T)
                },
            }
        )
    return out


def render_rank_graph(
    ranked: Sequence[RankedAttribution],
    cluster_ids: Sequence[int],
    medoid_ids: Sequence[int],
    metric: Metric,
    distances: DistanceMatrix | None = None,
) -> str:
    """DOT document of the attribution landscape.

    One node per attribution carrying its cluster id (medoids flagged);
    edge weights are pairwise rank distances. Small sets get the complete
    graph; beyond GRAPH_COMPLETE_LIMIT nodes each node keeps directed
    edges to its GRAPH_NEIGHBORS nearest neighbors.
    """
    n = len(ranked)
    if n == 0:
        raise EmptyInputError("nothing to export")
    labels = list(cluster_ids)
    if len(labels) != n:
        raise LengthMismatchError("cluster ids must cover every attribution")
    medoids = set(int(i) for i in medoid_ids)
    if distances is None and n > 1:
        distances = pairwise_distances(ranked, metric)

    def node_line(i: int) -> str:
        attrs = [f"cluster={labels[i]}"]
        if i in medoids:
            attrs.append("medoid=true")
        return f'  {i} [{", ".join(attrs)}];'

    lines = []
    if n <= GRAPH_COMPLETE_LIMIT:
        lines.append("graph attributions {")
        lines.extend(node_line(i) for i in range(n))
        for i in range(n):
            for j in range(i + 1, n):
                lines.append(f"  {i} -- {j} [weight={float(distances.entries[i, j])!r}];")
    else:
        lines.append("digraph attributions {")
        lines.extend(node_line(i) for i in range(n))
        for i in range(n):
            order = np.argsort(distances.entries[i], kind="stable")
            neighbors = [j for j in order if j != i][:GRAPH_NEIGHBORS]
            for j in neighbors:
                lines.append(f"  {i} -> {j} [weight={float(distances.entries[i, j])!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_rank_graph(
    ranked: Sequence[RankedAttribution],
    gam_map: GlobalAttributionMap,
    metric: Metric,
    distances: DistanceMatrix | None = None,
) -> str:
    """Graph of a fitted map: cluster ids follow the map's cluster order."""
    labels = np.full(len(ranked), -1, dtype=np.int64)
    for cid, cluster in enumerate(gam_map.clusters):
        labels[list(cluster.member_sample_indices)] = cid
    if np.any(labels < 0):
        raise LengthMismatchError("map does not cover every attribution")
    medoids = [c.medoid_sample_index for c in gam_map.clusters]
    return render_rank_graph(ranked, labels.tolist(), medoids, metric, distances)
