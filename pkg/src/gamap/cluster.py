"""K-medoids over a precomputed rank-distance matrix.

Clustering never touches raw attributions: it only reads the pairwise
distance matrix, so any rank distance (or any other dissimilarity) plugs
in. Alternates nearest-medoid assignment with per-cluster medoid updates
until the assignment stops changing. Includes silhouette scoring and
silhouette-based selection of the cluster count.

Every tie in the module resolves to the lowest index, which makes runs
reproducible across platforms for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EmptyClusterError,
    InvalidMedoidIndexError,
    KTooLargeError,
    KZeroError,
    SingleClusterError,
)
from .ranking import DistanceMatrix

DEFAULT_MAX_ITER = 100
DEFAULT_RESTARTS = 10


@dataclass(frozen=True)
class ClusteringResult:
    """Converged k-medoids state plus the per-iteration cost trace."""

    medoid_indices: tuple[int, ...]
    assignment: tuple[int, ...]
    cost: float
    iterations_run: int
    seed: int
    cost_history: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.medoid_indices)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "medoid_indices": list(self.medoid_indices),
            "assignment": list(self.assignment),
            "cost": self.cost,
        }


@dataclass(frozen=True)
class SilhouetteReport:
    """Per-point silhouette values in [-1, 1] and their arithmetic mean."""

    per_point: tuple[float, ...]
    mean: float


def _check_k(n: int, k: int) -> None:
    if k < 1:
        raise KZeroError(f"k must be at least 1, got {k}")
    if k > n:
        raise KTooLargeError(f"k={k} exceeds the {n} available attributions")


def derive_seed(seed: int, *branch: int) -> int:
    """Stable child seed for (seed, branch): restarts, k sweeps, stages."""
    ss = np.random.SeedSequence([int(seed), *[int(b) for b in branch]])
    return int(ss.generate_state(1, np.uint64)[0])


def init_medoids(n: int, k: int, seed: int) -> list[int]:
    """Draw k distinct indices uniformly without replacement, seeded."""
    _check_k(n, k)
    rng = np.random.default_rng(seed)
    return [int(i) for i in rng.choice(n, size=k, replace=False)]


def assign_clusters(d: DistanceMatrix, medoids: Sequence[int]) -> np.ndarray:
    """Assign every point to its nearest medoid.

    Returns medoid *positions* (indices into the medoid list), with
    distance ties going to the earliest position.
    """
    med = np.asarray(medoids, dtype=np.int64)
    if med.ndim != 1 or med.size == 0:
        raise InvalidMedoidIndexError("medoid list must be a nonempty 1-D sequence")
    if np.any(med < 0) or np.any(med >= d.n):
        raise InvalidMedoidIndexError(f"medoid indices out of range 0..{d.n - 1}")
    if np.unique(med).size != med.size:
        raise InvalidMedoidIndexError("medoid indices must be distinct")
    return np.argmin(d.entries[:, med], axis=1)


def update_medoid(d: DistanceMatrix, members: Sequence[int]) -> int:
    """Member minimizing the summed distance to all members (tie: lowest)."""
    idx = np.asarray(members, dtype=np.int64)
    if idx.size == 0:
        raise EmptyClusterError("cannot pick a medoid for an empty cluster")
    sums = d.entries[np.ix_(idx, idx)].sum(axis=0)
    best = idx[sums == sums.min()]
    return int(best.min())


def _farthest_non_medoid(d: DistanceMatrix, medoids: Sequence[int], anchor: int) -> int:
    """Point farthest from `anchor` that is not already a medoid."""
    taken = set(int(m) for m in medoids)
    for cand in np.argsort(-d.entries[anchor], kind="stable"):
        if int(cand) not in taken:
            return int(cand)
    return int(anchor)


def fit_kmedoids(
    d: DistanceMatrix, k: int, seed: int, max_iter: int = DEFAULT_MAX_ITER
) -> ClusteringResult:
    """Run k-medoids to convergence from one seeded initialization.

    Convergence means two consecutive iterations produced identical
    assignments. A cluster left empty by an assignment round gets its
    medoid reseeded to the point farthest from it, which keeps k clusters
    alive whenever the matrix allows it.
    """
    n = d.n
    _check_k(n, k)
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    medoids = init_medoids(n, k, seed)
    rows = np.arange(n)
    prev: np.ndarray | None = None
    history: list[float] = []
    assignment = np.zeros(n, dtype=np.int64)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        assignment = assign_clusters(d, medoids)
        counts = np.bincount(assignment, minlength=k)
        if np.any(counts == 0):
            for pos in np.flatnonzero(counts == 0):
                medoids[pos] = _farthest_non_medoid(d, medoids, medoids[pos])
            assignment = assign_clusters(d, medoids)
        cost = float(d.entries[rows, np.asarray(medoids)[assignment]].sum())
        history.append(cost)
        if prev is not None and np.array_equal(assignment, prev):
            break
        stale: list[int] = []
        for pos in range(k):
            members = np.flatnonzero(assignment == pos)
            if members.size:
                medoids[pos] = update_medoid(d, members)
            else:
                stale.append(pos)
        # a cluster that stayed empty keeps its old medoid, which another
        # cluster's update may now have claimed; move the stale one away
        for pos in stale:
            if medoids.count(medoids[pos]) > 1:
                medoids[pos] = _farthest_non_medoid(d, medoids, medoids[pos])
        prev = assignment
    return ClusteringResult(
        medoid_indices=tuple(int(m) for m in medoids),
        assignment=tuple(int(a) for a in assignment),
        cost=history[-1],
        iterations_run=iterations,
        seed=int(seed),
        cost_history=tuple(history),
    )


def fit_kmedoids_restarts(
    d: DistanceMatrix,
    k: int,
    seed: int,
    restarts: int = DEFAULT_RESTARTS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ClusteringResult:
    """Best (lowest-cost) of several restarts with derived seeds.

    K-medoids is sensitive to its random initialization; restarting and
    keeping the cheapest converged run is the standard remedy. Ties keep
    the earliest restart.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    best: ClusteringResult | None = None
    for r in range(restarts):
        run = fit_kmedoids(d, k, derive_seed(seed, k, r), max_iter)
        if best is None or run.cost < best.cost:
            best = run
    assert best is not None
    return best


def silhouette(d: DistanceMatrix, assignment: Sequence[int]) -> SilhouetteReport:
    """Silhouette of a clustering under the given distance matrix.

    s(i) = (b - a) / max(a, b) with a the mean distance to i's own cluster
    (excluding i) and b the smallest mean distance to another cluster.
    Points in singleton clusters score 0, as does the degenerate a = b = 0
    case.
    """
    labels = np.asarray(assignment, dtype=np.int64)
    n = d.n
    if labels.shape != (n,):
        raise SingleClusterError(
            f"assignment length {labels.shape} does not match {n} points"
        )
    present = np.unique(labels)
    if present.size < 2:
        raise SingleClusterError("silhouette needs at least two clusters")
    sums = np.stack(
        [d.entries[:, labels == c].sum(axis=1) for c in present], axis=1
    )
    counts = np.array([(labels == c).sum() for c in present])
    scores = np.zeros(n)
    col_of = {int(c): i for i, c in enumerate(present)}
    for i in range(n):
        own = col_of[int(labels[i])]
        if counts[own] == 1:
            continue
        a = sums[i, own] / (counts[own] - 1)
        others = [sums[i, c] / counts[c] for c in range(present.size) if c != own]
        b = min(others)
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return SilhouetteReport(
        per_point=tuple(float(s) for s in scores), mean=float(scores.mean())
    )


def select_k_detailed(
    d: DistanceMatrix,
    k_min: int,
    k_max: int,
    seed: int,
    restarts: int = DEFAULT_RESTARTS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[int, dict[int, float], dict[int, ClusteringResult]]:
    """Silhouette-vs-k sweep keeping the winning run per k.

    Each k is fit `restarts` times with derived seeds; the cheapest run
    represents that k and is scored by mean silhouette. Returns the best
    k (ties to the smaller k), the full score table and the runs.
    """
    if k_min < 2:
        raise KZeroError(f"k_min must be at least 2, got {k_min}")
    if k_min > k_max:
        raise KTooLargeError(f"k_min {k_min} exceeds k_max {k_max}")
    if k_max > d.n - 1:
        raise KTooLargeError(f"k_max {k_max} exceeds n-1 = {d.n - 1}")
    scores: dict[int, float] = {}
    runs: dict[int, ClusteringResult] = {}
    for k in range(k_min, k_max + 1):
        run = fit_kmedoids_restarts(d, k, seed, restarts, max_iter)
        runs[k] = run
        scores[k] = silhouette(d, run.assignment).mean
    best_k = k_min
    for k in range(k_min, k_max + 1):
        if scores[k] > scores[best_k]:
            best_k = k
    return best_k, scores, runs


def select_k(
    d: DistanceMatrix,
    k_min: int,
    k_max: int,
    seed: int,
    restarts: int = DEFAULT_RESTARTS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[int, dict[int, float]]:
    """Pick the cluster count with the best mean silhouette."""
    best_k, scores, _ = select_k_detailed(d, k_min, k_max, seed, restarts, max_iter)
    return best_k, scores
