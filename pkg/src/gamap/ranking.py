"""Attribution normalization and weighted rank distances.

Local attributions are compared as weighted conjoined rankings: every
feature appears in every attribution, carrying both a rank (1 = most
important) and a normalized nonnegative weight. Two dissimilarities are
provided, a weighted Kendall tau distance (discordant feature pairs,
penalized by the product of their weights in both rankings) and a weighted
squared Spearman rho distance (weighted squared rank displacement), plus
pairwise distance-matrix construction over a whole attribution set.

Two rankings that order all features identically have distance zero under
both measures even when their weights differ, so these are pseudometrics
on weighted rankings, not metrics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import (
    AllZeroAttributionError,
    EmptyInputError,
    LengthMismatchError,
)

Metric = Literal["kendall", "spearman"]

METRICS = ("kendall", "spearman")

# Above this feature count the pairwise-matrix kernel switches from
# enumerating feature pairs to the merge-based per-pair distance.
_FEATURE_PAIR_KERNEL_MAX = 32


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AttributionVector:
    """Raw, signed per-feature importance weights for one prediction."""

    feature_names: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        names = tuple(str(n) for n in self.feature_names)
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1:
            raise LengthMismatchError("weights must be a 1-D sequence")
        if len(names) != w.shape[0]:
            raise LengthMismatchError(
                f"{len(names)} feature names vs {w.shape[0]} weights"
            )
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "weights", _readonly(w.copy()))

    def __len__(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class RankedAttribution:
    """Normalized attribution: weights in [0, 1] summing to 1, ranks 1..n.

    Rank 1 is the largest weight. Equal weights may appear in any rank
    order, so constructing one directly keeps whatever tie order the
    caller chose; `normalize` always breaks ties toward the lower feature
    index.
    """

    weights: np.ndarray
    ranks: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        r = np.asarray(self.ranks, dtype=np.int64)
        if w.ndim != 1 or r.ndim != 1 or w.shape != r.shape:
            raise LengthMismatchError("weights and ranks must be 1-D and equal length")
        n = w.shape[0]
        if np.any(w < 0):
            raise ValueError("normalized weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise ValueError(f"normalized weights must sum to 1, got {w.sum()!r}")
        if not np.array_equal(np.sort(r), np.arange(1, n + 1)):
            raise ValueError("ranks must be a permutation of 1..n")
        # strictly larger weight must hold a strictly better (smaller) rank
        by_rank = w[np.argsort(r)]
        if np.any(np.diff(by_rank) > 0):
            raise ValueError("ranks must be non-increasing in weight")
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "ranks", _readonly(r))

    def __len__(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise rank-distance matrix with a zero diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.float64)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise LengthMismatchError("distance matrix must be square")
        if not np.array_equal(e, e.T):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diag(e) != 0.0):
            raise ValueError("distance matrix diagonal must be zero")
        if np.any(e < 0):
            raise ValueError("distances must be nonnegative")
        object.__setattr__(self, "entries", _readonly(e))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def normalize(attr: AttributionVector) -> RankedAttribution:
    """Turn a signed attribution into normalized weights plus ranks.

    Weights become |w| / sum(|w|), discarding sign: only the magnitude of
    a feature's contribution matters for comparing rankings. Ranks are
    assigned by descending weight; ties go to the lower feature index so
    the result is deterministic.

    Raises AllZeroAttributionError when every weight is zero (there is no
    defensible ranking to invent) and LengthMismatchError for fewer than
    two features.
    """
    if len(attr) < 2:
        raise LengthMismatchError("an attribution needs at least 2 features")
    magnitude = np.abs(attr.weights)
    total = float(magnitude.sum())
    if total <= 0.0:
        raise AllZeroAttributionError("cannot normalize an all-zero attribution")
    weights = magnitude / total
    order = np.argsort(-weights, kind="stable")
    ranks = np.empty(len(attr), dtype=np.int64)
    ranks[order] = np.arange(1, len(attr) + 1)
    return RankedAttribution(weights=weights, ranks=ranks)


def _check_conjoined(a: RankedAttribution, b: RankedAttribution) -> None:
    if len(a) != len(b):
        raise LengthMismatchError(f"feature counts differ: {len(a)} vs {len(b)}")


def kendall_tau_distance(a: RankedAttribution, b: RankedAttribution) -> float:
    """Weighted Kendall tau distance between two conjoined rankings.

    Sums, over every feature pair ordered differently by the two rankings,
    the product of the pair's weights in both rankings. Full pair
    enumeration; see `kendall_tau_distance_fast` for the O(n log n) route.
    """
    _check_conjoined(a, b)
    p = a.weights * b.weights
    da = a.ranks[:, None] - a.ranks[None, :]
    db = b.ranks[:, None] - b.ranks[None, :]
    discordant = (da * db) < 0
    pairweight = p[:, None] * p[None, :]
    return 0.5 * float(np.sum(pairweight, where=discordant))


def _merge_count(keys: np.ndarray, weights: np.ndarray) -> float:
    """Weighted inversion count of `keys`: sum of w[i]*w[j] over i<j with
    keys[i] > keys[j]. Merge sort, O(n log n); keys must be distinct."""
    n = keys.shape[0]
    if n < 2:
        return 0.0
    mid = n // 2
    lk, rk = keys[:mid].copy(), keys[mid:].copy()
    lw, rw = weights[:mid].copy(), weights[mid:].copy()
    total = _merge_count(lk, lw) + _merge_count(rk, rw)
    # suffix sums of left weights: suffix[i] = lw[i] + ... + lw[-1]
    suffix = np.cumsum(lw[::-1])[::-1]
    out_k = np.empty(n, dtype=keys.dtype)
    out_w = np.empty(n, dtype=weights.dtype)
    i = j = pos = 0
    while i < lk.shape[0] and j < rk.shape[0]:
        if lk[i] < rk[j]:
            out_k[pos], out_w[pos] = lk[i], lw[i]
            i += 1
        else:
            # rk[j] jumps ahead of every remaining left element
            total += rw[j] * suffix[i]
            out_k[pos], out_w[pos] = rk[j], rw[j]
            j += 1
        pos += 1
    if i < lk.shape[0]:
        out_k[pos:], out_w[pos:] = lk[i:], lw[i:]
    else:
        out_k[pos:], out_w[pos:] = rk[j:], rw[j:]
    keys[:], weights[:] = out_k, out_w
    return float(total)


def kendall_tau_distance_fast(a: RankedAttribution, b: RankedAttribution) -> float:
    """Merge-based weighted Kendall tau distance.

    Equal to `kendall_tau_distance` up to float summation order: with the
    features sorted by a's ranks, discordant pairs are exactly the
    inversions of b's ranks, so a weighted inversion count suffices.
    """
    _check_conjoined(a, b)
    p = a.weights * b.weights
    order = np.argsort(a.ranks)
    return _merge_count(b.ranks[order].copy(), p[order].copy())


def spearman_rho_sq_distance(a: RankedAttribution, b: RankedAttribution) -> float:
    """Weighted squared Spearman rho distance between conjoined rankings.

    Each feature contributes its squared rank displacement scaled by the
    product of its weights in the two rankings. Cost is dominated by the
    ranking itself, so comparing two attributions stays O(n log n).
    """
    _check_conjoined(a, b)
    displacement = a.ranks - b.ranks
    return float(np.sum(a.weights * b.weights * (displacement * displacement)))


def _pairwise_kendall(W: np.ndarray, R: np.ndarray) -> np.ndarray:
    n, m = W.shape
    if m <= _FEATURE_PAIR_KERNEL_MAX:
        # Enumerate feature pairs once; for pair (k, l) every attribution
        # contributes its weight product and the sign of the rank gap.
        iu_k, iu_l = np.triu_indices(m, 1)
        U = W[:, iu_k] * W[:, iu_l]                    # (n, pairs)
        S = np.sign(R[:, iu_k] - R[:, iu_l])           # (n, pairs), never 0
        D = np.zeros((n, n))
        for col in range(iu_k.shape[0]):
            u = U[:, col]
            opposite = S[:, col][:, None] != S[:, col][None, :]
            D += np.where(opposite, u[:, None] * u[None, :], 0.0)
        return D
    ranked = [RankedAttribution(W[i], R[i]) for i in range(n)]
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = kendall_tau_distance_fast(ranked[i], ranked[j])
    return D


def _pairwise_spearman(W: np.ndarray, R: np.ndarray) -> np.ndarray:
    n, m = W.shape
    D = np.zeros((n, n))
    for i in range(n):
        gap = R[i] - R[i:]
        D[i, i:] = np.sum(W[i] * W[i:] * (gap * gap), axis=1)
    return D


def pairwise_distances(
    attrs: Sequence[RankedAttribution], metric: Metric
) -> DistanceMatrix:
    """Pairwise rank-distance matrix over a set of normalized attributions.

    Only the upper triangle is computed; the lower one is mirrored, so the
    result is exactly symmetric with a zero diagonal.
    """
    if len(attrs) < 2:
        raise EmptyInputError("need at least 2 attributions for a distance matrix")
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}, expected one of {METRICS}")
    m = len(attrs[0])
    for a in attrs:
        if len(a) != m:
            raise LengthMismatchError("attributions differ in feature count")
    W = np.stack([a.weights for a in attrs])
    R = np.stack([a.ranks for a in attrs])
    D = _pairwise_kendall(W, R) if metric == "kendall" else _pairwise_spearman(W, R)
    upper = np.triu(D, 1)
    return DistanceMatrix(entries=upper + upper.T)
