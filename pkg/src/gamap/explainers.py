"""Local attribution techniques over the dense network.

Three explainers, one output shape: a signed per-feature attribution for
a single prediction.

* integrated gradients: averages input gradients along the straight path
  from a baseline to the input (left Riemann sum) and scales by the input
  minus the baseline.
* deeplift (rescale rule): propagates finite-difference multipliers from
  the target output back to the inputs, so attributions sum exactly to
  the output change between input and baseline. A softmax head is
  explained through its pre-activation logit.
* lime: samples a Gaussian neighborhood around the input, queries the
  model, and fits a distance-weighted ridge surrogate whose coefficients
  are the attribution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ShapeMismatchError, UnsupportedActivationError, ZeroVarianceWarning
from .mlp import (
    MlpModel,
    _activation_grad,
    forward_batch,
    forward_trace,
    input_gradients_batch,
)
from .ranking import AttributionVector

METHODS = ("lime", "integrated_gradients", "deeplift")

RIDGE_PENALTY = 1e-3
_DELTA_EPS = 1e-9


@dataclass(frozen=True)
class ExplainConfig:
    method: str
    baseline: np.ndarray | None = None
    ig_steps: int = 50
    lime_samples: int = 1000
    lime_kernel_width: float | None = None
    seed: int = 0
    # None means "explain the model's predicted output for each row"
    target_output: int | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.ig_steps < 1:
            raise ValueError("ig_steps must be at least 1")
        if self.lime_samples < 10:
            raise ValueError("lime_samples must be at least 10")
        if self.lime_kernel_width is not None and self.lime_kernel_width <= 0:
            raise ValueError("lime_kernel_width must be positive")
        if self.baseline is not None:
            b = np.asarray(self.baseline, dtype=np.float64)
            if b.ndim != 1:
                raise ShapeMismatchError("baseline must be a 1-D vector")
            b.setflags(write=False)
            object.__setattr__(self, "baseline", b)


@dataclass(frozen=True)
class FeatureStats:
    """Per-feature mean and standard deviation of a reference population."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def from_features(cls, features: np.ndarray) -> "FeatureStats":
        X = np.asarray(features, dtype=np.float64)
        return cls(mean=X.mean(axis=0), std=X.std(axis=0))


def _names(feature_names: Sequence[str] | None, m: int) -> tuple[str, ...]:
    if feature_names is None:
        return tuple(f"f{i}" for i in range(m))
    if len(feature_names) != m:
        raise ShapeMismatchError(f"{len(feature_names)} names for {m} features")
    return tuple(feature_names)


def _check_pair(model: MlpModel, x, baseline) -> tuple[np.ndarray, np.ndarray]:
    xv = np.asarray(x, dtype=np.float64)
    if baseline is None:
        raise ShapeMismatchError("this method needs a baseline vector")
    bv = np.asarray(baseline, dtype=np.float64)
    if xv.shape != bv.shape or xv.ndim != 1 or xv.shape[0] != model.input_width:
        raise ShapeMismatchError(
            f"input {xv.shape} and baseline {bv.shape} must both have "
            f"width {model.input_width}"
        )
    return xv, bv


def integrated_gradients(
    model: MlpModel,
    x,
    baseline,
    steps: int = 50,
    target_output: int = 0,
    feature_names: Sequence[str] | None = None,
) -> AttributionVector:
    """Path-integral attribution, approximated with a left Riemann sum.

    Evaluates the gradient at alpha = k/steps for k = 0..steps-1 along the
    straight line from baseline to input and scales the average by
    (x - baseline). Deterministic; more steps tighten the completeness
    residual.
    """
    xv, bv = _check_pair(model, x, baseline)
    if steps < 1:
        raise ValueError("steps must be at least 1")
    alphas = np.arange(steps, dtype=np.float64) / steps
    points = bv[None, :] + alphas[:, None] * (xv - bv)[None, :]
    grads = input_gradients_batch(model, points, target_output)
    attr = (xv - bv) * grads.mean(axis=0)
    return AttributionVector(_names(feature_names, xv.shape[0]), attr)


_RESCALE_OK = ("relu", "sigmoid", "identity")


def deeplift_rescale(
    model: MlpModel,
    x,
    baseline,
    target_output: int = 0,
    feature_names: Sequence[str] | None = None,
) -> AttributionVector:
    """Rescale-rule attribution against a baseline input.

    Each nonlinearity contributes the exact ratio of its activation change
    to its pre-activation change (falling back to the local derivative
    when the pre-activation barely moves), so the attributions telescope:
    they sum to the target output at the input minus at the baseline. For
    a softmax head the explained quantity is the target logit.
    """
    xv, bv = _check_pair(model, x, baseline)
    pre, _ = forward_trace(model, np.stack([xv, bv]))
    n_layers = len(model.layers)
    target = int(target_output)
    if target < 0 or target >= model.output_width:
        raise ShapeMismatchError(f"target output {target} out of range")
    mult = np.zeros(model.output_width)
    mult[target] = 1.0
    for li in range(n_layers - 1, -1, -1):
        layer = model.layers[li]
        act = layer.activation
        if act == "softmax":
            if li != n_layers - 1:
                raise UnsupportedActivationError("softmax only supported as the head")
            # explain the logit: skip the nonlinearity entirely
        elif act in _RESCALE_OK:
            zx, zb = pre[li][0], pre[li][1]
            dz = zx - zb
            ratio = _activation_grad(zx, act)
            np.divide(
                _activate_delta(zx, zb, act), dz, out=ratio, where=np.abs(dz) > _DELTA_EPS
            )
            mult = mult * ratio
        else:
            raise UnsupportedActivationError(f"no rescale rule for {act!r}")
        mult = mult @ layer.weights
    attr = mult * (xv - bv)
    return AttributionVector(_names(feature_names, xv.shape[0]), attr)


def _activate_delta(zx: np.ndarray, zb: np.ndarray, act: str) -> np.ndarray:
    from .mlp import _activate

    return _activate(zx, act) - _activate(zb, act)


def lime_tabular(
    model: MlpModel,
    x,
    training_stats: FeatureStats,
    config: ExplainConfig,
    feature_names: Sequence[str] | None = None,
) -> AttributionVector:
    """Local ridge surrogate around one input.

    Perturbations are drawn from Normal(x, training std) per feature,
    labeled with the model's target output, and weighted by
    exp(-d^2 / kernel_width^2) on the standardized euclidean distance from
    x. The surrogate's coefficients are the attribution. If the model
    never changes its answer over the neighborhood there is nothing to
    attribute: a zero vector is returned under a ZeroVarianceWarning.
    """
    xv = np.asarray(x, dtype=np.float64)
    if xv.ndim != 1 or xv.shape[0] != model.input_width:
        raise ShapeMismatchError(f"input shape {xv.shape} vs width {model.input_width}")
    m = xv.shape[0]
    std = np.asarray(training_stats.std, dtype=np.float64)
    if std.shape != (m,):
        raise ShapeMismatchError("training stats must cover every feature")
    rng = np.random.default_rng(config.seed)
    samples = rng.normal(loc=xv, scale=std, size=(config.lime_samples, m))

    target = config.target_output
    if target is None:
        out = forward_batch(model, xv[None, :])[0]
        target = 0 if model.output_width == 1 else int(np.argmax(out))
    y = forward_batch(model, samples)[:, target]
    names = _names(feature_names, m)
    if float(np.ptp(y)) <= 1e-12:
        warnings.warn(
            "all perturbation outputs identical; returning zero attribution",
            ZeroVarianceWarning,
            stacklevel=2,
        )
        return AttributionVector(names, np.zeros(m))

    safe_std = np.where(std > 0, std, 1.0)
    dist_sq = np.sum(((samples - xv) / safe_std) ** 2, axis=1)
    kernel = config.lime_kernel_width
    if kernel is None:
        kernel = 0.75 * math.sqrt(m)
    sample_weight = np.exp(-dist_sq / (kernel * kernel))

    total = float(sample_weight.sum())
    x_bar = (sample_weight @ samples) / total
    y_bar = float(sample_weight @ y) / total
    xc = samples - x_bar
    yc = y - y_bar
    xw = xc * sample_weight[:, None]
    gram = xw.T @ xc + RIDGE_PENALTY * np.eye(m)
    coef = np.linalg.solve(gram, xw.T @ yc)
    return AttributionVector(names, coef)


def explain_row(
    model: MlpModel,
    x,
    config: ExplainConfig,
    training_stats: FeatureStats | None = None,
    feature_names: Sequence[str] | None = None,
) -> AttributionVector:
    """Dispatch one row to the configured method."""
    if config.method == "lime":
        if training_stats is None:
            raise ShapeMismatchError("lime needs training feature statistics")
        return lime_tabular(model, x, training_stats, config, feature_names)
    target = config.target_output
    if target is None:
        out = forward_batch(model, np.asarray(x, dtype=np.float64)[None, :])[0]
        target = 0 if model.output_width == 1 else int(np.argmax(out))
    if config.method == "integrated_gradients":
        return integrated_gradients(
            model, x, config.baseline, config.ig_steps, target, feature_names
        )
    return deeplift_rescale(model, x, config.baseline, target, feature_names)


def batch_explain(
    model: MlpModel,
    dataset,
    config: ExplainConfig,
    training_stats: FeatureStats | None = None,
) -> list[AttributionVector]:
    """One attribution per dataset row, in row order.

    Row i runs under seed config.seed + i, so per-row results are
    independent of batch composition and order.
    """
    if hasattr(dataset, "features"):
        rows = np.asarray(dataset.features, dtype=np.float64)
        names = tuple(dataset.feature_names)
    else:
        rows = np.asarray(dataset, dtype=np.float64)
        names = _names(None, rows.shape[1]) if rows.size else ()
    if rows.ndim != 2:
        raise ShapeMismatchError("dataset must be a 2-D row matrix")
    if rows.shape[0] and rows.shape[1] != model.input_width:
        raise ShapeMismatchError(
            f"dataset width {rows.shape[1]} vs model input {model.input_width}"
        )
    if config.method == "lime" and training_stats is None and rows.size:
        training_stats = FeatureStats.from_features(rows)
    out: list[AttributionVector] = []
    for i, row in enumerate(rows):
        row_config = replace(config, seed=config.seed + i)
        out.append(explain_row(model, row, row_config, training_stats, names))
    return out
