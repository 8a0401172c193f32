import time

import numpy as np
import pytest

from gamap.experiments import DEFAULT_SEED, iris_study, pipeline_synthetic
from gamap.ranking import AttributionVector, normalize

# wall-clock seconds for each session pipeline, keyed by fixture name
PIPELINE_SECONDS: dict[str, float] = {}


@pytest.fixture(scope="session")
def balanced_run():
    start = time.perf_counter()
    run = pipeline_synthetic("balanced", DEFAULT_SEED)
    PIPELINE_SECONDS["balanced"] = time.perf_counter() - start
    return run


@pytest.fixture(scope="session")
def unbalanced_run():
    start = time.perf_counter()
    run = pipeline_synthetic("unbalanced", DEFAULT_SEED)
    PIPELINE_SECONDS["unbalanced"] = time.perf_counter() - start
    return run


@pytest.fixture(scope="session")
def iris_run():
    start = time.perf_counter()
    run = iris_study(DEFAULT_SEED)
    PIPELINE_SECONDS["iris"] = time.perf_counter() - start
    return run


def random_ranked(rng, n_features):
    """One normalized attribution from signed gaussian weights."""
    weights = rng.normal(size=n_features)
    while not np.any(weights):
        weights = rng.normal(size=n_features)
    names = tuple(f"f{i}" for i in range(n_features))
    return normalize(AttributionVector(names, weights))
