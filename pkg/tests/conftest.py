import numpy as np
import pytest

from calwq import (
    FeatureRegime,
    Indicator,
    RegimeKind,
    SynthSpec,
    assemble,
    filter_outliers,
    generate,
    split,
)


@pytest.fixture(scope="session")
def small_pair():
    """A 1000-record synthetic dataset plus its ground truth (seed 7)."""
    spec = SynthSpec(n_stations=40, samples_per_station=25, seed=7)
    return generate(spec)


@pytest.fixture(scope="session")
def small_dataset(small_pair):
    return small_pair[0]


@pytest.fixture(scope="session")
def small_truth(small_pair):
    return small_pair[1]


@pytest.fixture(scope="session")
def clean_records(small_dataset):
    kept, _, _ = filter_outliers(small_dataset.records)
    return kept


@pytest.fixture(scope="session")
def wt_split(clean_records):
    """Train/test designs for water temperature under both regimes."""
    train, test = split(clean_records, 0.8, 7)
    out = {}
    for kind in RegimeKind:
        regime = FeatureRegime(kind, Indicator.WATER_TEMPERATURE)
        out[kind] = (assemble(train, regime), assemble(test, regime))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(0)
