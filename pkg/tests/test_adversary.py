import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cherrypick.adversary import (
    ImprovementSample,
    ReporterStrategy,
    publish_mean,
    select,
    select_indices,
)
from cherrypick.distributions import sample_normal
from cherrypick.exceptions import DomainError


def test_top_k_picks_largest():
    out = select([0.1, -0.5, 2.0, 1.0], 2, ReporterStrategy.top_k())
    np.testing.assert_array_equal(out.values, [2.0, 1.0])


@pytest.mark.parametrize("strategy", [ReporterStrategy.top_k(), ReporterStrategy.unbiased(3)])
def test_full_selection_is_whole_pool(strategy):
    pool = [0.3, -1.2, 0.8, 0.0, 2.2]
    out = select(pool, 5, strategy)
    assert sorted(out.values) == sorted(pool)


def test_top_decile_mean():
    # truncated-normal mean above the 0.1 upper quantile, phi(isf(0.1)) / 0.1 = 1.75498 (mpmath)
    pool = sample_normal(10**5, 0.0, 1.0, seed=4)
    top = select(pool, 10**4, ReporterStrategy.top_k())
    assert abs(publish_mean(top) - 1.7549833) < 0.02


def test_ties_go_to_lower_index():
    idx = select_indices([1.0, 2.0, 2.0, 0.5, 2.0], 2, ReporterStrategy.top_k())
    np.testing.assert_array_equal(idx, [1, 2])


def test_known_sd_carried():
    out = select(ImprovementSample([1.0, 2.0, 3.0], known_sd=2.0), 2, ReporterStrategy.top_k())
    assert out.known_sd == 2.0


@pytest.mark.parametrize("n", [0, 5])
def test_n_publish_range(n):
    with pytest.raises(DomainError):
        select([1.0, 2.0, 3.0, 4.0], n, ReporterStrategy.top_k())


def test_unbiased_requires_seed():
    with pytest.raises(DomainError):
        ReporterStrategy("unbiased")


def test_unbiased_deterministic():
    pool = np.arange(20.0)
    a = select(pool, 7, ReporterStrategy.unbiased(11)).values
    b = select(pool, 7, ReporterStrategy.unbiased(11)).values
    np.testing.assert_array_equal(a, b)


@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=12), st.data())
@settings(max_examples=60, deadline=None)
def test_top_k_maximizes_mean(values, data):
    n = data.draw(st.integers(1, len(values)))
    best = max(np.mean(c) for c in itertools.combinations(values, n))
    got = publish_mean(select(values, n, ReporterStrategy.top_k()))
    assert got >= best - 1e-9 * max(1.0, abs(best))


def test_unbiased_exchangeable():
    trials = 100_000
    counts = np.zeros(6)
    for seed in range(trials):
        counts[select_indices(np.arange(6.0), 3, ReporterStrategy.unbiased(seed))] += 1
    freq = counts / trials
    se = np.sqrt(0.25 / trials)
    assert np.all(np.abs(freq - 0.5) <= 4 * se)


def test_publish_mean_values():
    assert publish_mean(ImprovementSample([1.0])) == 1.0
    assert publish_mean([-2.5, 2.5]) == 0.0
    assert publish_mean([0.1, 0.2, 0.3]) == pytest.approx(0.2, abs=1e-15)
    with pytest.raises(DomainError):
        publish_mean([])


def test_sample_validation():
    with pytest.raises(DomainError):
        ImprovementSample([])
    with pytest.raises(DomainError):
        ImprovementSample([1.0, float("nan")])
    with pytest.raises(DomainError):
        ImprovementSample([1.0], known_sd=0.0)
