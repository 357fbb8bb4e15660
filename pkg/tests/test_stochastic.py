import numpy as np
import pytest
from scipy import stats as sps

from polycanon.stochastic import (
    ConfigError,
    Constant,
    Exponential,
    Gaussian,
    InhomogeneousPoisson,
    Uniform,
    WrongVariantError,
    derive_rng,
    dist_from_config,
    dist_to_config,
    make_rng,
    sample,
    sample_ioi_stream,
    sample_many,
)


def test_constant_always_returns_value():
    rng = make_rng(0)
    assert all(sample(Constant(800), rng) == 800 for _ in range(10))


def test_uniform_bounds_and_mean():
    rng = make_rng(1)
    draws = sample_many(Uniform(100, 1000), 100_000, rng)
    assert draws.min() >= 100 and draws.max() <= 1000
    assert abs(draws.mean() - 550) < 10


def test_exponential_mean():
    rng = make_rng(2)
    draws = sample_many(Exponential(40), 100_000, rng)
    assert abs(draws.mean() - 0.025) < 0.001


def test_inhomogeneous_rejects_scalar_sampling():
    with pytest.raises(WrongVariantError):
        sample(InhomogeneousPoisson(lambda t: 1.0, 2.0), make_rng(0))


def test_constant_stream_grid():
    onsets = sample_ioi_stream(Constant(0.5), 2.0, make_rng(0))
    assert np.allclose(onsets, [0.0, 0.5, 1.0, 1.5])


def test_exponential_stream_count():
    onsets = sample_ioi_stream(Exponential(120.6), 8.0, make_rng(3))
    expected = 120.6 * 8
    assert abs(len(onsets) - expected) < 3 * np.sqrt(expected)


def test_inhomogeneous_stream_count():
    rate = lambda t: 5 + 40 * abs(t - 15) / 15
    onsets = sample_ioi_stream(InhomogeneousPoisson(rate, 45.0), 30.0, make_rng(4))
    assert abs(len(onsets) - 750) < 3.5 * np.sqrt(750)
    assert np.all(np.diff(onsets) > 0)


def test_nonpositive_duration_rejected():
    with pytest.raises(ValueError):
        sample_ioi_stream(Constant(0.1), 0.0, make_rng(0))


def test_zero_constant_ioi_rejected():
    with pytest.raises(ConfigError):
        sample_ioi_stream(Constant(0.0), 1.0, make_rng(0))


@pytest.mark.parametrize("dist,cdf", [
    (Uniform(2.0, 5.0), lambda x: np.clip((x - 2.0) / 3.0, 0, 1)),
    (Gaussian(1.0, 2.0), lambda x: sps.norm.cdf(x, 1.0, 2.0)),
    (Exponential(3.0), lambda x: sps.expon.cdf(x, scale=1 / 3.0)),
])
def test_empirical_cdf_matches_analytic(dist, cdf):
    draws = np.sort(sample_many(dist, 100_000, make_rng(5)))
    n = len(draws)
    d = np.max(np.abs(np.arange(1, n + 1) / n - cdf(draws)))
    assert d < 0.01


def test_thinning_matches_homogeneous_law():
    lam = 25.0
    rng = make_rng(6)
    onsets = sample_ioi_stream(InhomogeneousPoisson(lambda t: lam, lam), 500.0, rng)
    iois = np.diff(onsets)
    ref = sample_many(Exponential(lam), 10_000, rng)
    d = sps.ks_2samp(iois[:10_000], ref).statistic
    assert d < 0.02


def test_seed_reproducibility():
    a = sample_many(Gaussian(0, 1), 100, make_rng(7))
    b = sample_many(Gaussian(0, 1), 100, make_rng(7))
    assert np.array_equal(a, b)


def test_derived_streams_are_independent():
    a = sample_many(Uniform(0, 1), 50, derive_rng(7, "one"))
    b = sample_many(Uniform(0, 1), 50, derive_rng(7, "two"))
    assert not np.array_equal(a, b)
    assert np.array_equal(a, sample_many(Uniform(0, 1), 50, derive_rng(7, "one")))


def test_invariants_validated():
    with pytest.raises(ConfigError):
        Uniform(5, 1)
    with pytest.raises(ConfigError):
        Gaussian(0, -1)
    with pytest.raises(ConfigError):
        Exponential(0)


def test_config_round_trip():
    for dist in (Constant(3.0), Uniform(1, 2), Gaussian(0, 1), Exponential(40.0)):
        assert dist_from_config(dist_to_config(dist)) == dist
    assert dist_from_config({"type": "exponential", "rate": 40.0}) == Exponential(40.0)
    with pytest.raises(ConfigError):
        dist_from_config({"type": "cauchy"})
