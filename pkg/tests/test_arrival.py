"""Distribution construction, truncation, and sampling."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubrelease.arrival import (
    ArrivalDistribution,
    InitialCountDistribution,
    from_pmf,
    poisson_truncated,
    substream,
    zero_truncated_poisson,
)

LAM = 1.0 / 6.0


@pytest.fixture
def rng():
    return np.random.default_rng(seed=42)


class TestPoissonTruncated:
    def test_zero_count_probability_matches_closed_form(self):
        dist = poisson_truncated(LAM)
        # Renormalization shifts mass by less than the 1e-12 tail.
        assert dist.probabilities[0] == pytest.approx(math.exp(-LAM), abs=1e-11)

    def test_mean_close_to_rate(self):
        for lam in (0.0, 1e-4, 0.01, LAM, 0.5, 1.0):
            assert poisson_truncated(lam).mean == pytest.approx(lam, abs=1e-9)

    def test_zero_rate_is_point_mass_at_zero(self):
        dist = poisson_truncated(0.0)
        assert dist.probabilities == (1.0,)
        assert dist.support_max == 0

    def test_support_covers_requested_tail(self):
        from scipy.stats import poisson as sp_poisson

        dist = poisson_truncated(LAM, tail_mass=1e-12)
        assert sp_poisson.sf(dist.support_max, LAM) < 1e-12
        assert sp_poisson.sf(dist.support_max - 1, LAM) >= 1e-12

    @pytest.mark.parametrize("bad", [-0.1, -5.0])
    def test_negative_rate_rejected(self, bad):
        with pytest.raises(ValueError, match="nonnegative"):
            poisson_truncated(bad)

    @pytest.mark.parametrize("bad", [0.0, -1e-9, 1e-3, 1.0])
    def test_tail_mass_bounds_enforced(self, bad):
        with pytest.raises(ValueError, match="tail_mass"):
            poisson_truncated(LAM, tail_mass=bad)


class TestZeroTruncatedPoisson:
    def test_single_vehicle_probability_matches_closed_form(self):
        dist = zero_truncated_poisson(LAM)
        expected = LAM / (math.exp(LAM) - 1.0)
        assert dist.probabilities[1] == pytest.approx(expected, abs=1e-9)

    def test_no_mass_at_zero(self):
        assert zero_truncated_poisson(LAM).probabilities[0] == 0.0

    def test_mean_matches_closed_form(self):
        for lam in (0.05, LAM, 0.8):
            expected = lam / -math.expm1(-lam)
            assert zero_truncated_poisson(lam).mean == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("bad", [0.0, -0.2])
    def test_nonpositive_rate_rejected(self, bad):
        with pytest.raises(ValueError, match="positive"):
            zero_truncated_poisson(bad)

    def test_degenerate_limit_is_single_vehicle(self):
        dist = InitialCountDistribution.degenerate()
        assert dist.probabilities == (0.0, 1.0)
        assert dist.mean == 1.0

    def test_initial_distribution_rejects_mass_at_zero(self):
        with pytest.raises(ValueError, match="zero mass at 0"):
            InitialCountDistribution((0.5, 0.5))


class TestFromPmf:
    def test_dense_layout_and_trimming(self):
        dist = from_pmf([(3, 0.25), (0, 0.75)])
        assert dist.probabilities == (0.75, 0.0, 0.0, 0.25)
        assert dist.support_max == 3

    def test_small_deviation_is_rescaled(self):
        dist = from_pmf([(0, 0.5 + 1e-10), (1, 0.5)])
        assert math.fsum(dist.probabilities) == pytest.approx(1.0, abs=1e-15)

    def test_large_deviation_rejected(self):
        with pytest.raises(ValueError, match="sums to"):
            from_pmf([(0, 0.5), (1, 0.6)])

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            from_pmf([(-1, 1.0)])

    def test_negative_probability_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            from_pmf([(0, 1.2), (1, -0.2)])

    def test_duplicate_count_rejected(self):
        with pytest.raises(ValueError, match="more than once"):
            from_pmf([(2, 0.5), (2, 0.5)])

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            from_pmf([])


class TestValidation:
    def test_sum_tolerance_is_tight(self):
        with pytest.raises(ValueError, match="sums to"):
            ArrivalDistribution((0.5, 0.5 + 1e-9))

    def test_probability_outside_unit_interval_rejected(self):
        with pytest.raises(ValueError, match="outside"):
            ArrivalDistribution((1.5, -0.5))

    def test_trailing_zeros_trimmed(self):
        dist = ArrivalDistribution((0.5, 0.5, 0.0, 0.0))
        assert dist.support_max == 1


class TestSampling:
    def test_bitwise_reproducible_under_fixed_seed(self):
        dist = poisson_truncated(LAM)
        a = dist.sample_many(substream(7, 3, 1), 500)
        b = dist.sample_many(substream(7, 3, 1), 500)
        assert np.array_equal(a, b)

    def test_streams_differ_across_sample_index(self):
        dist = poisson_truncated(0.5)
        a = dist.sample_many(substream(7, 3, 1), 500)
        b = dist.sample_many(substream(7, 3, 2), 500)
        assert not np.array_equal(a, b)

    def test_sample_order_matches_vector_draw(self):
        dist = poisson_truncated(0.5)
        singles = [dist.sample(substream(11, 0, i)) for i in range(20)]
        firsts = [int(dist.sample_many(substream(11, 0, i), 3)[0]) for i in range(20)]
        assert singles == firsts

    def test_fair_coin_mean(self, rng):
        dist = from_pmf([(0, 0.5), (1, 0.5)])
        draws = dist.sample_many(rng, 1_000_000)
        assert draws.mean() == pytest.approx(0.5, abs=2e-3)

    def test_draws_stay_on_support(self, rng):
        dist = from_pmf([(1, 0.3), (4, 0.7)])
        draws = dist.sample_many(rng, 10_000)
        assert set(np.unique(draws)) <= {1, 4}

    def test_point_mass_always_draws_it(self, rng):
        dist = from_pmf([(2, 1.0)])
        assert np.all(dist.sample_many(rng, 1000) == 2)

    def test_negative_seed_path_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            substream(3, -1)


@st.composite
def weighted_pmfs(draw):
    size = draw(st.integers(min_value=1, max_value=6))
    counts = draw(
        st.lists(st.integers(0, 24), min_size=size, max_size=size, unique=True)
    )
    weights = draw(st.lists(st.integers(1, 1000), min_size=size, max_size=size))
    total = sum(weights)
    return [(c, w / total) for c, w in zip(counts, weights)]


@given(weighted_pmfs())
@settings(max_examples=200)
def test_from_pmf_always_yields_valid_distribution(pairs):
    dist = from_pmf(pairs)
    assert abs(math.fsum(dist.probabilities) - 1.0) <= 1e-12
    assert all(0.0 <= p <= 1.0 for p in dist.probabilities)
    assert dist.probabilities[dist.support_max] > 0.0
    expected_mean = sum(c * p for c, p in pairs)
    assert dist.mean == pytest.approx(expected_mean, rel=1e-9, abs=1e-12)
