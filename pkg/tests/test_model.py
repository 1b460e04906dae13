import math

import numpy as np
import pytest

from ksat_cavity import (
    Estimate,
    ModelParams,
    rng_stream,
    sample_clause_signs,
    sample_poisson,
    theta_batch,
    theta_eval,
)


class TestModelParams:
    def test_valid(self):
        params = ModelParams(p=2, alpha=0.0, beta=0.0, seed=2**63)
        assert params.p == 2

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"p": 1, "alpha": 1.0, "beta": 1.0},
            {"p": 3, "alpha": -0.1, "beta": 1.0},
            {"p": 3, "alpha": 1.0, "beta": -1.0},
            {"p": 3, "alpha": math.inf, "beta": 1.0},
            {"p": 3, "alpha": 1.0, "beta": math.nan},
            {"p": 3, "alpha": 1.0, "beta": 1.0, "seed": -1},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ModelParams(**kwargs)


class TestEstimate:
    def test_fields(self):
        est = Estimate(1.0, 0.1, 10)
        assert est.to_dict() == {"value": 1.0, "std_error": 0.1, "n_samples": 10}

    def test_invalid(self):
        with pytest.raises(ValueError):
            Estimate(1.0, -0.1, 10)
        with pytest.raises(ValueError):
            Estimate(math.nan, 0.0, 10)
        with pytest.raises(ValueError):
            Estimate(0.0, 0.0, 0)


class TestThetaEval:
    def test_fully_violated_clause_hits_floor(self):
        # every slot matches its sign: the indicator is 1 and theta = -beta
        assert theta_eval([1, 1], [1, 1], 1.0) == -1.0

    def test_one_zero_factor_kills_the_product(self):
        assert theta_eval([1, 1], [-1.0, 0.3], 2.3) == 0.0

    def test_interior_point(self):
        # p=2, beta=log 2, sigma=0: product 1/4, e^{-beta}-1 = -1/2
        assert theta_eval([1, 1], [0.0, 0.0], math.log(2)) == pytest.approx(
            math.log(7 / 8), rel=1e-15
        )

    def test_range_bounds(self):
        """-beta <= theta <= 0 across random inputs."""
        rng = np.random.default_rng(0)
        for p in (2, 3, 5):
            for beta in (0.3, 1.0, 4.0):
                signs = rng.choice([-1.0, 1.0], size=(20_000, p))
                sigma = rng.uniform(-1, 1, size=(20_000, p))
                vals = theta_batch(signs, sigma, beta)
                assert np.all(vals <= 0.0)
                assert np.all(vals >= -beta)

    def test_beta_zero_identically_zero(self):
        rng = np.random.default_rng(1)
        signs = rng.choice([-1.0, 1.0], size=(1000, 3))
        sigma = rng.uniform(-1, 1, size=(1000, 3))
        assert np.all(theta_batch(signs, sigma, 0.0) == 0.0)

    def test_restriction_to_corners_is_two_branch(self):
        """On {-1,1}^p the value is exactly 0 or exactly -beta."""
        rng = np.random.default_rng(2)
        beta = 1.7
        for _ in range(500):
            p = int(rng.integers(2, 5))
            signs = rng.choice([-1.0, 1.0], size=p)
            sigma = rng.choice([-1.0, 1.0], size=p)
            expected = -beta if np.all(signs == sigma) else 0.0
            assert theta_eval(signs, sigma, beta) == expected

    def test_sign_symmetry(self):
        """Flipping all signs of J and sigma leaves every factor unchanged."""
        rng = np.random.default_rng(3)
        signs = rng.choice([-1.0, 1.0], size=(1000, 4))
        sigma = rng.uniform(-1, 1, size=(1000, 4))
        np.testing.assert_array_equal(
            theta_batch(signs, sigma, 0.9), theta_batch(-signs, -sigma, 0.9)
        )

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            theta_eval([1, 1], [1.1, 0.0], 1.0)
        with pytest.raises(ValueError):
            theta_eval([1, 1], [0.0, 0.0], -0.5)
        with pytest.raises(ValueError):
            theta_eval([1, 1, 1], [0.0, 0.0], 1.0)

    def test_rounding_overshoot_is_clamped(self):
        val = theta_eval([1.0, 1.0], [1.0 + 1e-13, 1.0], 2.0)
        assert val == -2.0


class TestSampleClauseSigns:
    def test_shape_and_values(self):
        signs = sample_clause_signs(3, rng_stream(0, 1))
        assert signs.shape == (3,)
        assert set(np.unique(signs)) <= {-1.0, 1.0}

    def test_determinism(self):
        a = sample_clause_signs(5, rng_stream(123, 7, 9))
        b = sample_clause_signs(5, rng_stream(123, 7, 9))
        np.testing.assert_array_equal(a, b)

    def test_empirical_mean(self):
        """Each entry is a centered +-1 coin: mean within 4/sqrt(n)."""
        rng = rng_stream(2024, 2)
        draws = np.array([sample_clause_signs(5, rng) for _ in range(20_000)])
        assert draws.size == 100_000
        assert abs(draws.mean()) < 4.0 / math.sqrt(draws.size)

    def test_p_too_small(self):
        with pytest.raises(ValueError):
            sample_clause_signs(1, rng_stream(0, 1))


class TestSamplePoisson:
    def test_zero_mean_degenerate(self):
        rng = rng_stream(0, 3)
        assert all(sample_poisson(0.0, rng) == 0 for _ in range(100))

    def test_moments(self):
        rng = rng_stream(0, 4)
        n = 100_000
        draws = np.array([sample_poisson(3.0, rng) for _ in range(n)])
        assert abs(draws.mean() - 3.0) < 4.0 * math.sqrt(3.0 / n)
        # sd of the sample variance for Poisson(3) is sqrt((mu4 - var^2)/n) ~ 0.015
        assert abs(draws.var(ddof=1) - 3.0) < 0.08

    def test_domain_errors(self):
        rng = rng_stream(0, 5)
        with pytest.raises(ValueError):
            sample_poisson(-1.0, rng)
        with pytest.raises(ValueError):
            sample_poisson(math.inf, rng)


class TestRngStream:
    def test_label_separation(self):
        a = rng_stream(1, 1).uniform(size=5)
        b = rng_stream(1, 2).uniform(size=5)
        assert not np.array_equal(a, b)

    def test_repeatability(self):
        np.testing.assert_array_equal(
            rng_stream(9, 4, 2).uniform(size=8), rng_stream(9, 4, 2).uniform(size=8)
        )
