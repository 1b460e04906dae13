import math

import numpy as np
import pytest

from ksat_cavity import ModelParams, make_population, rng_stream, rs_eval

LOG2 = math.log(2.0)


def zero_population_cavity_expectation(alpha, beta, r_trunc=80):
    """Semi-closed form of the cavity term for p=2 on the all-zeros law.

    With every z = 0 the clause term collapses to c = log((1+e^{-beta})/2)
    whenever the clause's last sign matches eps, and 0 otherwise, so the
    inner value is logaddexp(c*m, c*(r-m)) - log 2 with m ~ Binomial(r, 1/2)
    and r ~ Poisson(2*alpha).  Summing the series gives the expectation
    without any Monte Carlo.
    """
    c = math.log((1.0 + math.exp(-beta)) / 2.0)
    lam = 2.0 * alpha
    total = 0.0
    pois = math.exp(-lam)
    for r in range(r_trunc):
        if r > 0:
            pois *= lam / r
        inner = 0.0
        for m in range(r + 1):
            prob = math.comb(r, m) * 0.5**r
            inner += prob * (np.logaddexp(c * m, c * (r - m)) - LOG2)
        total += pois * inner
    return total


class TestDegenerateExactness:
    def test_alpha_zero_total_is_log2(self):
        params = ModelParams(p=3, alpha=0.0, beta=2.0)
        pop = make_population(1000, "uniform", rng=rng_stream(0, 1))
        breakdown = rs_eval(pop, params, 1000, rng_stream(0, 2))
        assert breakdown.cavity_term.value == 0.0
        assert breakdown.correction_term.value == 0.0
        assert breakdown.total.value == LOG2
        assert breakdown.total.std_error == 0.0

    def test_beta_zero_total_is_log2(self):
        params = ModelParams(p=3, alpha=0.7, beta=0.0)
        pop = make_population(1000, "uniform", rng=rng_stream(1, 1))
        breakdown = rs_eval(pop, params, 1000, rng_stream(1, 2))
        assert breakdown.total.value == LOG2
        assert breakdown.total.std_error == 0.0


class TestBreakdownStructure:
    def test_total_identity(self):
        params = ModelParams(p=3, alpha=0.3, beta=1.0)
        pop = make_population(5000, "uniform", rng=rng_stream(2, 1))
        breakdown = rs_eval(pop, params, 10_000, rng_stream(2, 2))
        assert breakdown.total.value == (
            breakdown.log2_term
            + breakdown.cavity_term.value
            - breakdown.correction_term.value
        )

    @pytest.mark.parametrize("alpha,beta", [(0.3, 1.0), (0.05, 2.0), (1.0, 0.5)])
    def test_term_ranges(self, alpha, beta):
        """Cavity term in [-alpha p beta, 0], correction in [-(p-1) alpha beta, 0]."""
        params = ModelParams(p=3, alpha=alpha, beta=beta)
        pop = make_population(5000, "uniform", rng=rng_stream(3, 1))
        breakdown = rs_eval(pop, params, 20_000, rng_stream(3, 2))
        slack = 6.0 * breakdown.cavity_term.std_error
        assert -params.alpha * params.p * beta - slack <= breakdown.cavity_term.value <= 0.0
        assert -(params.p - 1) * alpha * beta <= breakdown.correction_term.value <= 0.0

    def test_minimum_trials_enforced(self):
        params = ModelParams(p=3, alpha=0.3, beta=1.0)
        pop = make_population(100, "zeros")
        with pytest.raises(ValueError):
            rs_eval(pop, params, 50, rng_stream(4, 1))

    def test_determinism(self):
        params = ModelParams(p=2, alpha=0.4, beta=1.0)
        pop = make_population(2000, "uniform", rng=rng_stream(5, 1))
        a = rs_eval(pop, params, 1000, rng_stream(5, 2))
        b = rs_eval(pop, params, 1000, rng_stream(5, 2))
        assert a == b


class TestZeroPopulationOracle:
    @pytest.mark.parametrize("alpha,beta", [(0.3, 1.0), (0.6, 0.5), (0.1, 2.0)])
    def test_cavity_term_matches_series(self, alpha, beta):
        """Monte Carlo cavity term agrees with the exact series."""
        params = ModelParams(p=2, alpha=alpha, beta=beta)
        pop = make_population(1000, "zeros")
        breakdown = rs_eval(pop, params, 200_000, rng_stream(6, 1))
        expected = zero_population_cavity_expectation(alpha, beta)
        tol = 5.0 * breakdown.cavity_term.std_error
        assert breakdown.cavity_term.value == pytest.approx(expected, abs=tol)

    def test_correction_term_is_deterministic(self):
        """On the all-zeros law every correction trial is identical."""
        beta = 1.0
        params = ModelParams(p=2, alpha=0.3, beta=beta)
        pop = make_population(1000, "zeros")
        breakdown = rs_eval(pop, params, 1000, rng_stream(6, 2))
        expected = (params.p - 1) * params.alpha * math.log1p(
            math.expm1(-beta) * 0.25
        )
        assert breakdown.correction_term.value == pytest.approx(expected, rel=1e-14)
        # identical trials: only summation rounding can leak into the sd
        assert breakdown.correction_term.std_error < 1e-15
