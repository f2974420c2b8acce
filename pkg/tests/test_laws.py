"""Distribution laws against independent quadrature/bisection oracles."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest

from lobeq.laws import (
    Exponential,
    LaplaceVolume,
    NormalVolume,
    Pareto,
    PointMass,
    jump_law_from_config,
    law_to_config,
    volume_law_from_config,
)

# independent densities for the quadrature oracle
PDFS = {
    Pareto: lambda law, b: law.shape * law.scale**law.shape * b ** (-law.shape - 1.0),
    Exponential: lambda law, b: law.rate * math.exp(-law.rate * b),
}


def tail_by_quadrature(law, x):
    pdf = PDFS[type(law)]
    lo = max(x, law.support_inf)
    value, err = quad(lambda b: b * pdf(law, b), lo, np.inf,
                      epsabs=1e-15, epsrel=1e-12)
    assert err <= 1e-10 * max(1.0, abs(value))
    return value


def quantile_by_bisection(law, p, lo, hi, tol=1e-13):
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if law.cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


JUMP_LAWS = [Pareto(3.0, 0.005), Pareto(2.2, 0.02), Exponential(50.0)]


class TestJumpLaws:
    def test_pareto_cdf_examples(self):
        law = Pareto(3.0, 0.005)
        assert law.cdf(0.005) == 0.0
        assert law.cdf(0.004) == 0.0
        assert law.cdf(0.01) == pytest.approx(0.875, abs=1e-15)

    @pytest.mark.parametrize("law", JUMP_LAWS, ids=str)
    def test_tail_expectation_matches_quadrature(self, law):
        for x in np.geomspace(law.mean / 20, law.mean * 20, 12):
            expected = tail_by_quadrature(law, x)
            assert law.tail_expectation(x) == pytest.approx(expected, rel=1e-9)
        assert law.tail_expectation(0.0) == pytest.approx(law.mean, rel=1e-12)

    def test_tail_expectation_frozen_values(self):
        law = Pareto(3.0, 0.005)
        assert law.tail_expectation(0.0) == pytest.approx(0.0075, rel=1e-12)
        assert law.tail_expectation(0.01) == pytest.approx(1.875e-3, rel=1e-12)
        assert PointMass(1.0).tail_expectation(2.0) == 0.0
        assert PointMass(1.0).tail_expectation(0.5) == 1.0

    def test_emax_ratio_frozen_values(self):
        law = Pareto(3.0, 0.005)
        assert law.emax_ratio(0.01) == pytest.approx(1.0625, rel=1e-12)
        # far beyond the support the ratio collapses to 1
        assert law.emax_ratio(10.0) == pytest.approx(1.0, abs=1e-9)
        # below the support infimum it is E[B]/x exactly
        assert law.emax_ratio(0.001) == pytest.approx(law.mean / 0.001, rel=1e-12)

    @pytest.mark.parametrize("law", JUMP_LAWS + [PointMass(0.02)], ids=str)
    def test_emax_identity(self, law):
        scale = law.mean
        for x in np.geomspace(scale / 10, scale * 100, 60):
            lhs = law.emax_ratio(x)
            rhs = law.tail_expectation(x) / x + law.cdf(x)
            assert abs(lhs - rhs) <= 1e-12

    def test_emax_identity_at_atom(self):
        # right-continuous cdf makes the identity exact on the atom itself
        law = PointMass(0.02)
        assert law.emax_ratio(0.02) == 1.0
        assert law.emax_ratio(0.01) == 2.0

    @pytest.mark.parametrize("law", JUMP_LAWS, ids=str)
    def test_monotonicity(self, law):
        grid = np.geomspace(law.mean / 50, law.mean * 50, 1000)
        tails = law.tail_expectation(grid)
        emax = law.emax_ratio(grid)
        assert np.all(np.diff(tails) <= 1e-15)
        assert np.all(np.diff(emax) <= 1e-12)
        assert np.all(emax >= 1.0 - 1e-15)

    def test_domain_errors(self):
        law = Pareto(3.0, 0.005)
        with pytest.raises(ValueError):
            law.emax_ratio(0.0)
        with pytest.raises(ValueError):
            law.emax_ratio(-1.0)
        with pytest.raises(ValueError):
            Pareto(1.0, 0.005)
        with pytest.raises(ValueError):
            Pareto(3.0, 0.0)
        with pytest.raises(ValueError):
            Exponential(0.0)
        with pytest.raises(ValueError):
            PointMass(-0.5)


class TestVolumeLaws:
    def test_median_zero(self):
        assert NormalVolume(10.0).cdf(0.0) == pytest.approx(0.5, abs=1e-15)
        assert LaplaceVolume(3.0).cdf(0.0) == pytest.approx(0.5, abs=1e-15)
        assert NormalVolume(10.0).quantile(0.5) == 0.0
        assert LaplaceVolume(3.0).quantile(0.5) == 0.0

    def test_quantile_frozen_values(self):
        # oracle: bisection on the CDF, independent of the closed form
        law = NormalVolume(10.0)
        oracle = quantile_by_bisection(law, 0.9, 0.0, 100.0)
        assert oracle == pytest.approx(12.8155, abs=5e-4)
        assert law.quantile(0.9) == pytest.approx(oracle, rel=1e-9)

        lap = LaplaceVolume(1.0)
        assert lap.quantile(0.75) == pytest.approx(math.log(2.0), rel=1e-12)
        assert lap.quantile(0.75) == pytest.approx(
            quantile_by_bisection(lap, 0.75, 0.0, 50.0), rel=1e-9
        )

    @pytest.mark.parametrize("law,span", [(NormalVolume(10.0), 50.0),
                                          (LaplaceVolume(2.5), 30.0)], ids=str)
    def test_quantile_cdf_roundtrip(self, law, span):
        xs = np.linspace(-span, span, 41)
        back = law.quantile(law.cdf(xs))
        assert np.allclose(back, xs, rtol=1e-9, atol=1e-9)
        ps = np.linspace(1e-6, 1 - 1e-6, 101)
        assert np.allclose(law.cdf(law.quantile(ps)), ps, rtol=1e-12, atol=1e-12)

    def test_quantile_domain(self):
        law = NormalVolume(10.0)
        for p in (0.0, 1.0, -0.1, 1.1):
            with pytest.raises(ValueError):
                law.quantile(p)
        with pytest.raises(ValueError):
            NormalVolume(0.0)
        with pytest.raises(ValueError):
            LaplaceVolume(-1.0)


class TestSampling:
    def test_pointmass_degenerate(self):
        rng = np.random.default_rng(0)
        law = PointMass(0.02)
        assert law.sample(rng) == 0.02
        assert np.all(law.sample(rng, 100) == 0.02)

    def test_deterministic_for_seed(self):
        law = Pareto(3.0, 0.005)
        a = law.sample(np.random.default_rng(123), 1000)
        b = law.sample(np.random.default_rng(123), 1000)
        assert np.array_equal(a, b)

    def test_pareto_mean_within_3_se(self):
        law = Pareto(3.0, 0.005)
        draws = law.sample(np.random.default_rng(7), 10**6)
        se = draws.std(ddof=1) / math.sqrt(len(draws))
        assert abs(draws.mean() - 0.0075) <= 3 * se

    def test_normal_median_near_zero(self):
        draws = NormalVolume(10.0).sample(np.random.default_rng(8), 10**6)
        assert abs(np.median(draws)) <= 0.05

    @pytest.mark.parametrize("law", [Pareto(3.0, 0.005), Exponential(50.0),
                                     NormalVolume(10.0), LaplaceVolume(2.0)], ids=str)
    def test_empirical_cdf_close(self, law):
        draws = law.sample(np.random.default_rng(99), 10**6)
        stat = kstest(draws, lambda x: np.asarray(law.cdf(x))).statistic
        assert stat < 0.005


class TestConfig:
    def test_roundtrip(self):
        for law in (Pareto(3.0, 0.005), Exponential(50.0), PointMass(0.02)):
            assert jump_law_from_config(law_to_config(law)) == law
        for law in (NormalVolume(10.0), LaplaceVolume(2.0)):
            assert volume_law_from_config(law_to_config(law)) == law

    def test_errors(self):
        with pytest.raises(ValueError, match="type"):
            jump_law_from_config({"shape": 3.0})
        with pytest.raises(ValueError, match="unknown jump law"):
            jump_law_from_config({"type": "cauchy"})
        with pytest.raises(ValueError, match="missing"):
            jump_law_from_config({"type": "pareto", "shape": 3.0})
        with pytest.raises(ValueError, match="unknown fields"):
            volume_law_from_config({"type": "normal", "sigma": 1.0, "mu": 3.0})
        with pytest.raises(ValueError, match="unknown volume law"):
            volume_law_from_config({"type": "pareto", "shape": 3.0, "scale": 1.0})
