import math

import numpy as np
import pytest
from scipy import integrate, stats

from fpplab.distributions import (
    DistributionSpec,
    custom,
    deterministic,
    expected_min,
    expected_min_split,
    exponential,
    gamma_cdf,
    parse_distribution,
    shifted,
    small_x_params,
    sn_cdf_bounds,
    uniform,
)
from fpplab.errors import (
    LogSingularity,
    OutsideValidityInterval,
    UnsupportedRegime,
    UnverifiableLocalBehavior,
)


class TestFactories:
    def test_exponential_basics(self):
        e = exponential(2.0)
        assert e.kind == "exponential"
        assert e.mean == 0.5
        assert e.a == 2.0
        assert e.cdf(0.0) == 0.0
        assert e.cdf(1.0) == pytest.approx(1 - math.exp(-2.0))
        assert e.quantile(0.0) == 0.0
        # quantile inverts the cdf
        for u in (0.1, 0.5, 0.9):
            assert e.cdf(e.quantile(u)) == pytest.approx(u, abs=1e-12)

    def test_exponential_small_x_window(self):
        e = exponential(1.0)
        a, C, eps0 = small_x_params(e)
        assert (a, C) == (1.0, 0.5)
        assert 0 < eps0 <= 0.1
        # the advertised inequality holds on a fresh grid
        for x in np.linspace(eps0 / 997, eps0, 997):
            assert abs(e.cdf(x) / x - a) <= C / abs(math.log(x)) + 1e-12

    def test_uniform(self):
        u = uniform(2.0)
        assert u.a == 0.5 and u.C == 0.0
        assert u.mean == 1.0
        assert u.cdf(1.0) == 0.5
        assert u.cdf(3.0) == 1.0
        assert u.quantile(0.25) == 0.5

    def test_deterministic(self):
        d = deterministic(1.5)
        assert d.a == 0.0
        assert d.cdf(1.4) == 0.0 and d.cdf(1.5) == 1.0
        assert d.quantile(0.7) == 1.5
        assert not d.has_positive_finite_a

    def test_shifted(self):
        s = shifted(0.5, exponential(1.0))
        assert s.a == 0.0
        assert s.mean == 1.5
        assert s.cdf(0.5) == 0.0
        assert s.cdf(1.5) == pytest.approx(1 - math.exp(-1.0))
        assert s.quantile(0.5) == pytest.approx(0.5 + math.log(2))

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            exponential(0.0)
        with pytest.raises(ValueError):
            uniform(-1.0)
        with pytest.raises(ValueError):
            deterministic(0.0)
        with pytest.raises(ValueError):
            shifted(0.0, exponential(1.0))


class TestParse:
    @pytest.mark.parametrize("text,kind,mean", [
        ("exponential:1.0", "exponential", 1.0),
        ("exponential:2", "exponential", 0.5),
        ("uniform:0:1", "uniform", 0.5),
        ("deterministic:3.0", "deterministic", 3.0),
        ("shifted:0.5:exponential:1.0", "shifted", 1.5),
    ])
    def test_round_trips(self, text, kind, mean):
        spec = parse_distribution(text)
        assert spec.kind == kind
        assert spec.mean == pytest.approx(mean)

    def test_bad_specs(self):
        for text in ("gaussian:0:1", "uniform:1:2", "exponential:zero", "uniform"):
            with pytest.raises(ValueError):
                parse_distribution(text)


class TestSampling:
    def test_sample_deterministic_in_seed(self):
        e = exponential(1.0)
        assert np.array_equal(e.sample(50, 7), e.sample(50, 7))
        assert not np.array_equal(e.sample(50, 7), e.sample(50, 8))

    def test_exponential_ks(self):
        # 1e5 quantile-transformed draws look exponential to KS at 1%
        e = exponential(1.0)
        xs = e.sample(100_000, 12345)
        _, pval = stats.kstest(xs, "expon")
        assert pval > 0.01

    def test_uniform_ks(self):
        u = uniform(1.0)
        xs = u.sample(100_000, 999)
        _, pval = stats.kstest(xs, "uniform")
        assert pval > 0.01


class TestExpectedMin:
    def test_closed_forms(self):
        assert expected_min(exponential(2.0), 5) == pytest.approx(0.1)
        assert expected_min(uniform(1.0), 9) == pytest.approx(0.1)
        assert expected_min(deterministic(3.0), 100) == 3.0
        assert expected_min(shifted(1.0, exponential(1.0)), 4) == pytest.approx(1.25)

    def test_matches_quadrature(self):
        # closed form vs direct integral of the survival power
        for spec, d in [(exponential(1.0), 7), (uniform(2.0), 4)]:
            val, _ = integrate.quad(lambda t: spec.sf(t) ** d, 0, 50)
            assert expected_min(spec, d) == pytest.approx(val, rel=1e-8)

    def test_d_times_emin_bounded(self):
        # d * E min stays O(1) for laws with a in (0, inf)
        for spec in (exponential(1.0), exponential(3.0), uniform(1.0)):
            for d in (2, 10, 100, 10_000):
                assert d * expected_min(spec, d) <= 2.0 / spec.a

    def test_split_upper_bounds_exact(self):
        for spec in (exponential(1.0), uniform(1.0)):
            for d in (5, 50, 500):
                split = expected_min_split(spec, d)
                assert split["bound"] >= expected_min(spec, d)
                assert split["bound"] <= 10.0 / (spec.a * d)   # still O(1/d)
                assert split["bound"] == pytest.approx(
                    split["linear_part"] + split["middle_part"] + split["tail_part"])

    def test_split_rejects_a_zero(self):
        with pytest.raises(UnsupportedRegime):
            expected_min_split(deterministic(1.0), 10)


class TestPartialSumBounds:
    def test_sandwich_contains_gamma(self):
        # exact Gamma CDF sits inside the sandwich throughout the window
        e = exponential(1.0)
        for n in range(1, 7):
            for x in np.linspace(1e-4, e.eps0, 40):
                lo, up = sn_cdf_bounds(e, n, float(x))
                g = gamma_cdf(n, float(x))
                assert lo <= g <= up

    def test_uniform_c0_collapses(self):
        # C = 0: both sides equal (ax)^n / n!, which is exact for small x
        u = uniform(1.0)
        lo, up = sn_cdf_bounds(u, 3, 0.2)
        assert lo == up == pytest.approx(0.2 ** 3 / 6)

    def test_n1_matches_cdf_bounds(self):
        e = exponential(1.0)
        for x in (0.01, 0.05, 0.1):
            lo, up = sn_cdf_bounds(e, 1, x)
            assert lo <= e.cdf(x) <= up

    def test_monte_carlo_sandwich(self):
        # empirical P(sum of n exponentials <= x) lands inside the sandwich
        rng = np.random.Generator(np.random.PCG64(4242))
        e = exponential(1.0)
        N = 10_000_000
        for n, x in [(1, 0.1), (2, 0.1), (3, 0.08), (4, 0.1)]:
            hits = 0
            for _ in range(10):
                hits += int(np.count_nonzero(rng.standard_gamma(n, N // 10) <= x))
            phat = hits / N
            lo, up = sn_cdf_bounds(e, n, x)
            sigma = math.sqrt(max(phat, 1.0 / N) / N)
            assert lo - 3 * sigma <= phat <= up + 3 * sigma

    def test_domain_errors(self):
        e = exponential(1.0)
        with pytest.raises(OutsideValidityInterval):
            sn_cdf_bounds(e, 2, e.eps0 * 2)
        with pytest.raises(UnsupportedRegime):
            sn_cdf_bounds(deterministic(1.0), 2, 0.1)
        with pytest.raises(ValueError):
            sn_cdf_bounds(e, 0, 0.05)
        assert sn_cdf_bounds(e, 3, 0.0) == (0.0, 0.0)

    def test_log_singularity(self):
        wide = DistributionSpec(
            kind="custom", params=(), a=1.0, C=0.1, eps0=1.0,
            mean=1.0, cdf=lambda x: min(max(x, 0.0), 1.0), quantile=lambda u: u)
        with pytest.raises(LogSingularity):
            sn_cdf_bounds(wide, 2, 1.0)


class TestGammaCdf:
    def test_closed_forms(self):
        assert gamma_cdf(1, 0.3) == pytest.approx(1 - math.exp(-0.3))
        assert gamma_cdf(2, 1.0) == pytest.approx(1 - 2 * math.exp(-1.0))
        assert gamma_cdf(3, 0.0) == 0.0

    def test_matches_quadrature(self):
        for n, x in [(2, 0.5), (4, 1.7), (6, 3.0)]:
            val, _ = integrate.quad(
                lambda t: t ** (n - 1) * math.exp(-t) / math.factorial(n - 1), 0, x)
            assert gamma_cdf(n, x) == pytest.approx(val, rel=1e-10)

    def test_domain(self):
        with pytest.raises(ValueError):
            gamma_cdf(0, 1.0)
        with pytest.raises(ValueError):
            gamma_cdf(2, -0.1)


class TestCustom:
    def test_piecewise_linear(self):
        c = custom([0.0, 1.0, 2.0], [0.0, 0.5, 1.0])
        assert c.cdf(0.5) == pytest.approx(0.25)
        assert c.quantile(0.75) == pytest.approx(1.5)
        assert c.mean == pytest.approx(1.0, abs=1e-2)
        assert c.has_positive_finite_a

    def test_atom_at_left_endpoint(self):
        c = custom([0.0, 1.0], [0.3, 1.0])
        assert c.a == math.inf
        assert not c.has_positive_finite_a

    def test_unverifiable(self):
        # F(x) ~ sqrt(x) near 0: no (a, C) window fits
        xs = np.linspace(0.0, 1.0, 200)
        with pytest.raises(UnverifiableLocalBehavior):
            custom(xs, np.sqrt(xs))
