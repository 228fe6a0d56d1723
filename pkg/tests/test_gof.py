import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from mbuw.datasets import DATASET_IDS, builtin
from mbuw.distributions import mbuw_cdf, mbuw_quantile
from mbuw.estimation import UnitData, fit, fit_core
from mbuw.exceptions import DomainError
from mbuw.gof import gof_report, info_criteria, ks_statistic, ks_statistic_upper, ks_test

samples = st.lists(st.floats(1e-6, 1.0 - 1e-6), min_size=1, max_size=60)


class TestKsStatistic:
    def test_single_observation(self):
        assert ks_statistic(UnitData([0.5]), lambda y: y) == pytest.approx(0.5)

    @pytest.mark.parametrize("n", [1, 5, 38, 200])
    def test_exact_quantiles(self, n):
        u = (np.arange(1, n + 1) - 0.5) / n
        data = UnitData(mbuw_quantile(2.0, u))
        assert ks_statistic(data, lambda y: mbuw_cdf(2.0, y)) == pytest.approx(0.5 / n, abs=1e-12)

    @given(samples)
    @settings(max_examples=100, deadline=None)
    def test_bounds_and_scipy(self, values):
        n = len(values)
        d = ks_statistic(UnitData(values), lambda y: y)
        assert 0.5 / n - 1e-15 <= d <= 1.0
        assert d == pytest.approx(stats.kstest(values, "uniform").statistic, abs=1e-14)

    @given(samples)
    @settings(max_examples=50, deadline=None)
    def test_order_independent(self, values):
        assert ks_statistic(UnitData(values), lambda y: y) == ks_statistic(UnitData(values[::-1]), lambda y: y)

    @given(samples)
    @settings(max_examples=50, deadline=None)
    def test_invariant_under_monotone_transform(self, values):
        y = np.asarray(values)
        d1 = ks_statistic(UnitData(y), lambda v: mbuw_cdf(3.0, v))
        # with z = y^2, P(Z <= z) = F(sqrt(z))
        d2 = ks_statistic(UnitData(y**2), lambda z: mbuw_cdf(3.0, np.sqrt(z)))
        assert d1 == pytest.approx(d2, abs=1e-12)

    def test_upper_is_one_sided(self):
        data = builtin("unit_capacity").data
        result = fit("mbur", data)
        cdf = lambda y: mbuw_cdf(result.estimates[0] ** 2, y)  # noqa: E731
        upper = ks_statistic_upper(data, cdf)
        assert upper <= ks_statistic(data, cdf)
        assert upper == pytest.approx(stats.kstest(data.values, cdf, alternative="greater").statistic, abs=1e-14)


class TestKsTest:
    def test_perfect_fit(self):
        u = (np.arange(1, 51) - 0.5) / 50
        _, p, reject = ks_test(UnitData(mbuw_quantile(1.0, u)), lambda y: mbuw_cdf(1.0, y))
        assert p > 0.999 and not reject

    def test_matches_scipy_exact(self):
        data = builtin("pump_failures").data
        d, p, _ = ks_test(data, lambda y: y ** 0.4)
        ref = stats.kstest(data.values, lambda y: y**0.4, method="exact")
        assert d == pytest.approx(ref.statistic, abs=1e-14)
        assert p == pytest.approx(ref.pvalue, abs=1e-10)

    def test_reject_flag_follows_pvalue(self):
        d, p, reject = ks_test(UnitData(np.linspace(0.9, 0.99, 20)), lambda y: y)
        assert reject == (p < 0.05) and reject


class TestInfoCriteria:
    def test_dwellings_beta(self):
        ic = info_criteria(78.6804, 35, 2)
        assert ic.aic == pytest.approx(161.3608, abs=5e-4)
        assert ic.aicc == pytest.approx(161.7358, abs=5e-4)
        assert ic.bic == pytest.approx(164.4715, abs=5e-4)
        assert ic.hqic_paper == pytest.approx(4.3097, abs=5e-4)

    def test_flood_mbur_hqic(self):
        assert info_criteria(6.4617, 20, 1).hqic_paper == pytest.approx(3.456, abs=1e-3)

    def test_zero_likelihood(self):
        assert info_criteria(0.0, 10, 1).aic == 2.0

    def test_standard_hqic(self):
        ic = info_criteria(10.0, 50, 3)
        assert ic.hqic_standard == pytest.approx(20.0 + 6.0 * math.log(math.log(50)), rel=1e-15)

    @given(L=st.floats(0.0, 1e4), n=st.integers(4, 10_000), k=st.integers(1, 2))
    @settings(max_examples=100, deadline=None)
    def test_aicc_exceeds_aic(self, L, n, k):
        ic = info_criteria(L, n, k)
        assert ic.aicc > ic.aic
        # the subtraction loses digits in proportion to the size of aic
        gap = 2 * k * (k + 1) / (n - k - 1)
        assert ic.aicc - ic.aic == pytest.approx(gap, abs=1e-14 * max(1.0, ic.aic))

    @pytest.mark.parametrize("n, k", [(2, 1), (3, 2), (1, 1)])
    def test_domain(self, n, k):
        with pytest.raises(DomainError):
            info_criteria(1.0, n, k)

    def test_unpacks(self):
        aic, aicc, bic, hq_std, hq_table = info_criteria(1.0, 10, 1)
        assert aic == 4.0


class TestReport:
    def test_dwellings_mbur_column(self):
        data = builtin(1).data
        r = gof_report(fit("mbur", data), data)
        assert r.ll_magnitude == pytest.approx(74.2925, abs=0.05)
        assert r.aic == pytest.approx(150.585, abs=0.1)
        assert r.aicc == pytest.approx(150.7062, abs=0.1)
        assert r.bic == pytest.approx(152.1403, abs=0.1)
        assert r.hqic_paper == pytest.approx(4.2950, abs=1e-3)
        assert r.ks_stat == pytest.approx(0.1794, abs=2e-3)
        assert r.ks_pvalue == pytest.approx(0.1860, abs=0.03)
        assert (r.n, r.k) == (35, 1)
        assert r.warnings == ()

    def test_unit_capacity_mbuw_aic(self):
        data = builtin(6).data
        assert gof_report(fit("mbuw", data), data).aic == pytest.approx(19.2158, abs=0.05)

    def test_support_network_beta(self):
        data = builtin(2).data
        r = gof_report(fit("beta", data), data)
        assert r.ks_stat_upper == pytest.approx(0.0974, abs=2e-3)
        assert r.ks_pvalue == pytest.approx(0.9416, abs=0.03)

    def test_flood_mbur_rejects(self):
        data = builtin(4).data
        r = gof_report(fit("mbur", data), data)
        assert r.ks_stat == pytest.approx(0.3202, abs=2e-3)
        assert r.ks_pvalue == pytest.approx(0.0253, abs=0.01)
        assert r.reject_at_05

    def test_uniform_smoke(self):
        data = UnitData(np.random.default_rng(0).random(200))
        r = gof_report(fit("beta", data), data)
        assert r.k == 2
        assert all(math.isfinite(v) for v in (r.aic, r.aicc, r.bic, r.hqic_standard, r.ks_stat, r.ks_pvalue))

    @pytest.mark.parametrize("ds", DATASET_IDS)
    def test_aic_gap_between_mbuw_and_mbur(self, ds):
        data = builtin(ds).data
        w, r = fit("mbuw", data), fit("mbur", data)
        if abs(w.ll_magnitude - r.ll_magnitude) <= 1e-8:
            assert gof_report(w, data).aic - gof_report(r, data).aic == pytest.approx(2.0, abs=1e-6)
        else:
            assert gof_report(w, data).aic - gof_report(r, data).aic == pytest.approx(2.0, abs=0.01)

    def test_warnings(self):
        data = builtin(2).data
        assert any("standard errors unavailable" in w for w in gof_report(fit("mbuw", data), data).warnings)

    def test_core_fit_report(self):
        data = builtin(1).data
        r = gof_report(fit_core(data), data)
        assert r.k == 1
        assert r.aic == pytest.approx(150.585, abs=0.1)
