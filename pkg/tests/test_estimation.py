import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbuw.datasets import DATASET_IDS, builtin
from mbuw.distributions import ModelKind, sample
from mbuw.estimation import (
    Z_95,
    OptimizerConfig,
    UnitData,
    check_unit_data,
    fit,
    fit_core,
    init_params,
    nelder_mead,
    nll,
    numeric_hessian,
)
from mbuw.exceptions import DataError, DomainError

ALL_KINDS = list(ModelKind)


class TestUnitData:
    def test_basic(self):
        d = UnitData([0.2, 0.4])
        assert d.n == len(d) == 2
        assert d == UnitData(np.array([0.2, 0.4]))
        assert hash(d) == hash(UnitData([0.2, 0.4]))

    def test_read_only(self):
        d = UnitData([0.2, 0.4])
        with pytest.raises(ValueError):
            d.values[0] = 0.3

    def test_column_vector_accepted(self):
        assert UnitData(np.array([[0.1], [0.9]])).n == 2

    @pytest.mark.parametrize("bad", [[], [0.0, 0.5], [1.0], [0.5, math.nan], [[0.1, 0.2]], [-0.1]])
    def test_rejects(self, bad):
        with pytest.raises(DataError):
            check_unit_data(bad)


class TestNll:
    def test_mbuw_single_point(self):
        assert nll("mbuw", (1.0, 3.0), UnitData([0.5])) == pytest.approx(-math.log(1.5), rel=1e-14)

    def test_uniform_beta(self):
        assert nll("beta", (1.0, 1.0), builtin("flood").data) == pytest.approx(0.0, abs=1e-12)

    def test_dwellings_mbur(self):
        assert abs(nll("mbur", (2.2834,), builtin(1).data)) == pytest.approx(74.2925, abs=0.05)

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            nll("beta", (-1.0, 1.0), UnitData([0.5]))

    @pytest.mark.parametrize("ds", DATASET_IDS)
    def test_ridge_invariance(self, ds):
        data = builtin(ds).data
        result = fit("mbuw", data)
        alpha, beta = result.estimates
        assert nll("mbuw", (alpha, beta), data) == pytest.approx(nll("mbuw", (alpha**beta, 1.0), data), abs=1e-8)


class TestInitParams:
    def test_symmetric_mean_gives_a_one(self):
        assert init_params("mbuw", UnitData([0.4, 0.6])) == pytest.approx([1.0, 1.0])
        assert init_params("mbur", UnitData([0.4, 0.6])) == pytest.approx([1.0])

    def test_small_mean_gives_large_core(self):
        starts = [init_params("mbuw", UnitData([m, m]))[0] for m in (0.3, 0.1, 0.01, 1e-4)]
        assert all(b > a for a, b in zip(starts, starts[1:]))

    def test_dwellings(self):
        y = builtin(1).data.values
        mean = float(np.mean(y))
        expected = 0.5 * (-5.0 + math.sqrt(1.0 + 24.0 / mean))
        assert init_params("mbuw", builtin(1).data)[0] == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_degenerate_data_still_finite(self, kind):
        start = init_params(kind, UnitData([0.3, 0.3, 0.3]))
        assert np.all(np.isfinite(start)) and np.all(start > 0)

    def test_beta_method_of_moments(self):
        rng = np.random.default_rng(0)
        data = UnitData(rng.beta(2.0, 5.0, 20_000))
        p, q = init_params("beta", data)
        assert p == pytest.approx(2.0, rel=0.05)
        assert q == pytest.approx(5.0, rel=0.05)


class TestNelderMead:
    def test_quadratic_bowl(self):
        res = nelder_mead(lambda x: (x[0] - 3.0) ** 2, [0.0])
        assert res.converged
        assert res.x[0] == pytest.approx(3.0, abs=1e-6)

    def test_flat_ridge(self):
        # the default spread tolerance (1e-10) can stop near f = 1e-11 when the minimum is 0
        cfg = OptimizerConfig(simplex_tolerance=1e-14)
        res = nelder_mead(lambda x: (x[0] * x[1] - 5.0) ** 2, [1.0, 1.0], cfg)
        assert res.fun <= 1e-12
        assert res.x[0] * res.x[1] == pytest.approx(5.0, abs=1e-5)

    def test_rosenbrock(self):
        res = nelder_mead(lambda x: (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2, [-1.2, 1.0])
        assert res.x == pytest.approx([1.0, 1.0], abs=1e-4)

    def test_budget_exhaustion_reports_not_converged(self):
        res = nelder_mead(
            lambda x: (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2,
            [-1.2, 1.0],
            OptimizerConfig(max_iterations=5),
        )
        assert not res.converged
        assert res.iterations <= 5

    def test_nonfinite_start(self):
        with pytest.raises(DomainError):
            nelder_mead(lambda x: math.inf, [0.0])

    def test_nan_treated_as_infinite(self):
        res = nelder_mead(lambda x: math.nan if x[0] < 0 else (x[0] - 1) ** 2, [2.0])
        assert res.x[0] == pytest.approx(1.0, abs=1e-5)

    @given(
        x0=st.lists(st.floats(-5.0, 5.0), min_size=1, max_size=3),
        shift=st.floats(-3.0, 3.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_never_worse_than_start(self, x0, shift):
        def f(x):
            return float(np.sum((x - shift) ** 2) + np.sum(np.sin(3 * x)))

        res = nelder_mead(f, x0)
        assert res.fun <= f(np.asarray(x0))

    @pytest.mark.parametrize(
        "cfg",
        [
            dict(max_iterations=0),
            dict(simplex_tolerance=0.0),
            dict(restarts=-1),
            dict(initial_step=0.0),
        ],
    )
    def test_config_validation(self, cfg):
        with pytest.raises(DomainError):
            OptimizerConfig(**cfg)


class TestHessian:
    @pytest.mark.parametrize("x", [-3.0, 0.0, 0.7, 250.0])
    def test_square(self, x):
        assert numeric_hessian(lambda v: v[0] ** 2, [x])[0, 0] == pytest.approx(2.0, abs=1e-6)

    def test_quadratic_form(self):
        h = numeric_hessian(lambda v: v[0] ** 2 + 3 * v[1] ** 2 + v[0] * v[1], [0.0, 0.0])
        np.testing.assert_allclose(h, [[2.0, 1.0], [1.0, 6.0]], atol=1e-5)
        np.testing.assert_array_equal(h, h.T)

    def test_nonfinite_propagates(self):
        h = numeric_hessian(lambda v: math.inf if v[0] > 1.0 else v[0] ** 2, [1.0])
        assert not np.all(np.isfinite(h))


class TestFit:
    def test_dwellings_mbur(self):
        result = fit("mbur", builtin(1).data)
        assert result.converged
        assert result.estimates[0] == pytest.approx(2.2834, abs=0.01)
        assert result.ll_magnitude == pytest.approx(74.2925, abs=0.05)
        assert result.loglik > 0 and result.nll == -result.loglik
        assert result.se_available

    def test_se_and_ci_invariants(self):
        result = fit("beta", builtin(1).data)
        for est, se, var, (lo, hi) in zip(result.estimates, result.se, np.diag(result.vcov), result.ci95):
            assert se == pytest.approx(math.sqrt(var), rel=1e-14)
            assert lo == pytest.approx(est - Z_95 * se, rel=1e-14)
            assert hi == pytest.approx(est + Z_95 * se, rel=1e-14)
        assert np.all(np.linalg.eigvalsh(result.vcov) >= -1e-10)
        np.testing.assert_array_equal(result.vcov, result.vcov.T)

    def test_se_per_obs(self):
        result = fit("mbur", builtin(2).data)
        assert result.se_per_obs[0] == pytest.approx(result.se[0] / math.sqrt(result.n), rel=1e-14)

    @pytest.mark.parametrize("ds", ["support_network", "voter_turnout"])
    def test_mbuw_se_unavailable(self, ds):
        result = fit("mbuw", builtin(ds).data)
        assert not result.se_available
        assert result.vcov is None and result.ci95 is None
        assert math.isfinite(result.hessian_condition)

    def test_mbuw_dwellings_condition_large(self):
        assert fit("mbuw", builtin(1).data).hessian_condition > 1e6

    @pytest.mark.parametrize("ds", DATASET_IDS)
    def test_ridge_identity(self, ds):
        data = builtin(ds).data
        mbuw, mbur = fit("mbuw", data), fit("mbur", data)
        a_mbuw = mbuw.estimates[0] ** mbuw.estimates[1]
        a_mbur = mbur.estimates[0] ** 2
        assert abs(a_mbuw - a_mbur) / a_mbur <= 0.005
        assert mbuw.ll_magnitude == pytest.approx(mbur.ll_magnitude, abs=1e-6)

    @pytest.mark.parametrize("ds", DATASET_IDS)
    def test_core_fit_matches_mbur(self, ds):
        data = builtin(ds).data
        core, mbur = fit_core(data), fit("mbur", data)
        assert core.param_names == ("a",)
        assert core.estimates[0] == pytest.approx(mbur.estimates[0] ** 2, rel=1e-4)
        assert core.se_available

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_every_model_fits_every_dataset(self, kind):
        for ds in DATASET_IDS:
            result = fit(kind, builtin(ds).data)
            assert result.converged
            assert math.isfinite(result.loglik)

    def test_deterministic(self):
        a = fit("kumaraswamy", builtin(3).data)
        b = fit("kumaraswamy", builtin(3).data)
        assert a.estimates == b.estimates and a.loglik == b.loglik and a.iterations == b.iterations

    def test_insufficient_data(self):
        with pytest.raises(DataError):
            fit("beta", UnitData([0.3, 0.4]))
        with pytest.raises(DataError):
            fit_core(UnitData([0.3]))

    def test_non_convergence_flagged(self):
        result = fit("beta", builtin(1).data, OptimizerConfig(max_iterations=3, restarts=0))
        assert not result.converged

    @pytest.mark.parametrize("a", [0.2, 1.0, 5.21392])
    def test_synthetic_recovery(self, a):
        data = UnitData(sample(a, 5_000, seed=1))
        assert fit_core(data).estimates[0] == pytest.approx(a, rel=0.05)

    def test_params_dict(self):
        result = fit("beta", builtin(1).data)
        assert list(result.params()) == ["alpha", "beta"]
        assert result.k == 2
