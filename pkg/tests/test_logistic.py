import math

import numpy as np
import pytest

from curveflat import FitError, LogisticGrowthCurve, linear_predictor, sigmoid


def curve(t, u, b0, b1):
    t = np.asarray(t, dtype=float)
    return u / (1.0 + u * b0 * b1**t)


# ------------------------------------------------------------ sigmoid


def test_sigmoid_midpoint():
    assert sigmoid(0.0) == 0.5


def test_sigmoid_symmetry_identity():
    for z in (0.3, 1.7, 5.0, 30.0, 250.0):
        assert abs(sigmoid(-z) - (1.0 - sigmoid(z))) <= 1e-15


def test_sigmoid_log3_quarter_point():
    assert sigmoid(math.log(3)) == pytest.approx(0.75, abs=1e-15)


def test_sigmoid_extreme_arguments_stay_finite():
    assert sigmoid(700.0) == pytest.approx(1.0)
    assert sigmoid(-700.0) == pytest.approx(0.0, abs=1e-300)
    assert math.isfinite(sigmoid(-700.0)) and sigmoid(-700.0) > 0
    values = sigmoid(np.array([-750.0, 0.0, 750.0]))
    assert np.all(np.isfinite(values))
    assert np.all(np.diff(values) > 0)  # monotone


# ------------------------------------------------------------ predictor


def test_linear_predictor_intercept_only():
    assert linear_predictor([1.0]) == 1.0


def test_linear_predictor_single_covariate():
    assert linear_predictor([0.0, 2.0], [3.0]) == 6.0


def test_linear_predictor_two_covariates():
    assert linear_predictor([1.0, 2.0, -1.0], [1.0, 4.0]) == -1.0


def test_linear_predictor_length_mismatch():
    with pytest.raises(ValueError, match="coefficients"):
        linear_predictor([1.0, 2.0], [3.0, 4.0])


# ------------------------------------------------------------ fitting


def test_noiseless_round_trip_recovery():
    u, b0, b1 = 1000.0, 0.2, 0.9
    t = np.arange(0, 30, dtype=float)
    model = LogisticGrowthCurve(upper_bound=u).fit(t, curve(t, u, b0, b1))
    assert model.b0_ == pytest.approx(b0, rel=1e-9)
    assert model.b1_ == pytest.approx(b1, rel=1e-9)
    assert model.r_squared_ == pytest.approx(1.0, abs=1e-12)
    assert model.predict(t) == pytest.approx(curve(t, u, b0, b1), rel=1e-9)


def test_constant_series_gives_unit_b1_zero_r2():
    u = 100.0
    t = np.arange(10, dtype=float)
    model = LogisticGrowthCurve(upper_bound=u).fit(t, np.full(10, u / 2))
    assert model.b1_ == pytest.approx(1.0, abs=1e-15)
    assert model.r_squared_ == 0.0


def test_observation_at_or_above_bound_names_the_day():
    with pytest.raises(FitError, match="day 2.*>= upper bound"):
        LogisticGrowthCurve(upper_bound=10).fit([1, 2, 3], [5, 10, 6])
    with pytest.raises(FitError, match="<= 0"):
        LogisticGrowthCurve(upper_bound=10).fit([1, 2, 3], [5, 0, 6])


def test_needs_three_points():
    with pytest.raises(FitError, match="at least 3"):
        LogisticGrowthCurve(upper_bound=10).fit([1, 2], [3, 4])


def test_degrees_of_freedom():
    t = np.arange(54, dtype=float)
    y = curve(t, 100.0, 0.3, 0.95)
    model = LogisticGrowthCurve(upper_bound=100.0).fit(t, y)
    assert model.df1_ == 1
    assert model.df2_ == 52


def test_scale_consistency():
    u, b0, b1 = 500.0, 0.05, 0.88
    t = np.arange(0, 25, dtype=float)
    rng = np.random.default_rng(2)
    w_noise = 0.05 * rng.standard_normal(t.size)
    y = u / (1.0 + u * b0 * np.exp(w_noise) * b1**t)
    base = LogisticGrowthCurve(upper_bound=u).fit(t, y)
    for c in (2.0, 10.0):
        scaled = LogisticGrowthCurve(upper_bound=c * u).fit(t, c * y)
        assert scaled.b0_ == pytest.approx(base.b0_ / c, rel=1e-9)
        assert scaled.b1_ == pytest.approx(base.b1_, rel=1e-9)
        assert scaled.r_squared_ == pytest.approx(base.r_squared_, rel=1e-9)


def test_noisy_recovery_within_three_standard_errors():
    u, b0, b1 = 2000.0, 0.1, 0.9
    t = np.arange(0, 40, dtype=float)
    rng = np.random.default_rng(77)
    sigma = 0.08
    w = np.log(u * b0) - np.log(u) + t * np.log(b1) + sigma * rng.standard_normal(t.size)
    y = u / (1.0 + np.exp(np.log(u) + w))
    model = LogisticGrowthCurve(upper_bound=u).fit(t, y)
    # standard error of the OLS slope on the linearized scale
    resid_var = sigma**2
    se_slope = math.sqrt(resid_var / np.sum((t - t.mean()) ** 2))
    assert abs(math.log(model.b1_) - math.log(b1)) <= 3 * se_slope


# ------------------------------------------------------------ prediction


def test_prediction_monotone_iff_flattening():
    t = np.arange(0, 20, dtype=float)
    flattening = LogisticGrowthCurve(upper_bound=100.0).fit(
        t, curve(t, 100.0, 0.5, 0.9)
    )
    assert flattening.b1_ < 1
    values = flattening.predict(np.arange(0, 200, dtype=float))
    assert np.all(np.diff(values) > 0)
    assert np.all(values < 100.0)

    growing_b1 = 1.1  # b1 > 1 means the curve decays toward 0
    y = curve(t, 100.0, 0.5, growing_b1)
    decaying = LogisticGrowthCurve(upper_bound=100.0).fit(t, y)
    assert decaying.b1_ > 1
    assert np.all(np.diff(decaying.predict(t)) < 0)


def test_prediction_approaches_bound():
    t = np.arange(0, 30, dtype=float)
    model = LogisticGrowthCurve(upper_bound=100.0).fit(t, curve(t, 100.0, 0.5, 0.8))
    assert model.predict(400.0) == pytest.approx(100.0, rel=1e-6)


def test_unit_b1_predicts_constant():
    t = np.arange(0, 10, dtype=float)
    u = 50.0
    model = LogisticGrowthCurve(upper_bound=u).fit(t, np.full(10, 20.0))
    expected = u / (1.0 + u * model.b0_)
    assert model.predict(np.array([0.0, 5.0, 50.0])) == pytest.approx(expected)


# ------------------------------------------------------------ fixture


def test_fixture_trailing_window_fit(greece):
    day_ids = greece.day_ids
    totals = greece.cumulative
    t = day_ids[-54:]
    y = totals[-54:]
    model = LogisticGrowthCurve(upper_bound=3683).fit(t, y)
    assert model.r_squared_ >= 0.90
    assert 0.80 <= model.b1_ <= 0.90
    assert model.df2_ == 52


def test_get_params_round_trip():
    model = LogisticGrowthCurve(upper_bound=3683.0)
    assert model.get_params() == {"upper_bound": 3683.0}
