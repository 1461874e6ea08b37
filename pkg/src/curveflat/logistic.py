"""Bounded logistic (sigmoid) growth fitting with a fixed ceiling.

The curve family is y(t) = u / (1 + u * b0 * b1^t) for a known upper
bound u: cumulative counts rise toward u, with b1 < 1 meaning the curve
is flattening. Because 1/y - 1/u = b0 * b1^t, taking logs linearizes the
model and a plain least-squares line of ln(1/y - 1/u) on t estimates
ln(b0) (intercept) and ln(b1) (slope). Fit statistics are reported on
that linearized scale.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .exceptions import FitError


def sigmoid(z):
    """Numerically stable logistic function 1 / (1 + exp(-z)).

    Never exponentiates a positive argument, so it is overflow-free for
    |z| well past 700. Accepts scalars or arrays.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    expz = np.exp(z[~pos])
    out[~pos] = expz / (1.0 + expz)
    return float(out[0]) if scalar else out


def linear_predictor(beta: Sequence[float], x: Sequence[float] = ()) -> float:
    """Affine combination beta[0] + beta[1]*x[0] + ... (beta[0] is the intercept)."""
    if len(beta) != len(x) + 1:
        raise ValueError(
            f"need {len(x) + 1} coefficients for {len(x)} covariates, got {len(beta)}"
        )
    return float(beta[0]) + float(np.dot(beta[1:], x)) if len(x) else float(beta[0])


class LogisticGrowthCurve(RegressorMixin, BaseEstimator):
    """Logistic growth curve y(t) = u / (1 + u * b0 * b1^t) with fixed u.

    Attributes after fit: b0_, b1_, r_squared_, f_stat_, df1_, df2_,
    fit_window_ (first t, number of points).
    """

    def __init__(self, upper_bound: float):
        self.upper_bound = upper_bound

    def fit(self, t: Sequence[float], y: Sequence[float]) -> "LogisticGrowthCurve":
        u = float(self.upper_bound)
        if u <= 0:
            raise ValueError(f"upper bound must be positive, got {u}")
        t = np.asarray(t, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if t.shape != y.shape:
            raise ValueError(f"t and y lengths differ: {t.size} vs {y.size}")
        n = t.size
        if n < 3:
            raise FitError(f"need at least 3 observations, got {n}")
        for ti, yi in zip(t, y):
            if yi <= 0:
                raise FitError(f"observation at day {ti:g} is {yi:g} <= 0")
            if yi >= u:
                raise FitError(
                    f"observation at day {ti:g} is {yi:g} >= upper bound {u:g}"
                )

        w = np.log(1.0 / y - 1.0 / u)
        t_mean, w_mean = t.mean(), w.mean()
        sxx = float(np.sum((t - t_mean) ** 2))
        if sxx == 0:
            raise FitError("t has zero spread")
        slope = float(np.sum((t - t_mean) * (w - w_mean)) / sxx)
        intercept = w_mean - slope * t_mean
        resid = w - (intercept + slope * t)
        rss = float(resid @ resid)
        tss = float(np.sum((w - w_mean) ** 2))
        r2 = 1.0 - rss / tss if tss > 0 else 0.0

        self.b0_ = math.exp(intercept)
        self.b1_ = math.exp(slope)
        self.r_squared_ = r2
        self.df1_ = 1
        self.df2_ = n - 2
        self.f_stat_ = (
            math.inf if r2 >= 1.0 else r2 / (1.0 - r2) * self.df2_ / self.df1_
        )
        self.fit_window_ = (float(t[0]), n)
        return self

    def predict(self, t) -> np.ndarray:
        """Curve values u / (1 + u * b0 * b1^t); strictly inside (0, u)."""
        if not hasattr(self, "b0_"):
            raise FitError("not fitted; call fit(t, y) first")
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        u = float(self.upper_bound)
        # u*b0*b1^t in log space, clipped so exp never overflows and the
        # prediction stays strictly inside (0, u)
        log_term = math.log(u * self.b0_) + t * math.log(self.b1_)
        out = u / (1.0 + np.exp(np.clip(log_term, -700.0, 700.0)))
        out = np.minimum(out, np.nextafter(u, 0.0))
        return float(out[0]) if scalar else out
