"""Regression splines on the truncated power basis, with OLS diagnostics.

A spline of degree d with interior knots xi_1 < ... < xi_K-1 is fit as an
ordinary least-squares problem on the basis

    1, x, ..., x^d, (x - xi_1)_+^d, ..., (x - xi_{K-1})_+^d

so the basis size is J = (d + 1) + (K - 1) = M + K - 1 for M = d + 1 and
K intervals. The truncated terms are exactly zero at and left of their
knot, which keeps the fitted curve and its first d - 1 derivatives
continuous across knots.

The raw truncated power basis is notoriously ill-conditioned, so the
solve happens on x rescaled to [0, 1] via an orthogonal (SVD)
decomposition; the reported coefficients are mapped back to the raw
basis through the exact change-of-basis matrix. Hat-matrix diagnostics
(leverage, closed-form leave-one-out CV, pointwise variance) come from
the same decomposition.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, RegressorMixin, clone

from .exceptions import FitError, RankDeficiencyError

#: Singular values below this fraction of the largest count as rank zero.
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class SplineBasis:
    """Truncated power basis of a given polynomial degree and knot set."""

    degree: int
    interior_knots: tuple[float, ...]

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")
        ks = self.interior_knots
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError(
                f"interior knots must be strictly increasing (no duplicates): {ks}"
            )

    @property
    def n_intervals(self) -> int:
        return len(self.interior_knots) + 1

    @property
    def size(self) -> int:
        """Basis dimension J = M + K - 1 (M = degree + 1, K intervals)."""
        m = self.degree + 1
        return m + self.n_intervals - 1

    def column_names(self) -> tuple[str, ...]:
        names = ["1"] + [f"x^{p}" for p in range(1, self.degree + 1)]
        names += [f"(x-{k:g})_+^{self.degree}" for k in self.interior_knots]
        return tuple(names)

    def design_matrix(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        cols = [x**p for p in range(self.degree + 1)]
        for knot in self.interior_knots:
            cols.append(np.where(x > knot, (x - knot) ** self.degree, 0.0))
        return np.column_stack(cols)


def build_basis(
    x: Sequence[float], knots: Sequence[float], degree: int = 3
) -> np.ndarray:
    """Design matrix of the truncated power basis evaluated at `x`.

    Columns are ordered 1, x, ..., x^degree, then one truncated term per
    interior knot in knot order. Knots must lie strictly inside
    (min(x), max(x)) and contain no duplicates.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("x is empty")
    lo, hi = float(x.min()), float(x.max())
    for knot in knots:
        if not (lo < knot < hi):
            raise ValueError(
                f"knot {knot} outside the open data range ({lo}, {hi})"
            )
    basis = SplineBasis(degree=degree, interior_knots=tuple(float(k) for k in knots))
    return basis.design_matrix(x)


def _change_of_basis(degree: int, knots: tuple[float, ...], a: float, s: float) -> np.ndarray:
    """Matrix C with raw_design @ C == scaled_design, so coefficients fit
    on the scaled basis map back to the raw basis as beta_raw = C @ beta."""
    j = degree + 1 + len(knots)
    c = np.zeros((j, j))
    for col, p in enumerate(range(degree + 1)):
        # ((x - a)/s)^p expanded in powers of x
        for i in range(p + 1):
            c[i, col] = math.comb(p, i) * (-a) ** (p - i) / s**p
    for k in range(len(knots)):
        # ((x - xi)/s)_+^d  ==  s^-d * (x - xi)_+^d
        col = degree + 1 + k
        c[col, col] = s ** (-degree)
    return c


class SplineRegression(RegressorMixin, BaseEstimator):
    """Least-squares regression spline with hat-matrix diagnostics.

    Parameters
    ----------
    degree : polynomial degree of each piece (default cubic).
    knots : interior knot positions, strictly increasing, strictly inside
        the training range; a KnotPartition is accepted as-is.

    Attributes (after fit)
    ----------------------
    coef_ : raw-basis coefficients, length J.
    fitted_values_, residuals_ : in-sample fit.
    hat_diagonal_ : leverages z_ii of the projection onto the basis.
    sigma2_ : residual variance RSS / (n - J); NaN when n == J.
    pointwise_variance_ : sigma2_ * z_ii per training point.
    r_squared_ : 1 - RSS/TSS.
    loocv_ : closed-form leave-one-out CV score, or None when some
        leverage equals 1 (use .loocv() for the raising variant).
    """

    def __init__(self, degree: int = 3, knots: Sequence[float] = ()):
        self.degree = degree
        self.knots = knots

    def fit(self, x: Sequence[float], y: Sequence[float]) -> "SplineRegression":
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if x.shape != y.shape:
            raise ValueError(f"x and y lengths differ: {x.size} vs {y.size}")
        raw_knots = getattr(self.knots, "interior_knots", self.knots)
        knots = tuple(float(k) for k in raw_knots)
        basis = SplineBasis(degree=self.degree, interior_knots=knots)
        n, j = x.size, basis.size
        if n < j:
            raise FitError(f"need at least J={j} observations, got n={n}")
        lo, hi = float(x.min()), float(x.max())
        if hi == lo:
            raise FitError("x has zero spread")
        for knot in knots:
            if not (lo < knot < hi):
                raise ValueError(f"knot {knot} outside the open data range ({lo}, {hi})")

        scale = hi - lo
        xs = (x - lo) / scale
        scaled_knots = tuple((k - lo) / scale for k in knots)
        scaled_basis = SplineBasis(degree=self.degree, interior_knots=scaled_knots)
        design = scaled_basis.design_matrix(xs)

        u, sv, vt = np.linalg.svd(design, full_matrices=False)
        rank = int(np.sum(sv > RANK_RTOL * sv[0]))
        if rank < j:
            _, _, pivots = scipy.linalg.qr(design, pivoting=True)
            names = basis.column_names()
            offending = tuple(sorted(names[p] for p in pivots[rank:]))
            raise RankDeficiencyError(
                f"design matrix is rank deficient ({rank} < {j}); "
                f"dependent columns: {', '.join(offending)}",
                columns=offending,
            )

        beta_scaled = vt.T @ ((u.T @ y) / sv)
        fitted = design @ beta_scaled
        residuals = y - fitted
        rss = float(residuals @ residuals)
        hat_diag = np.einsum("ij,ij->i", u, u)

        tss = float(np.sum((y - y.mean()) ** 2))
        self.basis_ = basis
        self.coef_ = _change_of_basis(self.degree, knots, lo, scale) @ beta_scaled
        self.fitted_values_ = fitted
        self.residuals_ = residuals
        self.hat_diagonal_ = hat_diag
        self.sigma2_ = rss / (n - j) if n > j else float("nan")
        self.pointwise_variance_ = self.sigma2_ * hat_diag
        self.r_squared_ = 1.0 - rss / tss if tss > 0 else 1.0
        self.n_obs_ = n
        self.rss_ = rss
        self._x_min = lo
        self._x_scale = scale
        self._scaled_basis = scaled_basis
        self._beta_scaled = beta_scaled
        try:
            self.loocv_ = self.loocv()
        except FitError:
            self.loocv_ = None
        return self

    def _check_fitted(self):
        if not hasattr(self, "coef_"):
            raise FitError("not fitted; call fit(x, y) first")

    def loocv(self) -> float:
        """Closed-form leave-one-out CV: mean of ((y - yhat)/(1 - z_ii))^2.

        Raises FitError when a leverage equals 1 (the point is interpolated
        and cannot be left out).
        """
        self._check_fitted()
        z = self.hat_diagonal_
        bad = np.nonzero(z >= 1.0 - 1e-9)[0]
        if bad.size:
            raise FitError(
                f"leverage is 1 at observation index {bad[0]}; LOOCV undefined"
            )
        return float(np.mean((self.residuals_ / (1.0 - z)) ** 2))

    def predict(self, x: Sequence[float]) -> np.ndarray:
        """Evaluate the fitted spline; extrapolation is allowed but warned."""
        self._check_fitted()
        x = np.asarray(x, dtype=float).ravel()
        lo = self._x_min
        hi = self._x_min + self._x_scale
        if x.size and (x.min() < lo or x.max() > hi):
            warnings.warn(
                f"predicting outside the training range [{lo:g}, {hi:g}]",
                stacklevel=2,
            )
        xs = (x - lo) / self._x_scale
        return self._scaled_basis.design_matrix(xs) @ self._beta_scaled


@dataclass(frozen=True)
class TruthSpec:
    """Synthetic data generator for the Monte-Carlo error decomposition.

    Each replicate draws `n_samples` abscissae uniformly on
    [x_min, x_max] and responses fn(x) + noise_sd * N(0, 1).
    """

    fn: Callable[[np.ndarray], np.ndarray]
    noise_sd: float
    x_min: float
    x_max: float
    n_samples: int = 30

    def __post_init__(self):
        if self.x_max <= self.x_min:
            raise ValueError("degenerate generator: zero x-spread")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")


@dataclass(frozen=True)
class BiasVarianceReport:
    """Monte-Carlo decomposition of expected squared prediction error."""

    bias_sq: float
    variance: float
    noise: float
    expected_loss: float
    mc_replicates: int
    empirical_loss: float
    empirical_se: float


def bias_variance_mc(
    truth: TruthSpec,
    model: SplineRegression,
    replicates: int,
    seed: int = 0,
    eval_points: int = 101,
) -> BiasVarianceReport:
    """Estimate bias^2, variance, and noise of a spline fit by simulation.

    Draws `replicates` independent training sets from `truth`, fits a
    clone of `model` to each, and evaluates every fit on a fixed uniform
    grid. bias^2 is the squared gap between the replicate-mean prediction
    and the truth, variance the spread of predictions around that mean,
    noise the irreducible noise_sd^2; expected_loss is their sum by
    construction. The replicate seeds derive from `seed + replicate index`.

    `empirical_loss` is an independent check: the mean squared error of
    each fit against freshly drawn noisy targets on the same grid, with
    its Monte-Carlo standard error.
    """
    if replicates < 2:
        raise ValueError(f"need at least 2 replicates, got {replicates}")
    grid = np.linspace(truth.x_min, truth.x_max, eval_points)
    truth_on_grid = np.asarray(truth.fn(grid), dtype=float)
    predictions = np.empty((replicates, eval_points))
    replicate_loss = np.empty(replicates)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # grid endpoints may extrapolate
        for r in range(replicates):
            rng = np.random.default_rng(seed + r)
            x = rng.uniform(truth.x_min, truth.x_max, truth.n_samples)
            y = np.asarray(truth.fn(x), dtype=float)
            if truth.noise_sd > 0:
                y = y + truth.noise_sd * rng.standard_normal(truth.n_samples)
            fit = clone(model).fit(x, y)
            predictions[r] = fit.predict(grid)
            targets = truth_on_grid
            if truth.noise_sd > 0:
                targets = targets + truth.noise_sd * rng.standard_normal(eval_points)
            replicate_loss[r] = float(np.mean((predictions[r] - targets) ** 2))

    mean_prediction = predictions.mean(axis=0)
    bias_sq = float(np.mean((mean_prediction - truth_on_grid) ** 2))
    variance = float(np.mean((predictions - mean_prediction) ** 2))
    noise = truth.noise_sd**2
    return BiasVarianceReport(
        bias_sq=bias_sq,
        variance=variance,
        noise=noise,
        expected_loss=bias_sq + variance + noise,
        mc_replicates=replicates,
        empirical_loss=float(replicate_loss.mean()),
        empirical_se=float(replicate_loss.std(ddof=1) / math.sqrt(replicates)),
    )
