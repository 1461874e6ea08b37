"""Horizon forecasts of cumulative counts and the saturation upper bound.

Two modes are provided:

* a literal four-recurrence scheme driven by the mean change rate, kept
  for fidelity: it evaluates, per step, U -> g -> h -> f and records all
  intermediates. With any constant parameters near realistic change
  rates it contracts geometrically instead of growing, so it is *not*
  the path used to reproduce the reference forecast table;
* a geometric-increment extrapolation (daily increments grow by a fixed
  factor), which is the mode that replays the reference table, with a
  deterministic calibration routine to recover its parameters from a
  golden CSV.

The saturation bound averages a highest-forecast value with a
rate-scaled second estimate; an override hook exists because published
figures for the second estimate do not always equal the product they
are defined as.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date as Date, timedelta
from enum import Enum
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .exceptions import CalibrationError
from .ioutil import round_half_up


class ForecastMode(str, Enum):
    EQ13_RECURSIVE = "eq13_recursive"
    GEOMETRIC_INCREMENT = "geometric_increment"


@dataclass(frozen=True)
class ForecastStep:
    """All intermediates of one recursive-forecast step."""

    day_id: int
    f_hat: float
    u: float
    g: float
    h: float
    m_bar: float
    m: float


@dataclass(frozen=True)
class ForecastRow:
    day_id: int
    date: Date | None
    value: float


@dataclass(frozen=True)
class ForecastTable:
    rows: tuple[ForecastRow, ...]
    mode: ForecastMode
    params: Mapping[str, float]
    steps: tuple[ForecastStep, ...] = ()

    def values(self) -> tuple[float, ...]:
        return tuple(r.value for r in self.rows)

    def to_csv(self) -> str:
        """Four-column layout: running id, date, day id, rounded forecast."""
        lines = ["id,date,day_id,forecast"]
        for i, r in enumerate(self.rows, start=1):
            date = r.date.isoformat() if r.date is not None else ""
            lines.append(f"{i},{date},{r.day_id},{round_half_up(r.value)}")
        return "\n".join(lines) + "\n"


def forecast_recursive(
    last_observed: float,
    mean_rate: float,
    rate: float,
    u0: float,
    horizon: int,
    start_day_id: int = 0,
    start_date: Date | None = None,
) -> ForecastTable:
    """Iterate the four coupled recurrences for `horizon` steps.

    Per step k (in this order):

        U_k = mean_rate - U_{k-1}          (U_0 = u0)
        g_k = (f_{k-1} * U_k) * mean_rate
        h_k = g_k * rate + (g_k * U_k) * mean_rate
        f_k = h_k - g_k

    Deterministic; every intermediate is recorded in `steps`.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    for name, v in (("last_observed", last_observed), ("mean_rate", mean_rate),
                    ("rate", rate), ("u0", u0)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v}")
    f_prev, u_prev = float(last_observed), float(u0)
    rows: list[ForecastRow] = []
    steps: list[ForecastStep] = []
    for k in range(1, horizon + 1):
        u_k = mean_rate - u_prev
        g_k = (f_prev * u_k) * mean_rate
        h_k = g_k * rate + (g_k * u_k) * mean_rate
        f_k = h_k - g_k
        day_id = start_day_id + k
        date = start_date + timedelta(days=k) if start_date is not None else None
        rows.append(ForecastRow(day_id=day_id, date=date, value=f_k))
        steps.append(
            ForecastStep(
                day_id=day_id, f_hat=f_k, u=u_k, g=g_k, h=h_k,
                m_bar=mean_rate, m=rate,
            )
        )
        f_prev, u_prev = f_k, u_k
    return ForecastTable(
        rows=tuple(rows),
        mode=ForecastMode.EQ13_RECURSIVE,
        params={
            "last_observed": last_observed,
            "m_bar": mean_rate,
            "m": rate,
            "u0": u0,
        },
        steps=tuple(steps),
    )


def forecast_geometric(
    last_cumulative: float,
    last_increment: float,
    daily_factor: float,
    horizon: int,
    start_day_id: int = 0,
    start_date: Date | None = None,
) -> ForecastTable:
    """Extrapolate with geometrically growing daily increments.

    Step k adds last_increment * daily_factor^k to the running total, so
    factor 1 keeps increments constant. Values stay unrounded; rounding
    happens only at serialization.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if daily_factor <= 0:
        raise ValueError(f"daily_factor must be > 0, got {daily_factor}")
    if last_increment < 0:
        raise ValueError(f"last_increment must be >= 0, got {last_increment}")
    rows: list[ForecastRow] = []
    total = float(last_cumulative)
    for k in range(1, horizon + 1):
        total += last_increment * daily_factor**k
        date = start_date + timedelta(days=k) if start_date is not None else None
        rows.append(ForecastRow(day_id=start_day_id + k, date=date, value=total))
    return ForecastTable(
        rows=tuple(rows),
        mode=ForecastMode.GEOMETRIC_INCREMENT,
        params={
            "last_cumulative": float(last_cumulative),
            "last_increment": float(last_increment),
            "daily_factor": float(daily_factor),
        },
    )


@dataclass(frozen=True)
class GeometricParams:
    """Parameters recovered from a golden table: replaying
    forecast_geometric(start, first_increment, daily_factor, len(table))
    regenerates the table (including its first row)."""

    start: float
    first_increment: float
    daily_factor: float
    max_abs_deviation: float


def _geometric_partial_sums(factor: float, horizon: int) -> np.ndarray:
    """S_k = factor + factor^2 + ... + factor^k for k = 1..horizon."""
    powers = factor ** np.arange(1, horizon + 1)
    return np.cumsum(powers)


def _chebyshev_fit(values: np.ndarray, sums: np.ndarray) -> tuple[float, float, float]:
    """Minimize max_k |values_k - (c + j * sums_k)| over (c, j) via LP."""
    n = values.size
    # variables (c, j, t): minimize t subject to |v - c - j*s| <= t
    a_ub = np.zeros((2 * n, 3))
    a_ub[:n, 0] = 1.0
    a_ub[:n, 1] = sums
    a_ub[:n, 2] = -1.0
    a_ub[n:, 0] = -1.0
    a_ub[n:, 1] = -sums
    a_ub[n:, 2] = -1.0
    b_ub = np.concatenate([values, -values])
    res = linprog(
        c=[0.0, 0.0, 1.0],
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=[(None, None), (None, None), (0, None)],
        method="highs",
    )
    if not res.success:
        raise CalibrationError(f"calibration LP failed: {res.message}")
    c, j, t = res.x
    return float(c), float(j), float(t)


def calibrate_to_table(
    values: Sequence[float], tol: float = 1e-9
) -> GeometricParams:
    """Recover geometric-increment parameters from a golden forecast table.

    Exactly geometric tables are solved in closed form (parameters
    recovered to floating-point accuracy). Otherwise the daily factor is
    scanned on a fixed grid around the endpoint-implied estimate and
    refined by interval bisection, solving the remaining two parameters
    as a Chebyshev (minimax) line fit at each candidate factor; the
    returned parameters minimize the maximum absolute deviation.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 3:
        raise CalibrationError(f"need at least 3 rows, got {v.size}")
    inc = np.diff(v)
    if np.any(inc <= 0):
        k = int(np.argmax(inc <= 0))
        raise CalibrationError(
            f"table must be strictly increasing; rows {k + 1} -> {k + 2} are not"
        )

    ratios = inc[1:] / inc[:-1]
    if float(ratios.max() - ratios.min()) <= tol:
        # exactly geometric: closed form
        factor = float(ratios.mean())
        first_inc = float(inc[0] / factor**2)
        start = float(v[0] - first_inc * factor)
        return GeometricParams(
            start=start,
            first_increment=first_inc,
            daily_factor=factor,
            max_abs_deviation=0.0,
        )

    n = v.size
    f_center = float((inc[-1] / inc[0]) ** (1.0 / max(n - 2, 1)))

    def deviation(factor: float) -> tuple[float, float, float]:
        sums = _geometric_partial_sums(factor, n)
        c, j, dev = _chebyshev_fit(v, sums)
        return dev, c, j

    # fixed coarse grid around the endpoint-implied factor estimate
    grid = f_center * (1.0 + np.linspace(-5e-3, 5e-3, 61))
    devs = [deviation(f)[0] for f in grid]
    best = int(np.argmin(devs))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    # bisection-style shrink of the bracket around the minimum
    for _ in range(60):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if deviation(m1)[0] <= deviation(m2)[0]:
            hi = m2
        else:
            lo = m1
        if hi - lo < 1e-12:
            break
    factor = (lo + hi) / 2.0
    dev, c, j = deviation(factor)
    # v_k = c + j * S_k(factor) is exactly forecast_geometric(c, j, factor)
    return GeometricParams(
        start=c,
        first_increment=j,
        daily_factor=factor,
        max_abs_deviation=dev,
    )


@dataclass(frozen=True)
class UpperBoundEstimate:
    """Saturation ceiling: average of the highest forecast and a
    rate-scaled second bound (unrounded; floor only at serialization)."""

    u_pb1: float
    u_pb2: float
    u_pb: float
    override_used: bool

    def to_json_dict(self) -> dict:
        return {
            "u_pb1": round_half_up(self.u_pb1),
            "u_pb2": round_half_up(self.u_pb2),
            "u_pb": math.floor(self.u_pb),
            "override_used": self.override_used,
        }


def upper_bound(
    u_pb1: float,
    m_bar: float | None = None,
    u_pb2_override: float | None = None,
) -> UpperBoundEstimate:
    """Average the highest forecast value with its rate-scaled companion.

    u_pb2 defaults to u_pb1 * m_bar; the override replays externally
    supplied second bounds verbatim. The returned u_pb is the exact mean
    of the two; `to_json_dict` floors it for serialization.
    """
    if u_pb1 <= 0:
        raise ValueError(f"u_pb1 must be > 0, got {u_pb1}")
    if u_pb2_override is None:
        if m_bar is None or m_bar <= 0:
            raise ValueError("m_bar must be > 0 when no override is given")
        u_pb2 = u_pb1 * m_bar
        override_used = False
    else:
        u_pb2 = float(u_pb2_override)
        override_used = True
    return UpperBoundEstimate(
        u_pb1=float(u_pb1),
        u_pb2=u_pb2,
        u_pb=(u_pb1 + u_pb2) / 2.0,
        override_used=override_used,
    )
