"""Per-day change rates of a case series and their windowed mean.

The default rate is the ratio of consecutive cumulative totals,
m_t = y[t+1] / y[t], so a value above 1 means the epidemic is still
growing. The ratio of consecutive daily increments is available as an
alternative basis, and the reversed (earlier over later) ratio is kept
behind a flag for fidelity experiments.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .series import ObservationSeries


class RateBasis(str, Enum):
    CUMULATIVE_RATIO = "cumulative_ratio"
    INCREMENT_RATIO = "increment_ratio"


@dataclass(frozen=True)
class ChangeRateSeries:
    """Rates indexed by the day of the *earlier* member of each pair.

    A rate is None where the denominator was zero (possible for
    increment ratios on no-new-case days); such entries are excluded
    from averaging and surfaced via `undefined_days`.
    """

    day_ids: tuple[int, ...]
    rates: tuple[float | None, ...]
    basis: RateBasis

    def __len__(self) -> int:
        return len(self.rates)

    @property
    def undefined_days(self) -> tuple[int, ...]:
        return tuple(d for d, r in zip(self.day_ids, self.rates) if r is None)


@dataclass(frozen=True)
class MeanRate:
    value: float
    window_start: int
    window_length: int
    excluded: int


def change_rates(
    series: ObservationSeries,
    basis: RateBasis = RateBasis.CUMULATIVE_RATIO,
    *,
    earlier_over_later: bool = False,
) -> ChangeRateSeries:
    """Compute the per-day change-rate sequence (output length = input - 1).

    With the default orientation the later value sits in the numerator;
    `earlier_over_later=True` flips every ratio.
    """
    basis = RateBasis(basis)
    if len(series) < 2:
        raise ValueError("need at least 2 records to form a rate")
    values = (
        series.cumulative
        if basis is RateBasis.CUMULATIVE_RATIO
        else series.increments
    )
    day_ids = series.day_ids
    rates: list[float | None] = []
    for earlier, later in zip(values, values[1:]):
        num, den = (earlier, later) if earlier_over_later else (later, earlier)
        rates.append(None if den == 0 else num / den)
    return ChangeRateSeries(day_ids=day_ids[:-1], rates=tuple(rates), basis=basis)


def mean_change_rate(
    rates: ChangeRateSeries, window_start: int, n: int | None = None
) -> MeanRate:
    """Arithmetic mean of the defined rates on the day window
    [window_start, window_start + n); undefined rates are skipped and
    counted in `excluded`."""
    if len(rates) == 0:
        raise ValueError("empty rate series")
    first, last = rates.day_ids[0], rates.day_ids[-1]
    if n is None:
        n = last - window_start + 1
    if n < 1:
        raise ValueError(f"window length must be >= 1, got {n}")
    if window_start < first or window_start + n - 1 > last:
        raise ValueError(
            f"window [{window_start}, {window_start + n}) outside rate days [{first}, {last}]"
        )
    in_window = [
        r
        for d, r in zip(rates.day_ids, rates.rates)
        if window_start <= d < window_start + n
    ]
    defined = [r for r in in_window if r is not None]
    if not defined:
        raise ValueError("no defined rates in window")
    return MeanRate(
        value=sum(defined) / len(defined),
        window_start=window_start,
        window_length=n,
        excluded=len(in_window) - len(defined),
    )
