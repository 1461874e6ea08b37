"""Daily case-series ingestion, validation, and cumulative/incremental views.

The canonical record layout mirrors the public Greek COVID-19 daily bulletins:
a 1-based day index, a calendar date, the cumulative case total, and a handful
of secondary daily counts. Only ``day_id`` and ``all_cases`` drive the core
math; everything else is carried through for reporting.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from datetime import date as Date
from typing import Iterable, NamedTuple, Sequence

from .exceptions import ParseError

#: Canonical column names, in serialization order. Header matching is
#: case-insensitive.
COLUMNS = (
    "day_id",
    "date",
    "all_cases",
    "new_cases",
    "new_deaths",
    "recovered",
    "icu",
    "active_cases",
    "tests",
)
REQUIRED = ("day_id", "all_cases")
#: Header spellings used when re-serializing.
_HEADER = (
    "Day_ID",
    "Date",
    "All_Cases",
    "New_Cases",
    "New_Deaths",
    "Recovered",
    "ICU",
    "Active_Cases",
    "Tests",
)
#: Integer columns that must be non-negative (active_cases is a signed delta).
_UNSIGNED = ("all_cases", "new_cases", "new_deaths", "recovered", "icu", "tests")


@dataclass(frozen=True)
class DailyRecord:
    """One day of observations. Counts are exact integers."""

    day_id: int
    date: Date | None
    all_cases: int
    new_cases: int
    new_deaths: int = 0
    recovered: int = 0
    icu: int = 0
    active_cases_delta: int = 0
    tests: int = 0


@dataclass(frozen=True)
class ObservationSeries:
    """An ordered run of daily records plus a free-text provenance label."""

    records: tuple[DailyRecord, ...]
    label: str = ""

    def __len__(self) -> int:
        return len(self.records)

    @property
    def day_ids(self) -> tuple[int, ...]:
        return tuple(r.day_id for r in self.records)

    @property
    def cumulative(self) -> tuple[int, ...]:
        return tuple(r.all_cases for r in self.records)

    @property
    def increments(self) -> tuple[int, ...]:
        return tuple(r.new_cases for r in self.records)

    @property
    def dates(self) -> tuple[Date | None, ...]:
        return tuple(r.date for r in self.records)

    def to_csv(self) -> str:
        """Serialize back to the canonical CSV schema (record-level round trip)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_HEADER)
        for r in self.records:
            w.writerow(
                [
                    r.day_id,
                    r.date.isoformat() if r.date is not None else "",
                    r.all_cases,
                    r.new_cases,
                    r.new_deaths,
                    r.recovered,
                    r.icu,
                    r.active_cases_delta,
                    r.tests,
                ]
            )
        return buf.getvalue()


class Issue(NamedTuple):
    day_id: int
    rule: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[Issue, ...]


def _norm(name: str) -> str:
    return name.strip().lower()


def _parse_int(raw: str, column: str, row: int) -> int:
    raw = raw.strip()
    if raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"column '{column}' has non-integer value {raw!r}", row=row) from None


def _parse_date(raw: str, row: int) -> Date | None:
    raw = raw.strip()
    if raw == "":
        return None
    try:
        return Date.fromisoformat(raw)
    except ValueError:
        raise ParseError(f"unparseable date {raw!r} (expected YYYY-MM-DD)", row=row) from None


def parse_csv(
    text: str | io.TextIOBase,
    header_map: dict[str, str] | None = None,
) -> ObservationSeries:
    """Parse a comma-separated daily series.

    The header row is matched case-insensitively against the canonical
    column names; `header_map` may rename source headers to canonical ones
    first. `day_id` and `all_cases` are required. Missing optional columns
    are zero-filled and flagged with a warning; a missing `new_cases` column
    is derived by differencing the cumulative totals instead.

    Raises ParseError for a malformed row (carrying its row number),
    duplicate or gapped day ids, and negative counts.
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    reader = csv.reader(text)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input: no header row") from None

    rename = { _norm(k): _norm(v) for k, v in (header_map or {}).items() }
    cols: dict[str, int] = {}
    for idx, name in enumerate(header):
        canon = rename.get(_norm(name), _norm(name))
        if canon in COLUMNS:
            cols[canon] = idx

    for required in REQUIRED:
        if required not in cols:
            raise ParseError(f"required column absent: '{required}'")
    missing = [c for c in COLUMNS if c not in cols]
    derive_new_cases = "new_cases" in missing
    for name in missing:
        warnings.warn(f"column '{name}' missing; zero-filled", stacklevel=2)

    width = max(cols.values()) + 1
    rows: list[dict] = []
    for rownum, raw in enumerate(reader, start=1):
        if not raw or all(not cell.strip() for cell in raw):
            continue
        if len(raw) < width:
            raise ParseError(
                f"expected at least {width} fields, got {len(raw)}", row=rownum
            )
        values: dict[str, object] = {"_row": rownum}
        for name in COLUMNS:
            if name not in cols:
                continue
            cell = raw[cols[name]]
            if name == "date":
                values["date"] = _parse_date(cell, rownum)
            else:
                values[name] = _parse_int(cell, name, rownum)
        for name in _UNSIGNED:
            if name in values and values[name] < 0:
                raise ParseError(f"negative count in column '{name}'", row=rownum)
        rows.append(values)

    if not rows:
        raise ParseError("no data rows")

    rows.sort(key=lambda v: v["day_id"])
    previous = None
    for v in rows:
        if previous is not None:
            if v["day_id"] == previous:
                raise ParseError(f"non-monotone day_id: {v['day_id']} repeats", row=v["_row"])
            if v["day_id"] != previous + 1:
                raise ParseError(
                    f"day_id gap: {previous} -> {v['day_id']}", row=v["_row"]
                )
        previous = v["day_id"]

    if derive_new_cases:
        prev_total = None
        for v in rows:
            total = v["all_cases"]
            if prev_total is None:
                v["new_cases"] = total
            else:
                diff = total - prev_total
                if diff < 0:
                    raise ParseError(
                        "cannot derive new_cases: cumulative total decreases",
                        row=v["_row"],
                    )
                v["new_cases"] = diff
            prev_total = total

    records = tuple(
        DailyRecord(
            day_id=v["day_id"],
            date=v.get("date"),
            all_cases=v["all_cases"],
            new_cases=v.get("new_cases", 0),
            new_deaths=v.get("new_deaths", 0),
            recovered=v.get("recovered", 0),
            icu=v.get("icu", 0),
            active_cases_delta=v.get("active_cases", 0),
            tests=v.get("tests", 0),
        )
        for v in rows
    )
    return ObservationSeries(records=records)


def validate(series: ObservationSeries) -> ValidationReport:
    """Report every violated series invariant without mutating the input.

    Rules checked per day: cumulative monotonicity, the consistency
    all_cases[t] - all_cases[t-1] == new_cases[t], non-negative counts,
    and day-id contiguity.
    """
    if len(series) == 0:
        raise ValueError("series is empty")
    issues: list[Issue] = []
    prev: DailyRecord | None = None
    for r in series.records:
        for name in _UNSIGNED:
            value = getattr(r, name)
            if value < 0:
                issues.append(Issue(r.day_id, "negative count", f"{name} = {value} < 0"))
        if prev is not None:
            if r.day_id != prev.day_id + 1:
                issues.append(
                    Issue(r.day_id, "day continuity", f"day_id jumps {prev.day_id} -> {r.day_id}")
                )
            if r.all_cases < prev.all_cases:
                issues.append(
                    Issue(
                        r.day_id,
                        "monotonicity",
                        f"all_cases drops {prev.all_cases} -> {r.all_cases}",
                    )
                )
            if r.all_cases - prev.all_cases != r.new_cases:
                issues.append(
                    Issue(
                        r.day_id,
                        "difference mismatch",
                        f"all_cases delta {r.all_cases - prev.all_cases} != new_cases {r.new_cases}",
                    )
                )
        prev = r
    return ValidationReport(ok=not issues, issues=tuple(issues))


def to_incremental(cumulative: Sequence[float]) -> list[float]:
    """First differences of a monotone cumulative series.

    The first output element is the first cumulative value itself (the
    increment from an implicit zero baseline), so the output has the same
    length as the input and `to_cumulative` inverts it exactly.
    """
    if len(cumulative) == 0:
        return []
    out = [cumulative[0]]
    for a, b in zip(cumulative, cumulative[1:]):
        if b < a:
            raise ValueError(f"cumulative series not monotone: {a} -> {b}")
        out.append(b - a)
    return out


def to_cumulative(increments: Sequence[float], start: float = 0) -> list[float]:
    """Running sum of non-negative increments on top of `start`."""
    out: list[float] = []
    total = start
    for inc in increments:
        if inc < 0:
            raise ValueError(f"negative increment: {inc}")
        total += inc
        out.append(total)
    return out
