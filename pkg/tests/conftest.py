from datetime import date, timedelta
from pathlib import Path

import pytest

from curveflat import DailyRecord, ObservationSeries, parse_csv

REPO_ROOT = Path(__file__).resolve().parent.parent
GREECE_CSV = REPO_ROOT / "data" / "greece_2020.csv"
TABLE1_CSV = REPO_ROOT / "fixtures" / "table1.csv"


def series_from_cumulative(cumulative, new_cases=None, start_day=1):
    """Build a small ObservationSeries by hand for unit tests."""
    records = []
    prev = None
    for i, total in enumerate(cumulative):
        if new_cases is not None:
            nc = new_cases[i]
        else:
            nc = total if prev is None else total - prev
        records.append(
            DailyRecord(
                day_id=start_day + i,
                date=date(2020, 2, 26) + timedelta(days=start_day + i - 1),
                all_cases=total,
                new_cases=nc,
            )
        )
        prev = total
    return ObservationSeries(records=tuple(records), label="test")


@pytest.fixture(scope="session")
def greece():
    return parse_csv(GREECE_CSV.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def table1_values():
    import csv

    with TABLE1_CSV.open() as fh:
        return [int(row["forecast"]) for row in csv.DictReader(fh)]
