"""
Daily OHLC ingestion and business-day alignment.

Prices are the only thing ever forward-filled. A day missing from the input
but present in the calendar becomes a flat bar (O=H=L=C=previous close), so
its simple return is exactly zero and its true range collapses to zero.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd
from pandas.tseries.holiday import (
    AbstractHolidayCalendar,
    GoodFriday,
    Holiday,
    USLaborDay,
    USMartinLutherKingJr,
    USMemorialDay,
    USPresidentsDay,
    USThanksgivingDay,
    nearest_workday,
)

from .errors import (
    LeadingGap,
    MalformedRow,
    NonPositivePrice,
    TooShort,
    UnsortedDuplicateDate,
)

DEFAULT_SCHEMA = {"date": "date", "open": "open", "high": "high", "low": "low", "close": "close"}


@dataclass(frozen=True)
class Bar:
    date: np.datetime64
    open: float
    high: float
    low: float
    close: float

    def __post_init__(self):
        if min(self.open, self.high, self.low, self.close) <= 0:
            raise NonPositivePrice(f"{self.date}: prices must be > 0")
        if self.low > min(self.open, self.close) or self.high < max(self.open, self.close):
            raise MalformedRow(0, f"{self.date}: OHLC ordering violated")


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Aligned daily OHLC arrays. ``dates`` is ``datetime64[D]``, strictly increasing."""

    dates: np.ndarray
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    calendar: str = "unaligned"

    def __post_init__(self):
        n = len(self.dates)
        for name in ("open", "high", "low", "close"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} has length {len(getattr(self, name))}, expected {n}")
        if n > 1 and np.any(np.diff(self.dates.astype("int64")) <= 0):
            raise UnsortedDuplicateDate("dates must be strictly increasing")

    def __len__(self) -> int:
        return len(self.dates)

    def __getitem__(self, item) -> "PriceSeries":
        if not isinstance(item, slice):
            raise TypeError("PriceSeries supports slicing only; use .bar(i) for a single day")
        return PriceSeries(
            self.dates[item], self.open[item], self.high[item], self.low[item],
            self.close[item], self.calendar,
        )

    def bar(self, i: int) -> Bar:
        return Bar(self.dates[i], float(self.open[i]), float(self.high[i]),
                   float(self.low[i]), float(self.close[i]))

    def equals(self, other: "PriceSeries") -> bool:
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("dates", "open", "high", "low", "close")
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"date": self.dates, "open": self.open, "high": self.high,
             "low": self.low, "close": self.close}
        )


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    dates: np.ndarray
    values: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.values)


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise MalformedRow(line, f"column {column!r}: cannot parse {text!r} as a number") from None


def load_csv(path: str | Path, schema: Mapping[str, str] | None = None) -> PriceSeries:
    """Read a headered UTF-8 CSV of daily bars.

    ``schema`` maps the logical names ``date, open, high, low, close`` to
    column headers in the file. Rows are sorted by date; duplicated dates,
    non-positive prices and OHLC violations are rejected with the offending
    line number.
    """
    cols = {**DEFAULT_SCHEMA, **(schema or {})}
    path = Path(path)
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MalformedRow(1, "missing header row")
        missing = [cols[k] for k in DEFAULT_SCHEMA if cols[k] not in reader.fieldnames]
        if missing:
            raise MalformedRow(1, f"missing columns {missing}")
        for rec in reader:
            line = reader.line_num
            try:
                day = np.datetime64(rec[cols["date"]].strip(), "D")
            except (ValueError, AttributeError):
                raise MalformedRow(line, f"unparseable ISO-8601 date {rec[cols['date']]!r}") from None
            o, h, lo, c = (_parse_float(rec[cols[k]], line, cols[k])
                           for k in ("open", "high", "low", "close"))
            if not all(np.isfinite([o, h, lo, c])):
                raise MalformedRow(line, "non-finite price")
            if min(o, h, lo, c) <= 0:
                raise NonPositivePrice(f"line {line}: prices must be strictly positive")
            if lo > min(o, c) or h < max(o, c) or lo > h:
                raise MalformedRow(line, "OHLC invariant violated (low <= open,close <= high)")
            rows.append((day, o, h, lo, c, line))

    if not rows:
        raise TooShort(f"{path}: no data rows")
    rows.sort(key=lambda r: r[0])
    for prev, cur in zip(rows, rows[1:]):
        if prev[0] == cur[0]:
            raise UnsortedDuplicateDate(f"line {cur[5]}: duplicate date {cur[0]}")
    arr = np.array([r[1:5] for r in rows], dtype=float)
    dates = np.array([r[0] for r in rows], dtype="datetime64[D]")
    return PriceSeries(dates, arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])


def write_csv(series: PriceSeries, path: str | Path) -> None:
    frame = series.to_frame()
    frame["date"] = frame["date"].dt.strftime("%Y-%m-%d")
    frame.to_csv(path, index=False, float_format="%.10g", lineterminator="\n")


# ---------------------------------------------------------------------------
# Calendars
# ---------------------------------------------------------------------------

class NYSEHolidayCalendar(AbstractHolidayCalendar):
    """Rule-based approximation of full NYSE closures (no one-off closures)."""

    rules = [
        Holiday("NewYearsDay", month=1, day=1, observance=nearest_workday),
        USMartinLutherKingJr,
        USPresidentsDay,
        GoodFriday,
        USMemorialDay,
        Holiday("Juneteenth", month=6, day=19, start_date="2022-01-01", observance=nearest_workday),
        Holiday("IndependenceDay", month=7, day=4, observance=nearest_workday),
        USLaborDay,
        USThanksgivingDay,
        Holiday("Christmas", month=12, day=25, observance=nearest_workday),
    ]


def nyse_holidays(start, end) -> np.ndarray:
    days = NYSEHolidayCalendar().holidays(pd.Timestamp(start), pd.Timestamp(end))
    return days.values.astype("datetime64[D]")


def load_holidays(path: str | Path) -> np.ndarray:
    """One ISO date per line; blank lines and ``#`` comments ignored."""
    out = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        text = raw.split("#", 1)[0].strip()
        if text:
            out.append(np.datetime64(text, "D"))
    return np.array(sorted(out), dtype="datetime64[D]")


def business_days(start, end, holidays: Iterable = ()) -> np.ndarray:
    """Weekdays in ``[start, end]`` minus ``holidays``."""
    start = np.datetime64(start, "D")
    end = np.datetime64(end, "D") + 1
    hol = np.array(list(holidays), dtype="datetime64[D]")
    days = np.arange(start, end, dtype="datetime64[D]")
    mask = np.is_busday(days, holidays=hol)
    return days[mask]


def align_calendar(series: PriceSeries, calendar: Sequence, name: str = "custom") -> PriceSeries:
    """Reindex onto ``calendar``, filling missing days with a flat bar at the last close.

    Bars dated outside the calendar still count as "last known price" for the
    following calendar day but are not emitted themselves.
    """
    cal = np.asarray(calendar, dtype="datetime64[D]")
    if len(cal) == 0:
        raise ValueError("empty calendar")
    if np.any(np.diff(cal.astype("int64")) <= 0):
        raise ValueError("calendar must be strictly increasing")
    if len(series) == 0 or cal[0] < series.dates[0]:
        raise LeadingGap(f"no price on or before first calendar day {cal[0]}")

    # index of the last bar dated on or before each calendar day
    src = np.searchsorted(series.dates, cal, side="right") - 1
    exact = series.dates[src] == cal
    close = series.close[src]
    o = np.where(exact, series.open[src], close)
    h = np.where(exact, series.high[src], close)
    lo = np.where(exact, series.low[src], close)
    return PriceSeries(cal.copy(), o, h, lo, close.copy(), name)


def simple_returns(series: PriceSeries) -> ReturnSeries:
    if len(series) < 2:
        raise TooShort("need at least two closes for a return")
    c = series.close
    return ReturnSeries(series.dates[1:], c[1:] / c[:-1] - 1.0)


def log_prices(series: PriceSeries) -> tuple[np.ndarray, np.ndarray]:
    return series.dates, np.log(series.close)
