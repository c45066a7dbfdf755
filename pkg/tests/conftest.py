from pathlib import Path

import numpy as np
import pytest

from ftf.market_data import PriceSeries, business_days, load_csv
from ftf.synthetic import generate_prices

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"


def make_series(seed: int, n: int = 400, daily_vol: float = 0.01, start: str = "2010-01-04") -> PriceSeries:
    dates = business_days(start, np.datetime64(start) + 2 * n)[:n]
    return generate_prices(seed, dates=dates, daily_vol=daily_vol, mean_segment=40.0)


@pytest.fixture(scope="session")
def gold() -> PriceSeries:
    return load_csv(DATA / "synthetic_gold.csv")


@pytest.fixture(scope="session")
def trend() -> PriceSeries:
    return load_csv(DATA / "synthetic_trend.csv")


@pytest.fixture
def series():
    return make_series(11)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(s.split()[0][2:])):
        terminalreporter.write_line(line)
