"""Generate the bundled synthetic daily price fixtures.

Each ticker gets a geometric Brownian motion path on a weekday calendar
(2010-01-07 .. 2019-12-31, regular US market holidays removed). The files
use the Yahoo Finance CSV export layout. Rerunning the script reproduces
the checked-in files byte for byte.
"""

import os

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
    sunday_to_monday,
)


class MarketCalendar(AbstractHolidayCalendar):
    rules = [
        Holiday("NewYear", month=1, day=1, observance=sunday_to_monday),
        USMartinLutherKingJr,
        USPresidentsDay,
        GoodFriday,
        USMemorialDay,
        Holiday("Independence", month=7, day=4, observance=nearest_workday),
        USLaborDay,
        USThanksgivingDay,
        Holiday("Christmas", month=12, day=25, observance=nearest_workday),
    ]


# ticker: (seed, start price, annual drift, annual volatility)
TICKERS = {
    "AAPL": (101, 7.65, 0.15, 0.28),
    "SONY": (102, 34.00, 0.08, 0.32),
    "AMZN": (103, 133.50, 0.20, 0.32),
    "NVDA": (104, 4.20, 0.25, 0.45),
    "INTC": (105, 20.60, 0.06, 0.26),
    "GM": (106, 33.00, 0.02, 0.30),
}


def main():
    out_dir = os.path.join(os.path.dirname(__file__), "..", "fixtures")
    days = pd.bdate_range("2010-01-07", "2019-12-31")
    days = days.difference(MarketCalendar().holidays("2010-01-01", "2019-12-31"))
    dt = 1.0 / 252.0
    for ticker, (seed, p0, mu, sigma) in TICKERS.items():
        rng = np.random.default_rng(seed)
        shocks = rng.standard_normal(len(days))
        log_ret = (mu - 0.5 * sigma**2) * dt + sigma * np.sqrt(dt) * shocks
        log_ret[0] = 0.0
        close = p0 * np.exp(np.cumsum(log_ret))
        spread = np.abs(rng.standard_normal(len(days))) * sigma * np.sqrt(dt) * close
        open_ = np.concatenate([[p0], close[:-1]])
        high = np.maximum(open_, close) + spread
        low = np.minimum(open_, close) - spread
        volume = rng.integers(1_000_000, 50_000_000, len(days))
        path = os.path.join(out_dir, f"{ticker}.csv")
        with open(path, "w", newline="\n") as f:
            f.write("Date,Open,High,Low,Close,Adj Close,Volume\n")
            for i, d in enumerate(days):
                f.write(
                    f"{d:%Y-%m-%d},{open_[i]:.6f},{high[i]:.6f},{low[i]:.6f},"
                    f"{close[i]:.6f},{close[i]:.6f},{volume[i]}\n"
                )
        print(ticker, len(days), f"{close[0]:.2f} -> {close[-1]:.2f}")


if __name__ == "__main__":
    main()
